#include "dgc/validation.hpp"

namespace dgc {

namespace {

// Sums an optional measure over the reports that carry it.
struct OptionalMean {
  double sum = 0.0;
  int n = 0;

  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }

  std::optional<double> value() const {
    if (n == 0) return std::nullopt;
    return sum / n;
  }
};

}  // namespace

AggregateReport aggregate(std::span<const MetricReport> reports) {
  if (reports.empty()) throw InvalidArgument("aggregate: no reports");
  AggregateReport a;
  a.s_samples = static_cast<int>(reports.size());
  OptionalMean f, are, aare, r;
  for (const auto& m : reports) {
    f.add(m.f_star);
    are.add(m.are);
    aare.add(m.aare);
    r.add(m.r);
    a.maae += m.aae;
    a.mrase += m.rase;
  }
  a.maae /= a.s_samples;
  a.mrase /= a.s_samples;
  a.mean_f_star = f.value();
  a.mare = are.value();
  a.maare = aare.value();
  a.mr = r.value();

  if (a.mean_f_star && f.n > 1) {
    double ss = 0.0;
    for (const auto& m : reports)
      if (m.f_star) ss += (*m.f_star - *a.mean_f_star) * (*m.f_star - *a.mean_f_star);
    a.std_f_star = std::sqrt(ss / (f.n - 1));
  }
  return a;
}

LocalErrors local_errors(const Eigen::MatrixXd& predictions, const Eigen::VectorXd& truth) {
  if (predictions.rows() != truth.size()) throw InvalidArgument("local_errors: site count mismatch");
  if (predictions.cols() < 1) throw InvalidArgument("local_errors: no realizations");
  const Eigen::ArrayXXd eps = (-predictions).colwise() + truth;
  const auto m = static_cast<double>(predictions.cols());
  LocalErrors e;
  e.mae = eps.abs().rowwise().sum() / m;
  e.mre = (eps.colwise() / truth.array()).rowwise().sum() / m;
  e.mare = (eps.abs().colwise() / truth.array()).rowwise().sum() / m;
  e.rmse = (eps.square().rowwise().sum() / m).sqrt();
  return e;
}

}  // namespace dgc
