#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgc/error.hpp"

namespace dgc {

/// Fraction of cells whose predicted label differs from the true one.
template <typename DerivedA, typename DerivedB>
double misclassification(const Eigen::MatrixBase<DerivedA>& truth, const Eigen::MatrixBase<DerivedB>& pred) {
  if (truth.size() != pred.size()) throw InvalidArgument("misclassification: size mismatch");
  if (truth.size() == 0) throw InvalidArgument("misclassification: empty prediction set");
  return static_cast<double>((truth.array() != pred.array()).count()) / static_cast<double>(truth.size());
}

/// Validation measures over the prediction set. Relative errors are absent
/// when a true value is zero and R is absent when either vector is constant;
/// `warnings` says why.
struct MetricReport {
  std::optional<double> f_star;
  double aae = 0.0;
  std::optional<double> are;
  std::optional<double> aare;
  double rase = 0.0;
  std::optional<double> r;
  Eigen::Index n_points = 0;
  std::vector<std::string> warnings;
};

/// Pearson correlation, nullopt for zero variance.
template <typename DerivedA, typename DerivedB>
std::optional<double> pearson(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y) {
  const Eigen::ArrayXd a = x.template cast<double>().array() - x.template cast<double>().mean();
  const Eigen::ArrayXd b = y.template cast<double>().array() - y.template cast<double>().mean();
  const double saa = (a * a).sum(), sbb = (b * b).sum();
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return (a * b).sum() / std::sqrt(saa * sbb);
}

/// Errors are eps = true - predicted.
template <typename DerivedA, typename DerivedB>
MetricReport interpolation_metrics(const Eigen::MatrixBase<DerivedA>& truth, const Eigen::MatrixBase<DerivedB>& pred) {
  if (truth.size() != pred.size()) throw InvalidArgument("interpolation_metrics: size mismatch");
  if (truth.size() < 2) throw InvalidArgument("interpolation_metrics: need at least 2 points");
  const Eigen::ArrayXd z = truth.template cast<double>().array();
  const Eigen::ArrayXd eps = z - pred.template cast<double>().array();
  const auto n = static_cast<double>(z.size());

  MetricReport m;
  m.n_points = z.size();
  m.aae = eps.abs().sum() / n;
  m.rase = std::sqrt(eps.square().sum() / n);
  if ((z == 0.0).any()) {
    m.warnings.emplace_back("true values contain zeros; relative errors omitted");
  } else {
    m.are = (eps / z).sum() / n;
    m.aare = (eps.abs() / z).sum() / n;
  }
  m.r = pearson(pred, truth);
  if (!m.r) m.warnings.emplace_back("zero variance; correlation omitted");
  return m;
}

/// Means of each measure over S sample configurations plus the standard
/// deviation of F*. Optional measures average over the reports that carry them.
struct AggregateReport {
  std::optional<double> mean_f_star;
  double std_f_star = 0.0;
  double maae = 0.0;
  std::optional<double> mare;
  std::optional<double> maare;
  double mrase = 0.0;
  std::optional<double> mr;
  int s_samples = 0;
};

AggregateReport aggregate(std::span<const MetricReport> reports);

/// Per-site errors over M predictions: rows = sites, columns = realizations.
struct LocalErrors {
  Eigen::VectorXd mae;
  Eigen::VectorXd mre;
  Eigen::VectorXd mare;
  Eigen::VectorXd rmse;
};

LocalErrors local_errors(const Eigen::MatrixXd& predictions, const Eigen::VectorXd& truth);

}  // namespace dgc
