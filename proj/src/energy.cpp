#include "dgc/energy.hpp"

#include <cmath>
#include <string>

namespace dgc {

namespace {

std::int64_t sq(std::int64_t v) { return v * v; }

struct RawSums {
  CountArray grad, curv, pairs, triplets;
};

// Raw squared-difference sums over stencils; when `sampled_only` is set, a
// stencil contributes only if all of its cells are sampled.
RawSums accumulate(const ClassField& field, const DirectionSet& dirs, bool sampled_only) {
  const int d = dirs.size();
  RawSums s{CountArray::Zero(d), CountArray::Zero(d), CountArray::Zero(d), CountArray::Zero(d)};
  const auto& L = field.labels();
  const auto& M = field.mask();
  for (int n = 0; n < d; ++n) {
    const Index dr = dirs[n].drow;
    const Index dc = dirs[n].dcol;
    for (Index r = 0; r < field.rows(); ++r) {
      for (Index c = 0; c < field.cols(); ++c) {
        if (sampled_only && !M(r, c)) continue;
        const Index rp = r + dr, cp = c + dc;
        if (!field.in_bounds(rp, cp)) continue;
        if (sampled_only && !M(rp, cp)) continue;
        s.grad(n) += sq(L(rp, cp) - L(r, c));
        s.pairs(n) += 1;
        const Index rm = r - dr, cm = c - dc;
        if (!field.in_bounds(rm, cm)) continue;
        if (sampled_only && !M(rm, cm)) continue;
        s.curv(n) += sq(std::int64_t{L(rp, cp)} + L(rm, cm) - 2 * std::int64_t{L(r, c)});
        s.triplets(n) += 1;
      }
    }
  }
  return s;
}

EnergyVector normalize(const RawSums& s, const DirectionSet& dirs) {
  EnergyVector e(dirs.size());
  e.n_pairs = s.pairs;
  e.n_triplets = s.triplets;
  for (int n = 0; n < dirs.size(); ++n) {
    const double a2 = dirs[n].step * dirs[n].step;
    e.grad(n) = s.pairs(n) > 0 ? static_cast<double>(s.grad(n)) / (static_cast<double>(s.pairs(n)) * a2) : 0.0;
    e.curv(n) =
        s.triplets(n) > 0 ? static_cast<double>(s.curv(n)) / (static_cast<double>(s.triplets(n)) * a2 * a2) : 0.0;
  }
  return e;
}

std::int64_t count_pairs(const ClassField& f, const Direction& dir) {
  const Index nr = f.rows() - std::abs(dir.drow), nc = f.cols() - std::abs(dir.dcol);
  return nr > 0 && nc > 0 ? static_cast<std::int64_t>(nr) * nc : 0;
}

std::int64_t count_triplets(const ClassField& f, const Direction& dir) {
  const Index nr = f.rows() - 2 * std::abs(dir.drow), nc = f.cols() - 2 * std::abs(dir.dcol);
  return nr > 0 && nc > 0 ? static_cast<std::int64_t>(nr) * nc : 0;
}

}  // namespace

DirectionSet::DirectionSet(std::vector<Direction> dirs) : dirs_(std::move(dirs)) {
  if (dirs_.empty()) throw InvalidArgument("DirectionSet: no directions");
  for (std::size_t i = 0; i < dirs_.size(); ++i) {
    const auto& a = dirs_[i];
    if (a.dcol == 0 && a.drow == 0) throw InvalidArgument("DirectionSet: zero offset");
    if (!(a.step > 0.0)) throw InvalidArgument("DirectionSet: step must be positive");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& b = dirs_[j];
      if (a.dcol * b.drow - a.drow * b.dcol == 0) throw InvalidArgument("DirectionSet: collinear offsets");
    }
  }
}

DirectionSet DirectionSet::standard() {
  const double diag = std::sqrt(2.0);
  return DirectionSet({{1, 0, 1.0}, {1, 1, diag}, {0, 1, 1.0}, {-1, 1, diag}});
}

std::optional<double> local_gradient(const ClassField& field, Cell s, const Direction& dir) {
  const Index rp = s.row + dir.drow, cp = s.col + dir.dcol;
  if (!field.in_bounds(s.row, s.col) || !field.in_bounds(rp, cp)) return std::nullopt;
  const double diff = field.label(rp, cp) - field.label(s);
  return diff * diff / (dir.step * dir.step);
}

std::optional<double> local_curvature(const ClassField& field, Cell s, const Direction& dir) {
  const Index rp = s.row + dir.drow, cp = s.col + dir.dcol;
  const Index rm = s.row - dir.drow, cm = s.col - dir.dcol;
  if (!field.in_bounds(s.row, s.col) || !field.in_bounds(rp, cp) || !field.in_bounds(rm, cm))
    return std::nullopt;
  const double diff = field.label(rp, cp) + field.label(rm, cm) - 2.0 * field.label(s);
  const double a2 = dir.step * dir.step;
  return diff * diff / (a2 * a2);
}

EnergyVector sample_energies(const ClassField& field, const DirectionSet& dirs) {
  const RawSums s = accumulate(field, dirs, true);
  for (int n = 0; n < dirs.size(); ++n) {
    if (s.pairs(n) == 0 || s.triplets(n) == 0)
      throw InsufficientSampling("insufficient sampling in direction " + std::to_string(n) + " (offset " +
                                 std::to_string(dirs[n].dcol) + "," + std::to_string(dirs[n].drow) +
                                 "): " + std::to_string(s.pairs(n)) + " sampled pairs, " +
                                 std::to_string(s.triplets(n)) + " sampled triplets");
  }
  return normalize(s, dirs);
}

EnergyVector grid_energies(const ClassField& field, const DirectionSet& dirs) {
  if (!field.fully_labeled()) throw InvalidArgument("grid_energies: field has unlabeled cells");
  return normalize(accumulate(field, dirs, false), dirs);
}

void validate(const Weights& w) {
  if (!(w.gradient >= 0.0) || !(w.curvature >= 0.0) || std::abs(w.gradient + w.curvature - 1.0) > 1e-12)
    throw InvalidArgument("weights must be non-negative and sum to 1");
}

double objective(const EnergyVector& grid_e, const EnergyVector& sample_e, const Weights& w) {
  validate(w);
  if (grid_e.d() != sample_e.d()) throw InvalidArgument("objective: direction counts differ");
  double u = 0.0;
  for (int n = 0; n < grid_e.d(); ++n)
    u += w.gradient * phi(grid_e.grad(n), sample_e.grad(n)) + w.curvature * phi(grid_e.curv(n), sample_e.curv(n));
  return u;
}

EnergyState::EnergyState(const ClassField& field, const DirectionSet& dirs) : dirs_(dirs) {
  if (!field.fully_labeled()) throw InvalidArgument("EnergyState: field has unlabeled cells");
  RawSums s = accumulate(field, dirs, false);
  grad_sum_ = std::move(s.grad);
  curv_sum_ = std::move(s.curv);
  n_pairs_ = std::move(s.pairs);
  n_triplets_ = std::move(s.triplets);
  const int d = dirs.size();
  inv_grad_norm_.resize(d);
  inv_curv_norm_.resize(d);
  for (int n = 0; n < d; ++n) {
    const double a2 = dirs[n].step * dirs[n].step;
    inv_grad_norm_(n) = n_pairs_(n) > 0 ? 1.0 / (static_cast<double>(n_pairs_(n)) * a2) : 0.0;
    inv_curv_norm_(n) = n_triplets_(n) > 0 ? 1.0 / (static_cast<double>(n_triplets_(n)) * a2 * a2) : 0.0;
  }
}

void EnergyState::delta(const ClassField& field, Cell s, int new_label, Delta& out) const {
  const int d = dirs_.size();
  out.grad.setZero(d);
  out.curv.setZero(d);
  const auto& L = field.labels();
  const std::int64_t o = L(s.row, s.col);
  const std::int64_t v = new_label;
  if (o == v) return;
  for (int n = 0; n < d; ++n) {
    const Index dr = dirs_[n].drow, dc = dirs_[n].dcol;
    const bool has_p = field.in_bounds(s.row + dr, s.col + dc);
    const bool has_m = field.in_bounds(s.row - dr, s.col - dc);
    const std::int64_t lp = has_p ? L(s.row + dr, s.col + dc) : 0;
    const std::int64_t lm = has_m ? L(s.row - dr, s.col - dc) : 0;
    std::int64_t dg = 0, dcv = 0;
    if (has_p) dg += sq(lp - v) - sq(lp - o);
    if (has_m) dg += sq(v - lm) - sq(o - lm);
    if (has_p && has_m) dcv += sq(lp + lm - 2 * v) - sq(lp + lm - 2 * o);
    // s as the minus neighbor of the triplet centered at s + e
    if (has_p && field.in_bounds(s.row + 2 * dr, s.col + 2 * dc)) {
      const std::int64_t lpp = L(s.row + 2 * dr, s.col + 2 * dc);
      dcv += sq(lpp + v - 2 * lp) - sq(lpp + o - 2 * lp);
    }
    // s as the plus neighbor of the triplet centered at s - e
    if (has_m && field.in_bounds(s.row - 2 * dr, s.col - 2 * dc)) {
      const std::int64_t lmm = L(s.row - 2 * dr, s.col - 2 * dc);
      dcv += sq(v + lmm - 2 * lm) - sq(o + lmm - 2 * lm);
    }
    out.grad(n) = dg;
    out.curv(n) = dcv;
  }
}

void EnergyState::apply(const Delta& delta) {
  grad_sum_ += delta.grad;
  curv_sum_ += delta.curv;
}

void EnergyState::energies_into(EnergyVector& out, const Delta* pending) const {
  const int d = this->d();
  if (out.d() != d) out = EnergyVector(d);
  out.n_pairs = n_pairs_;
  out.n_triplets = n_triplets_;
  if (pending) {
    out.grad = (grad_sum_ + pending->grad).cast<double>() * inv_grad_norm_;
    out.curv = (curv_sum_ + pending->curv).cast<double>() * inv_curv_norm_;
  } else {
    out.grad = grad_sum_.cast<double>() * inv_grad_norm_;
    out.curv = curv_sum_.cast<double>() * inv_curv_norm_;
  }
}

EnergyVector EnergyState::energies() const {
  EnergyVector e(d());
  energies_into(e);
  return e;
}

EnergyVector delta_energies(const ClassField& field, const EnergyVector& energies, Cell site, int new_label,
                            const DirectionSet& dirs) {
  if (field.is_sampled(site.row, site.col)) throw InvalidArgument("delta_energies: site is sampled");
  if (new_label < 1 || new_label > field.n_classes()) throw InvalidArgument("delta_energies: label out of range");
  if (energies.d() != dirs.size()) throw InvalidArgument("delta_energies: direction counts differ");

  EnergyVector out = energies;
  const std::int64_t o = field.label(site);
  if (o == new_label) return out;

  for (int n = 0; n < dirs.size(); ++n) {
    const Direction& e = dirs[n];
    const double a2 = e.step * e.step;
    const auto np = count_pairs(field, e);
    const auto nt = count_triplets(field, e);
    std::int64_t dg = 0, dcv = 0;
    const auto term = [&](Index r, Index c) -> std::optional<std::int64_t> {
      if (!field.in_bounds(r, c)) return std::nullopt;
      return field.label(r, c);
    };
    const Index r = site.row, c = site.col;
    const auto lp = term(r + e.drow, c + e.dcol);
    const auto lm = term(r - e.drow, c - e.dcol);
    const auto lpp = term(r + 2 * e.drow, c + 2 * e.dcol);
    const auto lmm = term(r - 2 * e.drow, c - 2 * e.dcol);
    const std::int64_t v = new_label;
    if (lp) dg += sq(*lp - v) - sq(*lp - o);
    if (lm) dg += sq(v - *lm) - sq(o - *lm);
    if (lp && lm) dcv += sq(*lp + *lm - 2 * v) - sq(*lp + *lm - 2 * o);
    if (lp && lpp) dcv += sq(*lpp + v - 2 * *lp) - sq(*lpp + o - 2 * *lp);
    if (lm && lmm) dcv += sq(v + *lmm - 2 * *lm) - sq(o + *lmm - 2 * *lm);
    if (np > 0) out.grad(n) += static_cast<double>(dg) / (static_cast<double>(np) * a2);
    if (nt > 0) out.curv(n) += static_cast<double>(dcv) / (static_cast<double>(nt) * a2 * a2);
  }
  return out;
}

}  // namespace dgc
