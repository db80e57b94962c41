#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "dgc/grid.hpp"

namespace dgc {

/// Lattice direction as an integer cell displacement plus its step length.
struct Direction {
  int dcol = 0;  // x offset
  int drow = 0;  // y offset
  double step = 1.0;
};

class DirectionSet {
 public:
  /// Offsets must be non-zero and pairwise non-collinear.
  explicit DirectionSet(std::vector<Direction> dirs);

  /// 0, 45, 90 and 135 degrees: (1,0), (1,1), (0,1), (-1,1) with steps 1, sqrt 2, 1, sqrt 2.
  static DirectionSet standard();

  int size() const noexcept { return static_cast<int>(dirs_.size()); }
  const Direction& operator[](int n) const { return dirs_[static_cast<std::size_t>(n)]; }
  auto begin() const { return dirs_.begin(); }
  auto end() const { return dirs_.end(); }

 private:
  std::vector<Direction> dirs_;
};

using CountArray = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>;

/// Per-direction normalized gradient and curvature energies and the number of
/// stencil terms averaged in each.
struct EnergyVector {
  Eigen::ArrayXd grad;
  Eigen::ArrayXd curv;
  CountArray n_pairs;
  CountArray n_triplets;

  EnergyVector() = default;
  explicit EnergyVector(int d)
      : grad(Eigen::ArrayXd::Zero(d)),
        curv(Eigen::ArrayXd::Zero(d)),
        n_pairs(CountArray::Zero(d)),
        n_triplets(CountArray::Zero(d)) {}

  int d() const noexcept { return static_cast<int>(grad.size()); }
};

struct Weights {
  double gradient = 0.5;
  double curvature = 0.5;
};

/// [I(s + e) - I(s)]^2 / a^2, or nullopt when s + e leaves the grid.
std::optional<double> local_gradient(const ClassField& field, Cell site, const Direction& dir);

/// [I(s + e) + I(s - e) - 2 I(s)]^2 / a^4, or nullopt when a neighbor leaves the grid.
std::optional<double> local_curvature(const ClassField& field, Cell site, const Direction& dir);

/// Energies over stencils whose cells are all sampled.
/// Throws InsufficientSampling when a direction has no pair or no triplet.
EnergyVector sample_energies(const ClassField& field, const DirectionSet& dirs);

/// Energies over every in-bounds stencil. Requires a fully labeled field.
EnergyVector grid_energies(const ClassField& field, const DirectionSet& dirs);

/// (1 - x / ref)^2, or x^2 when ref is zero.
inline double phi(double x, double ref) {
  if (ref != 0.0) {
    const double t = 1.0 - x / ref;
    return t * t;
  }
  return x * x;
}

void validate(const Weights& w);

/// Objective functional summed over directions.
double objective(const EnergyVector& grid_e, const EnergyVector& sample_e, const Weights& w);

/// Grid energies after relabeling one prediction cell, computed from the
/// stencils touching that cell only.
EnergyVector delta_energies(const ClassField& field, const EnergyVector& energies, Cell site,
                            int new_label, const DirectionSet& dirs);

/// Integer running sums of the squared label differences of every in-bounds
/// stencil. Term counts depend on the grid shape only, so energies are exact
/// at any point of a chained update sequence.
class EnergyState {
 public:
  struct Delta {
    CountArray grad;
    CountArray curv;
  };

  EnergyState(const ClassField& field, const DirectionSet& dirs);

  int d() const noexcept { return static_cast<int>(grad_sum_.size()); }

  /// Change of the raw sums if `site` took `new_label`.
  void delta(const ClassField& field, Cell site, int new_label, Delta& out) const;

  void apply(const Delta& delta);

  /// Energies of the current state, optionally with a pending delta applied.
  void energies_into(EnergyVector& out, const Delta* pending = nullptr) const;
  EnergyVector energies() const;

  const CountArray& grad_sum() const noexcept { return grad_sum_; }
  const CountArray& curv_sum() const noexcept { return curv_sum_; }

 private:
  DirectionSet dirs_;
  CountArray grad_sum_;
  CountArray curv_sum_;
  CountArray n_pairs_;
  CountArray n_triplets_;
  Eigen::ArrayXd inv_grad_norm_;  // 1 / (n_pairs a^2)
  Eigen::ArrayXd inv_curv_norm_;  // 1 / (n_triplets a^4)
};

}  // namespace dgc
