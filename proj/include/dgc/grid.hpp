#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dgc/error.hpp"

namespace dgc {

using Index = Eigen::Index;

/// Row-major dense 2D array; row = y, col = x. Grid spacing is 1 along both axes.
template <typename T>
using GridArray = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// true = sampled, false = missing (prediction cell).
using Mask = GridArray<bool>;
using LabelArray = GridArray<int>;

struct Cell {
  Index row = 0;
  Index col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Rectangular grid of continuous values with a missing-cell mask.
/// Missing cells hold NaN.
template <typename Scalar>
class RasterGrid {
 public:
  using Values = GridArray<Scalar>;

  RasterGrid() = default;

  /// All-missing grid.
  RasterGrid(Index rows, Index cols)
      : values_(Values::Constant(rows, cols, missing_value())),
        mask_(Mask::Constant(rows, cols, false)) {
    check_shape(rows, cols);
  }

  RasterGrid(Values values, Mask mask) : values_(std::move(values)), mask_(std::move(mask)) {
    check_shape(values_.rows(), values_.cols());
    if (mask_.rows() != values_.rows() || mask_.cols() != values_.cols())
      throw InvalidArgument("RasterGrid: mask shape differs from value shape");
    for (Index r = 0; r < rows(); ++r) {
      for (Index c = 0; c < cols(); ++c) {
        if (!mask_(r, c)) {
          values_(r, c) = missing_value();
        } else if (!std::isfinite(values_(r, c))) {
          throw InvalidArgument("RasterGrid: non-finite value at sampled cell (" +
                                std::to_string(r) + ", " + std::to_string(c) + ")");
        }
      }
    }
  }

  static RasterGrid fully_sampled(Values values) {
    Mask mask = Mask::Constant(values.rows(), values.cols(), true);
    return RasterGrid(std::move(values), std::move(mask));
  }

  static constexpr Scalar missing_value() { return std::numeric_limits<Scalar>::quiet_NaN(); }

  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  Index size() const noexcept { return values_.size(); }

  const Values& values() const noexcept { return values_; }
  const Mask& mask() const noexcept { return mask_; }

  bool in_bounds(Index r, Index c) const noexcept { return r >= 0 && c >= 0 && r < rows() && c < cols(); }
  bool is_sampled(Index r, Index c) const { return mask_(r, c); }
  Scalar value(Index r, Index c) const { return values_(r, c); }

  void set(Index r, Index c, Scalar v) {
    if (!std::isfinite(v)) throw InvalidArgument("RasterGrid::set: non-finite value");
    values_(r, c) = v;
    mask_(r, c) = true;
  }

  void set_missing(Index r, Index c) {
    values_(r, c) = missing_value();
    mask_(r, c) = false;
  }

  Index n_sampled() const { return mask_.count(); }
  Index n_missing() const { return size() - n_sampled(); }

  /// Sampled values in row-major order.
  std::vector<Scalar> sampled_values() const {
    std::vector<Scalar> out;
    out.reserve(static_cast<std::size_t>(n_sampled()));
    for (Index r = 0; r < rows(); ++r)
      for (Index c = 0; c < cols(); ++c)
        if (mask_(r, c)) out.push_back(values_(r, c));
    return out;
  }

  /// Missing cells in row-major order.
  std::vector<Cell> missing_cells() const {
    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>(n_missing()));
    for (Index r = 0; r < rows(); ++r)
      for (Index c = 0; c < cols(); ++c)
        if (!mask_(r, c)) out.push_back({r, c});
    return out;
  }

 private:
  static void check_shape(Index rows, Index cols) {
    if (rows <= 0 || cols <= 0) throw InvalidArgument("RasterGrid: dimensions must be positive");
  }

  Values values_;
  Mask mask_;
};

using Raster = RasterGrid<double>;

/// Uniform class boundaries t_2 < ... < t_{N_c} plus the sample extremes used
/// as finite endpoints of the two unbounded edge classes.
template <typename Scalar>
struct Thresholds {
  int n_classes = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> levels;  // levels[k - 2] = t_k
  Scalar lo = 0;
  Scalar hi = 0;

  Scalar width() const { return (hi - lo) / static_cast<Scalar>(n_classes); }

  /// t_k for k in [1, N_c + 1] with t_1 = lo and t_{N_c+1} = hi.
  Scalar t(int k) const {
    if (k == 1) return lo;
    if (k == n_classes + 1) return hi;
    return levels(k - 2);
  }
};

template <typename Scalar>
Thresholds<Scalar> build_thresholds(std::span<const Scalar> sample, int n_classes) {
  if (n_classes < 2) throw InvalidArgument("build_thresholds: need at least 2 classes");
  if (sample.empty()) throw InvalidArgument("build_thresholds: empty sample");
  const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
  if (!(*mx > *mn)) throw InvalidArgument("build_thresholds: zero-range sample (all values equal)");

  Thresholds<Scalar> th;
  th.n_classes = n_classes;
  th.lo = *mn;
  th.hi = *mx;
  const Scalar w = (th.hi - th.lo) / static_cast<Scalar>(n_classes);
  th.levels.resize(n_classes - 1);
  for (int k = 2; k <= n_classes; ++k) th.levels(k - 2) = th.lo + static_cast<Scalar>(k - 1) * w;
  return th;
}

template <typename Scalar>
Thresholds<Scalar> build_thresholds(const RasterGrid<Scalar>& grid, int n_classes) {
  const auto sample = grid.sampled_values();
  return build_thresholds<Scalar>(std::span<const Scalar>(sample), n_classes);
}

/// Class label of a single value: C_1 = (-inf, t_2], C_q = (t_q, t_{q+1}], C_{N_c} = (t_{N_c}, inf).
template <typename Scalar>
int classify(Scalar value, const Thresholds<Scalar>& th) {
  const auto* first = th.levels.data();
  const auto* last = first + th.levels.size();
  return static_cast<int>(std::lower_bound(first, last, value) - first) + 1;
}

/// Midpoint of the class interval, with lo/hi closing the edge classes.
template <typename Scalar>
Scalar back_transform(int label, const Thresholds<Scalar>& th) {
  if (label < 1 || label > th.n_classes)
    throw InvalidArgument("back_transform: label " + std::to_string(label) + " outside [1, " +
                          std::to_string(th.n_classes) + "]");
  return (th.t(label) + th.t(label + 1)) / Scalar(2);
}

/// Integer class labels over the grid. Label 0 marks a prediction cell that has
/// not been initialized yet; after initialization every label is in [1, N_c].
class ClassField {
 public:
  ClassField() = default;
  ClassField(LabelArray labels, Mask mask, int n_classes);

  Index rows() const noexcept { return labels_.rows(); }
  Index cols() const noexcept { return labels_.cols(); }
  Index size() const noexcept { return labels_.size(); }
  int n_classes() const noexcept { return n_classes_; }

  const LabelArray& labels() const noexcept { return labels_; }
  const Mask& mask() const noexcept { return mask_; }

  bool in_bounds(Index r, Index c) const noexcept { return r >= 0 && c >= 0 && r < rows() && c < cols(); }
  bool is_sampled(Index r, Index c) const { return mask_(r, c); }
  int label(Index r, Index c) const { return labels_(r, c); }
  int label(Cell cell) const { return labels_(cell.row, cell.col); }

  /// Relabels a prediction cell. Sampled cells are immutable.
  void set_label(Cell cell, int label);

  /// True when every cell carries a label in [1, N_c].
  bool fully_labeled() const;

  std::vector<Cell> prediction_cells() const;
  Index n_prediction() const { return size() - mask_.count(); }

 private:
  LabelArray labels_;
  Mask mask_;
  int n_classes_ = 0;
};

template <typename Scalar>
ClassField discretize(const RasterGrid<Scalar>& grid, const Thresholds<Scalar>& th) {
  LabelArray labels = LabelArray::Zero(grid.rows(), grid.cols());
  for (Index r = 0; r < grid.rows(); ++r)
    for (Index c = 0; c < grid.cols(); ++c)
      if (grid.is_sampled(r, c)) labels(r, c) = classify(grid.value(r, c), th);
  return ClassField(std::move(labels), grid.mask(), th.n_classes);
}

}  // namespace dgc
