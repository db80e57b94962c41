#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "dgc/grid.hpp"
#include "dgc/rng.hpp"

namespace dgc {

/// The k available cells nearest to `query` in Euclidean cell distance,
/// ordered by (distance, row, col). `available` marks eligible cells.
std::vector<Cell> nearest_cells(const Mask& available, Cell query, int k);

struct KnnConfig {
  std::vector<int> k_candidates{1, 3, 5, 7, 9, 11, 13, 15};
  int cv_folds = 5;
};

void validate(const KnnConfig& cfg);

struct KnnResult {
  Eigen::VectorXi labels;        // prediction cells, row-major
  int k = 1;                     // selected by cross validation
  std::vector<double> cv_error;  // per candidate, fold-averaged misclassification
};

/// Majority vote with a fixed k; ties go to the smallest label.
Eigen::VectorXi knn_predict(const ClassField& field, int k);

/// KNN classification with k chosen by random-fold cross validation over the sampled cells.
KnnResult knn_classify(const ClassField& field, const KnnConfig& cfg, Rng& rng);

/// Value of the nearest sampled cell, ties broken by row-major order.
Eigen::VectorXd nn_interpolate(const Raster& grid);

/// Inverse-distance weighted mean with weights d^-power over sampled cells
/// within `radius` (all sampled cells when unset).
Eigen::VectorXd idw_interpolate(const Raster& grid, double power = 2.0, std::optional<double> radius = std::nullopt);

}  // namespace dgc
