#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "dgc/grid.hpp"
#include "dgc/rng.hpp"

namespace dgc {

/// Anisotropic Whittle-Matern covariance with axes aligned to the grid:
/// c(r) = sigma^2 2^(1-nu) / Gamma(nu) h^nu K_nu(h), h = sqrt(r1^2/xi1^2 + r2^2/xi2^2).
struct MaternSpec {
  double mean = 50.0;
  double sigma = 10.0;
  double xi1 = 4.0;  // along x (columns)
  double xi2 = 2.0;  // along y (rows)
  double nu = 2.5;   // 0.5, 1.5, 2.5 or 3.5
};

void validate(const MaternSpec& spec);

/// Correlation 2^(1-nu)/Gamma(nu) h^nu K_nu(h) for half-integer nu, closed form.
double matern_correlation(double h, double nu);

double matern_cov(double r1, double r2, const MaternSpec& spec);

/// Circulant-embedding generator. The embedding spectrum is computed once and
/// reused for every draw.
class MaternFieldGenerator {
 public:
  MaternFieldGenerator(Index rows, Index cols, const MaternSpec& spec);

  /// One fully sampled realization.
  Raster operator()(Rng& rng) const;

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index embedding_rows() const noexcept { return ext_rows_; }
  Index embedding_cols() const noexcept { return ext_cols_; }

 private:
  Index rows_, cols_;
  Index ext_rows_, ext_cols_;
  MaternSpec spec_;
  GridArray<double> sqrt_spectrum_;  // sqrt(lambda / (rows_ext cols_ext))
};

Raster generate_field(Index rows, Index cols, const MaternSpec& spec, std::uint64_t seed);

/// A sample with held-out cells; `removed` and `truth` are in row-major order.
struct Holdout {
  Raster sample;
  std::vector<Cell> removed;
  Eigen::VectorXd truth;
};

/// Removes P = floor(p/100 N_G) sampled cells uniformly without replacement.
Holdout random_thin(const Raster& grid, double p_percent, std::uint64_t seed);

/// Removes the width x height rectangle whose top-left cell is `origin`.
Holdout block_remove(const Raster& grid, Cell origin, Index width, Index height);

}  // namespace dgc
