#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dgc/energy.hpp"
#include "dgc/grid.hpp"
#include "dgc/mrass.hpp"
#include "dgc/rng.hpp"

namespace dgc {

struct DgcConfig {
  int n_realizations = 100;  // M
  int n_classes = 8;         // N_c
  int m_max = 7;
  double tol = 0.5;
  std::int64_t i_max = 100'000'000;
  Weights weights{};
  int max_retries = 20;
  std::uint64_t master_seed = 0;
  int n_threads = 1;
  /// Record (step, U) points of accepted updates, log-spaced in step.
  bool record_trace = false;
};

void validate(const DgcConfig& cfg);

struct TracePoint {
  std::int64_t step = 0;
  double u = 0.0;
};

struct RunStats {
  std::int64_t mc_steps = 0;  // every proposal counts, including out-of-range ones
  std::int64_t accepted_updates = 0;
  double initial_u = 0.0;
  double residual_u = 0.0;
  double wall_time = 0.0;  // seconds
  int attempts = 1;        // initializations consumed by the realization
  std::vector<TracePoint> trace;
};

/// Per-prediction-cell statistics over the kept realizations; vectors are
/// indexed like `cells` (row-major order).
struct PredictionSummary {
  std::vector<Cell> cells;
  Eigen::VectorXi median;
  Eigen::VectorXi ci_lo;  // 2.5th percentile
  Eigen::VectorXi ci_hi;  // 97.5th percentile
  Eigen::VectorXd per_cell_rmse;  // data units; empty without a reference
  int realizations_kept = 0;
};

/// label +/- 1 with equal probability; nullopt when the move leaves [1, N_c].
std::optional<int> propose(int label, int n_classes, Rng& rng);

struct DescentResult {
  ClassField field;
  RunStats stats;
};

/// Greedy Monte Carlo: random prediction cell, +/-1 proposal, accept iff U
/// strictly drops. Stops after P consecutive unsuccessful trials or once the
/// step count exceeds i_max.
DescentResult greedy_descent(ClassField initial, const EnergyVector& sample_e, const DgcConfig& cfg, Rng& rng,
                             const DirectionSet& dirs = DirectionSet::standard());

/// Median (lower median for even counts) and nearest-rank 2.5/97.5 percentiles.
PredictionSummary summarize(std::span<const ClassField> realizations);

/// As above, plus per-cell RMSE of back-transformed labels against `reference`,
/// which holds the true values at the prediction cells in row-major order.
PredictionSummary summarize(std::span<const ClassField> realizations, const Thresholds<double>& th,
                            const Eigen::VectorXd& reference);

struct DgcResult {
  PredictionSummary summary;
  Thresholds<double> thresholds;
  std::vector<RunStats> runs;  // indexed by realization
  std::vector<ClassField> realizations;
  ClassField sample;
  EnergyVector sample_energies;
};

/// Thresholds for a fill; a zero-range sample collapses to a single class.
Thresholds<double> fill_thresholds(const Raster& grid, int n_classes);

/// Full fill: discretize, sample energies, M independent realizations each
/// retried with fresh initializations until residual U < tol, then summarize.
/// Output depends on cfg.master_seed only, not on cfg.n_threads.
DgcResult run_dgc(const Raster& grid, const DgcConfig& cfg, const DirectionSet& dirs = DirectionSet::standard());

/// Sampled values kept, median labels back-transformed at missing cells.
Raster reconstruct(const Raster& grid, const DgcResult& result);

/// Data-unit 95% CI width per cell (0 at sampled cells).
GridArray<double> ci_width(const Raster& grid, const DgcResult& result);

}  // namespace dgc
