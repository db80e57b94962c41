#include "dgc/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace dgc {

void validate(const DgcConfig& cfg) {
  if (cfg.n_realizations < 1) throw InvalidArgument("number of realizations must be >= 1");
  if (cfg.n_classes < 2) throw InvalidArgument("number of classes must be >= 2");
  validate(MrassConfig{cfg.m_max});
  if (!(cfg.tol >= 0.0)) throw InvalidArgument("tolerance must be non-negative");
  if (cfg.i_max < 1) throw InvalidArgument("i_max must be positive");
  if (cfg.max_retries < 1) throw InvalidArgument("max_retries must be >= 1");
  if (cfg.n_threads < 1) throw InvalidArgument("thread count must be >= 1");
  validate(cfg.weights);
}

std::optional<int> propose(int label, int n_classes, Rng& rng) {
  const int next = (rng() >> 63) ? label + 1 : label - 1;
  if (next < 1 || next > n_classes) return std::nullopt;
  return next;
}

namespace {

double objective_unchecked(const EnergyVector& g, const EnergyVector& s, const Weights& w) {
  double u = 0.0;
  for (int n = 0; n < g.d(); ++n) u += w.gradient * phi(g.grad(n), s.grad(n)) + w.curvature * phi(g.curv(n), s.curv(n));
  return u;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

DescentResult greedy_descent(ClassField field, const EnergyVector& sample_e, const DgcConfig& cfg, Rng& rng,
                             const DirectionSet& dirs) {
  validate(cfg.weights);
  if (sample_e.d() != dirs.size()) throw InvalidArgument("greedy_descent: direction counts differ");
  const auto t0 = Clock::now();

  EnergyState state(field, dirs);
  EnergyVector current = state.energies();
  EnergyVector trial(dirs.size());
  EnergyState::Delta delta;

  RunStats stats;
  double u = objective_unchecked(current, sample_e, cfg.weights);
  stats.initial_u = u;

  const std::vector<Cell> cells = field.prediction_cells();
  const auto P = static_cast<std::int64_t>(cells.size());
  std::int64_t next_record = 0;
  const auto record = [&](std::int64_t step) {
    if (!cfg.record_trace || step < next_record) return;
    stats.trace.push_back({step, u});
    next_record = std::max(step + 1, static_cast<std::int64_t>(std::ceil(static_cast<double>(step) * 1.02)));
  };
  record(0);

  if (P > 0) {
    std::uniform_int_distribution<std::int64_t> pick(0, P - 1);
    std::int64_t i = 0, rejected = 0;
    while (rejected < P && i <= cfg.i_max) {
      const Cell site = cells[static_cast<std::size_t>(pick(rng))];
      const auto next = propose(field.label(site), field.n_classes(), rng);
      ++i;
      if (!next) {
        ++rejected;
        continue;
      }
      state.delta(field, site, *next, delta);
      state.energies_into(trial, &delta);
      const double u_new = objective_unchecked(trial, sample_e, cfg.weights);
      if (u_new < u) {
        assert(u_new < u);
        field.set_label(site, *next);
        state.apply(delta);
        u = u_new;
        ++stats.accepted_updates;
        rejected = 0;
        record(i);
      } else {
        ++rejected;
      }
    }
    stats.mc_steps = i;
  }
  if (cfg.record_trace && (stats.trace.empty() || stats.trace.back().step != stats.mc_steps))
    stats.trace.push_back({stats.mc_steps, u});

  // Recompute from the final sums so the residual carries no accumulated rounding.
  state.energies_into(current);
  stats.residual_u = objective_unchecked(current, sample_e, cfg.weights);
  stats.wall_time = seconds_since(t0);
  return {std::move(field), std::move(stats)};
}

namespace {

int nearest_rank(const std::vector<int>& sorted, double q) {
  const auto m = static_cast<double>(sorted.size());
  auto idx = static_cast<std::ptrdiff_t>(std::ceil(q * m)) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(sorted.size()) - 1);
  return sorted[static_cast<std::size_t>(idx)];
}

}  // namespace

PredictionSummary summarize(std::span<const ClassField> realizations) {
  if (realizations.empty()) throw InvalidArgument("summarize: no realizations");
  const ClassField& first = realizations.front();
  for (const auto& f : realizations)
    if (f.rows() != first.rows() || f.cols() != first.cols() || (f.mask() != first.mask()).any())
      throw InvalidArgument("summarize: realizations differ in shape or mask");

  PredictionSummary s;
  s.cells = first.prediction_cells();
  s.realizations_kept = static_cast<int>(realizations.size());
  const auto P = static_cast<Index>(s.cells.size());
  s.median.resize(P);
  s.ci_lo.resize(P);
  s.ci_hi.resize(P);
  std::vector<int> column(realizations.size());
  for (Index p = 0; p < P; ++p) {
    for (std::size_t j = 0; j < realizations.size(); ++j) column[j] = realizations[j].label(s.cells[p]);
    std::sort(column.begin(), column.end());
    s.median(p) = column[(column.size() - 1) / 2];
    s.ci_lo(p) = nearest_rank(column, 0.025);
    s.ci_hi(p) = nearest_rank(column, 0.975);
  }
  return s;
}

PredictionSummary summarize(std::span<const ClassField> realizations, const Thresholds<double>& th,
                            const Eigen::VectorXd& reference) {
  PredictionSummary s = summarize(realizations);
  const auto P = static_cast<Index>(s.cells.size());
  if (reference.size() != P) throw InvalidArgument("summarize: reference size differs from prediction count");
  s.per_cell_rmse = Eigen::VectorXd::Zero(P);
  for (const auto& f : realizations) {
    for (Index p = 0; p < P; ++p) {
      const double e = reference(p) - back_transform(f.label(s.cells[p]), th);
      s.per_cell_rmse(p) += e * e;
    }
  }
  s.per_cell_rmse = (s.per_cell_rmse / static_cast<double>(realizations.size())).cwiseSqrt();
  return s;
}

Thresholds<double> fill_thresholds(const Raster& grid, int n_classes) {
  const auto sample = grid.sampled_values();
  if (sample.empty()) throw InsufficientSampling("raster has no sampled cells");
  const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
  if (*mn == *mx) {
    Thresholds<double> th;
    th.n_classes = 1;
    th.lo = th.hi = *mn;
    return th;
  }
  return build_thresholds<double>(std::span<const double>(sample), n_classes);
}

DgcResult run_dgc(const Raster& grid, const DgcConfig& cfg, const DirectionSet& dirs) {
  validate(cfg);
  DgcResult out;
  out.thresholds = fill_thresholds(grid, cfg.n_classes);
  out.sample = discretize(grid, out.thresholds);
  out.sample_energies = sample_energies(out.sample, dirs);

  const int M = cfg.n_realizations;
  out.realizations.resize(static_cast<std::size_t>(M));
  out.runs.resize(static_cast<std::size_t>(M));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(M));
  const MrassConfig mrass{cfg.m_max};

  const auto realize = [&](int j) {
    RunStats last;
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
      Rng rng = make_rng(derive_seed(cfg.master_seed, Stream::realization, static_cast<std::uint64_t>(j),
                                     static_cast<std::uint64_t>(attempt)));
      ClassField init = mrass_initialize(out.sample, mrass, rng);
      auto [field, stats] = greedy_descent(std::move(init), out.sample_energies, cfg, rng, dirs);
      stats.attempts = attempt + 1;
      if (stats.residual_u < cfg.tol) {
        out.realizations[static_cast<std::size_t>(j)] = std::move(field);
        out.runs[static_cast<std::size_t>(j)] = std::move(stats);
        return;
      }
      last = std::move(stats);
    }
    std::ostringstream msg;
    msg << "realization " << j << " did not reach tolerance " << cfg.tol << " after " << cfg.max_retries
        << " initializations (last residual " << last.residual_u << ")";
    throw ConvergenceFailure(msg.str(), j, last.residual_u);
  };

  const int n_threads = std::min(cfg.n_threads, M);
  if (n_threads <= 1) {
    for (int j = 0; j < M; ++j) realize(j);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      workers.emplace_back([&] {
        for (int j = next++; j < M; j = next++) {
          try {
            realize(j);
          } catch (...) {
            errors[static_cast<std::size_t>(j)] = std::current_exception();
          }
        }
      });
    }
    workers.clear();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  out.summary = summarize(out.realizations);
  return out;
}

Raster reconstruct(const Raster& grid, const DgcResult& result) {
  Raster filled = grid;
  const auto& s = result.summary;
  for (std::size_t p = 0; p < s.cells.size(); ++p)
    filled.set(s.cells[p].row, s.cells[p].col, back_transform(s.median(static_cast<Index>(p)), result.thresholds));
  return filled;
}

GridArray<double> ci_width(const Raster& grid, const DgcResult& result) {
  GridArray<double> width = GridArray<double>::Zero(grid.rows(), grid.cols());
  const auto& s = result.summary;
  for (std::size_t p = 0; p < s.cells.size(); ++p) {
    const auto i = static_cast<Index>(p);
    width(s.cells[p].row, s.cells[p].col) =
        back_transform(s.ci_hi(i), result.thresholds) - back_transform(s.ci_lo(i), result.thresholds);
  }
  return width;
}

}  // namespace dgc
