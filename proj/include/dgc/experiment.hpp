#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dgc/baselines.hpp"
#include "dgc/optimizer.hpp"
#include "dgc/raster_io.hpp"
#include "dgc/synth.hpp"
#include "dgc/validation.hpp"

namespace dgc {

/// Process exit codes.
enum class ExitCode : int {
  ok = 0,
  usage = 1,
  parse = 2,
  insufficient_sampling = 3,
  convergence = 4,
};

/// Maps the active exception to an exit code and writes its message to `err`.
ExitCode report_exception(std::ostream& err);

// ---------------------------------------------------------------- fill

struct FillOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  DgcConfig dgc;
};

/// Writes filled.asc, ci_width.asc and manifest.txt into out_dir.
void cmd_fill(const FillOptions& opts, std::ostream& log);

// ---------------------------------------------------------------- synth

enum class Scenario { random_thin, block, file };

struct BlockSpec {
  Index x = 17;  // column of the top-left cell
  Index y = 21;  // row of the top-left cell
  Index width = 16;
  Index height = 8;
};

struct SynthOptions {
  Index rows = 50;
  Index cols = 50;
  MaternSpec matern{};
  Scenario scenario = Scenario::random_thin;
  double thin_percent = 33.0;
  BlockSpec block{};
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};

/// Writes truth.asc, sample.asc and holdout.csv (row,col,value of removed cells).
void cmd_synth(const SynthOptions& opts, std::ostream& log);

// ---------------------------------------------------------------- bench

struct BaselineToggles {
  bool knn = true;
  bool nn = true;
  bool idw = true;
};

/// Parses a comma-separated list of knn, nn, idw (or "none").
BaselineToggles parse_baselines(const std::string& list);

struct BenchOptions {
  Scenario scenario = Scenario::random_thin;
  int s_samples = 100;
  Index rows = 50;
  Index cols = 50;
  MaternSpec matern{};
  double thin_percent = 33.0;
  BlockSpec block{};
  std::filesystem::path input;  // truth raster for Scenario::file
  DgcConfig dgc{};              // dgc.master_seed is the experiment seed
  BaselineToggles baselines{};
  KnnConfig knn{};
  double idw_power = 2.0;
  int workers = 1;
  bool traces = true;
};

/// One row of the metrics table.
struct MethodRow {
  int sample = 0;  // 1-based
  std::string method;
  MetricReport metrics;
  std::optional<double> mean_mcs;       // dgc only
  std::optional<double> mean_residual;  // dgc only
  std::optional<int> k;                 // knn only
};

struct SampleOutcome {
  int sample = 0;
  std::vector<MethodRow> rows;
  std::vector<RunStats> dgc_runs;
  std::optional<std::string> error;
  ExitCode error_code = ExitCode::ok;
  double wall_time = 0.0;
};

struct AggregateRow {
  std::string method;
  AggregateReport report;
  std::optional<double> mean_mcs;
};

struct BenchResult {
  std::vector<SampleOutcome> samples;  // ordered by sample index
  std::vector<AggregateRow> aggregates;
  double wall_time = 0.0;
};

/// Runs the S-sample protocol in memory. Sample s uses substreams of
/// dgc.master_seed indexed by s, so results do not depend on `workers`.
BenchResult run_bench(const BenchOptions& opts);

/// Aggregates per-sample rows by method, in first-appearance order.
std::vector<AggregateRow> aggregate_rows(const std::vector<SampleOutcome>& samples);

/// Fixed column order of metrics.csv and aggregate.csv.
extern const char* const kMetricsColumns;
extern const char* const kAggregateColumns;

void write_metrics_csv(std::ostream& out, const BenchResult& result);
void write_aggregate_csv(std::ostream& out, const BenchResult& result);

/// run_bench plus metrics.csv, aggregate.csv, residuals.csv, paired.csv
/// (when DGC and KNN both ran), traces/ and manifest.txt under out_dir.
/// Returns ok, or the category of the first failed sample.
ExitCode cmd_bench(const BenchOptions& opts, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace dgc
