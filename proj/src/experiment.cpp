#include "dgc/experiment.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace dgc {

namespace fs = std::filesystem;

ExitCode report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ParseError& e) {
    err << "error: " << e.what();
    if (e.line() > 0) err << " (line " << e.line() << ", column " << e.column() << ")";
    err << '\n';
    return ExitCode::parse;
  } catch (const InsufficientSampling& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::insufficient_sampling;
  } catch (const ConvergenceFailure& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::convergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::usage;
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) throw InvalidArgument("output directory not set");
  fs::create_directories(dir);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

void write_dgc_config(std::ostream& m, const DgcConfig& c) {
  m << "classes = " << c.n_classes << '\n'
    << "realizations = " << c.n_realizations << '\n'
    << "tol = " << format_number(c.tol) << '\n'
    << "mmax = " << c.m_max << '\n'
    << "imax = " << c.i_max << '\n'
    << "weights = " << format_number(c.weights.gradient) << ',' << format_number(c.weights.curvature) << '\n'
    << "max_retries = " << c.max_retries << '\n'
    << "seed = " << c.master_seed << '\n'
    << "directions = 0,45,90,135\n";
}

void write_matern(std::ostream& m, const MaternSpec& s) {
  m << "matern.mean = " << format_number(s.mean) << '\n'
    << "matern.sigma = " << format_number(s.sigma) << '\n'
    << "matern.xi1 = " << format_number(s.xi1) << '\n'
    << "matern.xi2 = " << format_number(s.xi2) << '\n'
    << "matern.nu = " << format_number(s.nu) << '\n';
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::random_thin: return "random-thin";
    case Scenario::block: return "block";
    case Scenario::file: return "file";
  }
  return "?";
}

Raster zero_raster(const GridArray<double>& values) { return Raster::fully_sampled(values); }

// Full-grid array of predictions at `cells`, so methods can be compared on any cell subset.
template <typename Vec>
GridArray<typename Vec::Scalar> scatter(Index rows, Index cols, const std::vector<Cell>& cells, const Vec& v) {
  GridArray<typename Vec::Scalar> g = GridArray<typename Vec::Scalar>::Zero(rows, cols);
  for (std::size_t i = 0; i < cells.size(); ++i) g(cells[i].row, cells[i].col) = v(static_cast<Index>(i));
  return g;
}

template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, 1> gather(const GridArray<T>& g, const std::vector<Cell>& cells) {
  Eigen::Matrix<T, Eigen::Dynamic, 1> v(static_cast<Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) v(static_cast<Index>(i)) = g(cells[i].row, cells[i].col);
  return v;
}

}  // namespace

// ---------------------------------------------------------------- fill

void cmd_fill(const FillOptions& opts, std::ostream& log) {
  const auto t0 = Clock::now();
  const RasterFile in = read_raster(opts.input);
  ensure_dir(opts.out_dir);

  auto manifest = open_out(opts.out_dir / "manifest.txt");
  manifest << "command = fill\n"
           << "input = " << opts.input.string() << '\n'
           << "rows = " << in.grid.rows() << '\n'
           << "cols = " << in.grid.cols() << '\n'
           << "missing = " << in.grid.n_missing() << '\n';
  write_dgc_config(manifest, opts.dgc);

  if (in.grid.n_missing() == 0) {
    log << "warning: raster has no missing cells; output equals input\n";
    write_raster(opts.out_dir / "filled.asc", in.grid, in.meta);
    write_raster(opts.out_dir / "ci_width.asc", zero_raster(GridArray<double>::Zero(in.grid.rows(), in.grid.cols())),
                 in.meta);
    manifest << "realizations_kept = 0\n";
  } else {
    const DgcResult res = run_dgc(in.grid, opts.dgc);
    write_raster(opts.out_dir / "filled.asc", reconstruct(in.grid, res), in.meta);
    write_raster(opts.out_dir / "ci_width.asc", zero_raster(ci_width(in.grid, res)), in.meta);
    manifest << "effective_classes = " << res.thresholds.n_classes << '\n'
             << "threshold_lo = " << format_number(res.thresholds.lo) << '\n'
             << "threshold_hi = " << format_number(res.thresholds.hi) << '\n'
             << "realizations_kept = " << res.summary.realizations_kept << '\n';
    for (int n = 0; n < res.sample_energies.d(); ++n)
      manifest << "sample_pairs." << n << " = " << res.sample_energies.n_pairs(n) << '\n'
               << "sample_triplets." << n << " = " << res.sample_energies.n_triplets(n) << '\n';
    double wall = 0.0;
    for (std::size_t j = 0; j < res.runs.size(); ++j) {
      const auto& r = res.runs[j];
      manifest << "run." << j << " = residual " << format_number(r.residual_u) << ", mcs " << r.mc_steps
               << ", accepted " << r.accepted_updates << ", attempts " << r.attempts << '\n';
      wall += r.wall_time;
    }
    manifest << "timing.optimizer_seconds = " << wall << '\n';
    log << "filled " << in.grid.n_missing() << " cells with " << res.summary.realizations_kept << " realizations\n";
  }
  manifest << "timing.total_seconds = " << seconds_since(t0) << '\n' << "timestamp = " << timestamp() << '\n';
}

// ---------------------------------------------------------------- synth

void cmd_synth(const SynthOptions& opts, std::ostream& log) {
  ensure_dir(opts.out_dir);
  const Raster truth = generate_field(opts.rows, opts.cols, opts.matern, derive_seed(opts.seed, Stream::field, 0));
  Holdout h;
  if (opts.scenario == Scenario::block)
    h = block_remove(truth, {opts.block.y, opts.block.x}, opts.block.width, opts.block.height);
  else
    h = random_thin(truth, opts.thin_percent, derive_seed(opts.seed, Stream::thinning, 0));

  write_raster(opts.out_dir / "truth.asc", truth);
  write_raster(opts.out_dir / "sample.asc", h.sample);
  auto csv = open_out(opts.out_dir / "holdout.csv");
  csv << "row,col,value\n";
  for (std::size_t i = 0; i < h.removed.size(); ++i)
    csv << h.removed[i].row << ',' << h.removed[i].col << ',' << format_number(h.truth(static_cast<Index>(i))) << '\n';

  auto m = open_out(opts.out_dir / "manifest.txt");
  m << "command = synth\n"
    << "rows = " << opts.rows << '\n'
    << "cols = " << opts.cols << '\n'
    << "scenario = " << scenario_name(opts.scenario) << '\n'
    << "thin = " << format_number(opts.thin_percent) << '\n'
    << "block = " << opts.block.x << ',' << opts.block.y << ',' << opts.block.width << ',' << opts.block.height << '\n'
    << "seed = " << opts.seed << '\n'
    << "missing = " << h.sample.n_missing() << '\n';
  write_matern(m, opts.matern);
  m << "timestamp = " << timestamp() << '\n';
  log << "wrote " << opts.rows << "x" << opts.cols << " field with " << h.sample.n_missing() << " removed cells\n";
}

// ---------------------------------------------------------------- bench

BaselineToggles parse_baselines(const std::string& list) {
  BaselineToggles t{false, false, false};
  if (list == "none" || list.empty()) return t;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "knn") t.knn = true;
    else if (item == "nn") t.nn = true;
    else if (item == "idw") t.idw = true;
    else throw InvalidArgument("unknown baseline '" + item + "' (expected knn, nn, idw or none)");
  }
  return t;
}

const char* const kMetricsColumns = "sample,method,n_points,f_star,aae,are,aare,rase,r,k,mean_mcs,mean_residual";
const char* const kAggregateColumns =
    "method,s_samples,mean_f_star,std_f_star,maae,mare,maare,mrase,mr,mean_mcs";

namespace {

SampleOutcome run_sample(const BenchOptions& opts, const MaternFieldGenerator* gen, const Raster* file_truth, int s) {
  SampleOutcome out;
  out.sample = s;
  const auto t0 = Clock::now();
  const auto idx = static_cast<std::uint64_t>(s);
  const std::uint64_t seed = opts.dgc.master_seed;

  Raster truth;
  if (opts.scenario == Scenario::file) {
    truth = *file_truth;
  } else {
    Rng rng = make_rng(derive_seed(seed, Stream::field, idx));
    truth = (*gen)(rng);
  }
  const Holdout h = opts.scenario == Scenario::block
                        ? block_remove(truth, {opts.block.y, opts.block.x}, opts.block.width, opts.block.height)
                        : random_thin(truth, opts.thin_percent, derive_seed(seed, Stream::thinning, idx));
  const Raster& sample = h.sample;
  const Thresholds<double> th = fill_thresholds(sample, opts.dgc.n_classes);

  Eigen::VectorXi true_labels(h.truth.size());
  for (Index i = 0; i < h.truth.size(); ++i) true_labels(i) = classify(h.truth(i), th);

  const auto make_row = [&](const std::string& method, const Eigen::VectorXi& labels, const Eigen::VectorXd& values) {
    MethodRow row;
    row.sample = s;
    row.method = method;
    row.metrics = interpolation_metrics(h.truth, values);
    row.metrics.f_star = misclassification(true_labels, labels);
    return row;
  };
  const auto to_values = [&](const Eigen::VectorXi& labels) {
    Eigen::VectorXd v(labels.size());
    for (Index i = 0; i < labels.size(); ++i) v(i) = back_transform(labels(i), th);
    return v;
  };
  const auto to_labels = [&](const Eigen::VectorXd& values) {
    Eigen::VectorXi l(values.size());
    for (Index i = 0; i < values.size(); ++i) l(i) = classify(values(i), th);
    return l;
  };

  DgcConfig cfg = opts.dgc;
  cfg.master_seed = derive_seed(seed, Stream::dgc, idx);
  cfg.record_trace = opts.traces;
  const DgcResult res = run_dgc(sample, cfg);
  {
    const Eigen::VectorXi labels =
        gather(scatter(sample.rows(), sample.cols(), res.summary.cells, res.summary.median), h.removed);
    MethodRow row = make_row("dgc", labels, to_values(labels));
    double mcs = 0.0, resid = 0.0;
    for (const auto& r : res.runs) {
      mcs += static_cast<double>(r.mc_steps);
      resid += r.residual_u;
    }
    row.mean_mcs = mcs / static_cast<double>(res.runs.size());
    row.mean_residual = resid / static_cast<double>(res.runs.size());
    out.rows.push_back(std::move(row));
    out.dgc_runs = res.runs;
  }

  const std::vector<Cell> missing = sample.missing_cells();
  if (opts.baselines.knn) {
    Rng rng = make_rng(derive_seed(seed, Stream::folds, idx));
    const KnnResult knn = knn_classify(res.sample, opts.knn, rng);
    const Eigen::VectorXi labels = gather(scatter(sample.rows(), sample.cols(), missing, knn.labels), h.removed);
    MethodRow row = make_row("knn", labels, to_values(labels));
    row.k = knn.k;
    out.rows.push_back(std::move(row));
  }
  if (opts.baselines.nn) {
    const Eigen::VectorXd v = gather(scatter(sample.rows(), sample.cols(), missing, nn_interpolate(sample)), h.removed);
    out.rows.push_back(make_row("nn", to_labels(v), v));
  }
  if (opts.baselines.idw) {
    const Eigen::VectorXd v =
        gather(scatter(sample.rows(), sample.cols(), missing, idw_interpolate(sample, opts.idw_power)), h.removed);
    out.rows.push_back(make_row("idw", to_labels(v), v));
  }
  out.wall_time = seconds_since(t0);
  return out;
}

}  // namespace

std::vector<AggregateRow> aggregate_rows(const std::vector<SampleOutcome>& samples) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const MethodRow*>> by_method;
  for (const auto& s : samples) {
    for (const auto& r : s.rows) {
      if (!by_method.count(r.method)) order.push_back(r.method);
      by_method[r.method].push_back(&r);
    }
  }
  std::vector<AggregateRow> out;
  for (const auto& m : order) {
    const auto& rows = by_method[m];
    std::vector<MetricReport> reports;
    double mcs = 0.0;
    int n_mcs = 0;
    for (const auto* r : rows) {
      reports.push_back(r->metrics);
      if (r->mean_mcs) {
        mcs += *r->mean_mcs;
        ++n_mcs;
      }
    }
    AggregateRow a{m, aggregate(reports), std::nullopt};
    if (n_mcs > 0) a.mean_mcs = mcs / n_mcs;
    out.push_back(std::move(a));
  }
  return out;
}

BenchResult run_bench(const BenchOptions& opts) {
  if (opts.s_samples < 1) throw InvalidArgument("number of samples must be >= 1");
  if (opts.workers < 1) throw InvalidArgument("worker count must be >= 1");
  validate(opts.dgc);
  if (opts.baselines.knn) validate(opts.knn);
  const auto t0 = Clock::now();

  std::optional<MaternFieldGenerator> gen;
  std::optional<Raster> file_truth;
  if (opts.scenario == Scenario::file) {
    file_truth = read_raster(opts.input).grid;
  } else {
    gen.emplace(opts.rows, opts.cols, opts.matern);
  }

  BenchResult result;
  result.samples.resize(static_cast<std::size_t>(opts.s_samples));
  const auto one = [&](int i) {
    const int s = i + 1;
    try {
      result.samples[static_cast<std::size_t>(i)] =
          run_sample(opts, gen ? &*gen : nullptr, file_truth ? &*file_truth : nullptr, s);
    } catch (...) {
      std::ostringstream err;
      SampleOutcome failed;
      failed.sample = s;
      failed.error_code = report_exception(err);
      failed.error = err.str();
      if (!failed.error->empty() && failed.error->back() == '\n') failed.error->pop_back();
      result.samples[static_cast<std::size_t>(i)] = std::move(failed);
    }
  };

  const int workers = std::min(opts.workers, opts.s_samples);
  if (workers <= 1) {
    for (int i = 0; i < opts.s_samples; ++i) one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (int i = next++; i < opts.s_samples; i = next++) one(i);
      });
  }
  result.aggregates = aggregate_rows(result.samples);
  result.wall_time = seconds_since(t0);
  return result;
}

void write_metrics_csv(std::ostream& out, const BenchResult& result) {
  out << kMetricsColumns << '\n';
  for (const auto& s : result.samples) {
    for (const auto& r : s.rows) {
      const auto& m = r.metrics;
      out << r.sample << ',' << r.method << ',' << m.n_points << ',' << opt(m.f_star) << ',' << format_number(m.aae)
          << ',' << opt(m.are) << ',' << opt(m.aare) << ',' << format_number(m.rase) << ',' << opt(m.r) << ','
          << (r.k ? std::to_string(*r.k) : std::string()) << ',' << opt(r.mean_mcs) << ',' << opt(r.mean_residual)
          << '\n';
    }
  }
}

void write_aggregate_csv(std::ostream& out, const BenchResult& result) {
  out << kAggregateColumns << '\n';
  for (const auto& a : result.aggregates) {
    const auto& r = a.report;
    out << a.method << ',' << r.s_samples << ',' << opt(r.mean_f_star) << ',' << format_number(r.std_f_star) << ','
        << format_number(r.maae) << ',' << opt(r.mare) << ',' << opt(r.maare) << ',' << format_number(r.mrase) << ','
        << opt(r.mr) << ',' << opt(a.mean_mcs) << '\n';
  }
}

ExitCode cmd_bench(const BenchOptions& opts, const fs::path& out_dir, std::ostream& log) {
  ensure_dir(out_dir);
  const BenchResult result = run_bench(opts);

  {
    auto f = open_out(out_dir / "metrics.csv");
    write_metrics_csv(f, result);
  }
  {
    auto f = open_out(out_dir / "aggregate.csv");
    write_aggregate_csv(f, result);
  }
  {
    auto f = open_out(out_dir / "residuals.csv");
    f << "sample,realization,residual,mcs,accepted,attempts\n";
    for (const auto& s : result.samples)
      for (std::size_t j = 0; j < s.dgc_runs.size(); ++j) {
        const auto& r = s.dgc_runs[j];
        f << s.sample << ',' << j << ',' << format_number(r.residual_u) << ',' << r.mc_steps << ','
          << r.accepted_updates << ',' << r.attempts << '\n';
      }
  }
  if (opts.traces) {
    fs::create_directories(out_dir / "traces");
    for (const auto& s : result.samples) {
      if (s.dgc_runs.empty()) continue;
      std::ostringstream name;
      name << "sample_" << std::setw(4) << std::setfill('0') << s.sample << ".csv";
      auto f = open_out(out_dir / "traces" / name.str());
      f << "realization,step,u\n";
      for (std::size_t j = 0; j < s.dgc_runs.size(); ++j)
        for (const auto& p : s.dgc_runs[j].trace) f << j << ',' << p.step << ',' << format_number(p.u) << '\n';
    }
  }

  // per-sample paired misclassification differences, KNN minus DGC
  std::vector<double> diffs;
  if (opts.baselines.knn) {
    auto f = open_out(out_dir / "paired.csv");
    f << "sample,f_star_dgc,f_star_knn,diff\n";
    for (const auto& s : result.samples) {
      const MethodRow *dgc = nullptr, *knn = nullptr;
      for (const auto& r : s.rows) {
        if (r.method == "dgc") dgc = &r;
        if (r.method == "knn") knn = &r;
      }
      if (!dgc || !knn) continue;
      const double d = *knn->metrics.f_star - *dgc->metrics.f_star;
      diffs.push_back(d);
      f << s.sample << ',' << format_number(*dgc->metrics.f_star) << ',' << format_number(*knn->metrics.f_star) << ','
        << format_number(d) << '\n';
    }
  }

  ExitCode code = ExitCode::ok;
  int failed = 0;
  for (const auto& s : result.samples) {
    if (!s.error) continue;
    ++failed;
    log << "sample " << s.sample << " failed: " << *s.error << '\n';
    if (code == ExitCode::ok) code = s.error_code;
  }

  auto m = open_out(out_dir / "manifest.txt");
  m << "command = bench\n"
    << "scenario = " << scenario_name(opts.scenario) << '\n'
    << "samples = " << opts.s_samples << '\n'
    << "rows = " << opts.rows << '\n'
    << "cols = " << opts.cols << '\n'
    << "thin = " << format_number(opts.thin_percent) << '\n'
    << "block = " << opts.block.x << ',' << opts.block.y << ',' << opts.block.width << ',' << opts.block.height << '\n';
  if (opts.scenario == Scenario::file) m << "input = " << opts.input.string() << '\n';
  write_matern(m, opts.matern);
  write_dgc_config(m, opts.dgc);
  m << "baselines = " << (opts.baselines.knn ? "knn " : "") << (opts.baselines.nn ? "nn " : "")
    << (opts.baselines.idw ? "idw" : "") << '\n'
    << "idw_power = " << format_number(opts.idw_power) << '\n'
    << "metrics_columns = " << kMetricsColumns << '\n'
    << "aggregate_columns = " << kAggregateColumns << '\n'
    << "samples_failed = " << failed << '\n';
  if (!diffs.empty()) {
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    const double se = diffs.size() > 1 ? std::sqrt(ss / static_cast<double>(diffs.size() - 1) / diffs.size()) : 0.0;
    m << "paired.knn_minus_dgc.mean = " << format_number(mean) << '\n'
      << "paired.knn_minus_dgc.stderr = " << format_number(se) << '\n';
  }
  double dgc_time = 0.0;
  for (const auto& s : result.samples) dgc_time += s.wall_time;
  m << "timing.total_seconds = " << result.wall_time << '\n'
    << "timing.mean_sample_seconds = " << dgc_time / opts.s_samples << '\n'
    << "timestamp = " << timestamp() << '\n';

  for (const auto& a : result.aggregates)
    log << a.method << ": <F*> = " << (a.report.mean_f_star ? *a.report.mean_f_star * 100.0 : 0.0)
        << "%, MAAE = " << a.report.maae << ", MRASE = " << a.report.mrase << '\n';
  return code;
}

}  // namespace dgc
