#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dgc/experiment.hpp"

using namespace dgc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dgc_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Manifest without the lines that are allowed to differ between runs.
std::string stable_manifest(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("timing.", 0) != 0 && line.rfind("timestamp", 0) != 0 && line.rfind("out", 0) != 0) out += line + '\n';
  return out;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(DGC_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST(Synth, ThinAndBlockOutputs) {
  const fs::path dir = scratch("synth");
  SynthOptions o;
  o.out_dir = dir / "thin";
  o.seed = 3;
  std::ostringstream log;
  cmd_synth(o, log);
  const auto sample = read_raster(o.out_dir / "sample.asc").grid;
  const auto truth = read_raster(o.out_dir / "truth.asc").grid;
  EXPECT_EQ(sample.rows(), 50);
  EXPECT_EQ(sample.n_missing(), 825);
  EXPECT_EQ(truth.n_missing(), 0);
  std::istringstream csv(slurp(o.out_dir / "holdout.csv"));
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  EXPECT_EQ(line, "row,col,value");
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 825);

  o.out_dir = dir / "block";
  o.scenario = Scenario::block;
  cmd_synth(o, log);
  const auto blk = read_raster(o.out_dir / "sample.asc").grid;
  EXPECT_EQ(blk.n_missing(), 128);
  for (Index r = 21; r < 29; ++r)
    for (Index c = 17; c < 33; ++c) EXPECT_FALSE(blk.is_sampled(r, c));
  fs::remove_all(dir);
}

TEST(Fill, NoMissingCellsEchoesInput) {
  const fs::path dir = scratch("fill_full");
  write_text(dir / "in.asc", "ncols 3\nnrows 2\nxllcorner 1\nyllcorner 2\ncellsize 1\nNODATA_value -9999\n1 2 3\n4 5 6.5\n");
  FillOptions o{dir / "in.asc", dir / "out", {}};
  std::ostringstream log;
  cmd_fill(o, log);
  EXPECT_NE(log.str().find("warning"), std::string::npos);
  const auto in = read_raster(dir / "in.asc"), out = read_raster(dir / "out" / "filled.asc");
  EXPECT_TRUE((in.grid.values() == out.grid.values()).all());
  EXPECT_EQ(out.meta.xll, 1.0);
  EXPECT_TRUE((read_raster(dir / "out" / "ci_width.asc").grid.values() == 0.0).all());
  fs::remove_all(dir);
}

TEST(Fill, FixedSeedGivesIdenticalFiles) {
  const fs::path dir = scratch("fill_seed");
  SynthOptions s;
  s.rows = s.cols = 24;
  s.out_dir = dir / "synth";
  std::ostringstream log;
  cmd_synth(s, log);
  FillOptions o{s.out_dir / "sample.asc", dir / "a", {}};
  o.dgc.n_realizations = 5;
  o.dgc.master_seed = 8;
  cmd_fill(o, log);
  o.out_dir = dir / "b";
  o.dgc.n_threads = 3;
  cmd_fill(o, log);
  for (const char* f : {"filled.asc", "ci_width.asc"}) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  EXPECT_EQ(stable_manifest(dir / "a" / "manifest.txt"), stable_manifest(dir / "b" / "manifest.txt"));
  const auto filled = read_raster(dir / "a" / "filled.asc").grid;
  const auto sample = read_raster(s.out_dir / "sample.asc").grid;
  EXPECT_EQ(filled.n_missing(), 0);
  for (Index r = 0; r < 24; ++r)
    for (Index c = 0; c < 24; ++c)
      if (sample.is_sampled(r, c)) EXPECT_EQ(filled.value(r, c), sample.value(r, c));
  fs::remove_all(dir);
}

TEST(Bench, SingleSampleTable) {
  BenchOptions o;
  o.s_samples = 1;
  o.rows = o.cols = 16;
  o.dgc.n_realizations = 1;
  o.dgc.master_seed = 5;
  o.knn.k_candidates = {1, 3};
  const auto res = run_bench(o);
  ASSERT_EQ(res.samples.size(), 1u);
  ASSERT_FALSE(res.samples[0].error.has_value());
  std::ostringstream csv;
  write_metrics_csv(csv, res);
  std::istringstream in(csv.str());
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, kMetricsColumns);
  int n = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("1,", 0), 0u);
    ++n;
  }
  EXPECT_EQ(n, 4);  // dgc, knn, nn, idw
  EXPECT_EQ(res.samples[0].rows[0].method, "dgc");
  EXPECT_TRUE(res.samples[0].rows[0].metrics.f_star.has_value());
  EXPECT_EQ(res.samples[0].rows[2].method, "nn");
  EXPECT_TRUE(res.samples[0].rows[2].metrics.f_star.has_value());  // continuous methods are classified too
  EXPECT_TRUE(res.samples[0].rows[1].k.has_value());
}

TEST(Bench, AggregatesMatchValidationAggregate) {
  BenchOptions o;
  o.s_samples = 4;
  o.rows = o.cols = 20;
  o.dgc.master_seed = 2;
  o.dgc.n_realizations = 1;
  o.baselines = parse_baselines("knn");
  o.workers = 2;
  const auto res = run_bench(o);
  for (const auto& agg : res.aggregates) {
    std::vector<MetricReport> reports;
    for (const auto& s : res.samples)
      for (const auto& r : s.rows)
        if (r.method == agg.method) reports.push_back(r.metrics);
    const auto want = aggregate(reports);
    EXPECT_EQ(agg.report.s_samples, 4);
    EXPECT_EQ(agg.report.mean_f_star, want.mean_f_star);
    EXPECT_EQ(agg.report.std_f_star, want.std_f_star);
    EXPECT_EQ(agg.report.maae, want.maae);
    EXPECT_EQ(agg.report.mrase, want.mrase);
    EXPECT_EQ(agg.report.mr, want.mr);
  }
  const fs::path dir = scratch("bench");
  std::ostringstream log;
  EXPECT_EQ(cmd_bench(o, dir, log), ExitCode::ok);
  for (const char* f : {"metrics.csv", "aggregate.csv", "residuals.csv", "paired.csv", "manifest.txt"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_TRUE(fs::exists(dir / "traces" / "sample_0001.csv"));
  fs::remove_all(dir);
}

TEST(Bench, ParseBaselines) {
  const auto t = parse_baselines("nn,idw");
  EXPECT_FALSE(t.knn);
  EXPECT_TRUE(t.nn && t.idw);
  const auto none = parse_baselines("none");
  EXPECT_FALSE(none.knn || none.nn || none.idw);
  EXPECT_THROW(parse_baselines("kriging"), InvalidArgument);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  write_text(dir / "bad.asc", "ncols 2\nnrows 2\n1 2\n3\n");
  EXPECT_EQ(run_cli("fill " + (dir / "bad.asc").string() + " --out " + (dir / "o1").string()), 2);

  // only one sampled row: no vertical pairs
  write_text(dir / "sparse.asc", "ncols 3\nnrows 3\n1 2 3\nNODATA NODATA NODATA\nNODATA NODATA NODATA\n");
  EXPECT_EQ(run_cli("fill " + (dir / "sparse.asc").string() + " --out " + (dir / "o2").string()), 3);

  write_text(dir / "ok.asc", "ncols 4\nnrows 4\n1 2 3 4\n2 3 NODATA 5\n3 4 5 6\n4 5 6 7\n");
  EXPECT_EQ(run_cli("fill " + (dir / "ok.asc").string() + " --out " + (dir / "o3").string() + " --tol 0 --max-retries 1"), 4);
  EXPECT_EQ(run_cli("fill " + (dir / "ok.asc").string() + " --out " + (dir / "o4").string() + " --realizations 3"), 0);
  EXPECT_TRUE(fs::exists(dir / "o4" / "filled.asc"));
  EXPECT_EQ(run_cli("fill " + (dir / "ok.asc").string() + " --out " + (dir / "o5").string() + " --weights 0.9,0.9"), 1);
  EXPECT_NE(run_cli("frobnicate"), 0);
  EXPECT_EQ(run_cli("synth --out " + (dir / "s").string() + " --rows 12 --cols 12 --thin 50"), 0);
  EXPECT_EQ(read_raster(dir / "s" / "sample.asc").grid.n_missing(), 72);
  fs::remove_all(dir);
}
