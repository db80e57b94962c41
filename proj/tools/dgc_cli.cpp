// dgc: gap filling of gridded data with the directional gradient-curvature method.
//
//   dgc fill  INPUT.asc --out DIR [dgc flags]
//   dgc synth --out DIR [--thin P | --block x,y,w,h] [field flags]
//   dgc bench --out DIR [--samples S] [--thin P | --block x,y,w,h | --input TRUTH.asc] [dgc flags]

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "dgc/experiment.hpp"

namespace {

using namespace dgc;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

Weights parse_weights(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw InvalidArgument("--weights expects w1,w2");
  Weights w{std::stod(parts[0]), std::stod(parts[1])};
  validate(w);
  return w;
}

BlockSpec parse_block(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 4) throw InvalidArgument("--block expects x,y,w,h");
  return {std::stol(parts[0]), std::stol(parts[1]), std::stol(parts[2]), std::stol(parts[3])};
}

struct DgcFlags {
  std::string weights = "0.5,0.5";

  void add(CLI::App& app, DgcConfig& cfg) {
    app.add_option("--classes", cfg.n_classes, "number of classes N_c")->capture_default_str();
    app.add_option("--realizations", cfg.n_realizations, "number of accepted realizations M")->capture_default_str();
    app.add_option("--tol", cfg.tol, "residual objective tolerance")->capture_default_str();
    app.add_option("--mmax", cfg.m_max, "maximum MRASS stencil edge (odd)")->capture_default_str();
    app.add_option("--imax", cfg.i_max, "Monte Carlo step cap")->capture_default_str();
    app.add_option("--weights", weights, "gradient,curvature weights")->capture_default_str();
    app.add_option("--max-retries", cfg.max_retries, "initializations per realization")->capture_default_str();
    app.add_option("--seed", cfg.master_seed, "master seed")->capture_default_str();
    app.add_option("--threads", cfg.n_threads, "threads for realizations")->capture_default_str();
  }

  void finish(DgcConfig& cfg) const { cfg.weights = parse_weights(weights); }
};

void add_matern(CLI::App& app, MaternSpec& m, Index& rows, Index& cols) {
  app.add_option("--rows", rows, "grid rows")->capture_default_str();
  app.add_option("--cols", cols, "grid columns")->capture_default_str();
  app.add_option("--mean", m.mean, "field mean")->capture_default_str();
  app.add_option("--sigma", m.sigma, "field standard deviation")->capture_default_str();
  app.add_option("--xi1", m.xi1, "correlation length along x")->capture_default_str();
  app.add_option("--xi2", m.xi2, "correlation length along y")->capture_default_str();
  app.add_option("--nu", m.nu, "Matern smoothness (0.5, 1.5, 2.5, 3.5)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directional gradient-curvature gap filling for gridded data"};
  app.require_subcommand(1);

  // fill
  FillOptions fill;
  DgcFlags fill_flags;
  auto* fill_cmd = app.add_subcommand("fill", "fill missing cells of a raster");
  fill_cmd->add_option("input", fill.input, "ESRI ASCII raster with NODATA cells")->required()->check(CLI::ExistingFile);
  fill_cmd->add_option("--out", fill.out_dir, "output directory")->required();
  fill_flags.add(*fill_cmd, fill.dgc);

  // synth
  SynthOptions synth;
  std::string synth_block;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic anisotropic Matern field and a sample of it");
  add_matern(*synth_cmd, synth.matern, synth.rows, synth.cols);
  auto* synth_thin = synth_cmd->add_option("--thin", synth.thin_percent, "percent of cells removed at random")
                         ->capture_default_str();
  synth_cmd->add_option("--block", synth_block, "remove the rectangle x,y,w,h")->excludes(synth_thin);
  synth_cmd->add_option("--seed", synth.seed, "seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();

  // bench
  BenchOptions bench;
  bench.dgc.n_realizations = 1;
  DgcFlags bench_flags;
  std::string bench_block, baselines = "knn,nn,idw";
  std::filesystem::path bench_out;
  bool no_traces = false;
  auto* bench_cmd = app.add_subcommand("bench", "validation experiment over S sample configurations");
  add_matern(*bench_cmd, bench.matern, bench.rows, bench.cols);
  bench_flags.add(*bench_cmd, bench.dgc);
  auto* bench_thin = bench_cmd->add_option("--thin", bench.thin_percent, "percent of cells removed at random")
                         ->capture_default_str();
  auto* bench_blk = bench_cmd->add_option("--block", bench_block, "remove the rectangle x,y,w,h")->excludes(bench_thin);
  bench_cmd->add_option("--input", bench.input, "fully sampled truth raster instead of synthetic fields")
      ->check(CLI::ExistingFile)
      ->excludes(bench_blk);
  bench_cmd->add_option("--samples", bench.s_samples, "number of sample configurations S")->capture_default_str();
  bench_cmd->add_option("--baselines", baselines, "comma list of knn, nn, idw, or none")->capture_default_str();
  bench_cmd->add_option("--workers", bench.workers, "concurrent samples")->capture_default_str();
  bench_cmd->add_option("--idw-power", bench.idw_power, "inverse distance power")->capture_default_str();
  bench_cmd->add_flag("--no-traces", no_traces, "skip objective trace files");
  bench_cmd->add_option("--out", bench_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fill_cmd) {
      fill_flags.finish(fill.dgc);
      cmd_fill(fill, std::cerr);
      return 0;
    }
    if (*synth_cmd) {
      if (!synth_block.empty()) {
        synth.scenario = Scenario::block;
        synth.block = parse_block(synth_block);
      }
      cmd_synth(synth, std::cerr);
      return 0;
    }
    bench_flags.finish(bench.dgc);
    if (!bench_block.empty()) {
      bench.scenario = Scenario::block;
      bench.block = parse_block(bench_block);
    } else if (!bench.input.empty()) {
      bench.scenario = Scenario::file;
    }
    bench.baselines = parse_baselines(baselines);
    bench.traces = !no_traces;
    return static_cast<int>(cmd_bench(bench, bench_out, std::cerr));
  } catch (...) {
    return static_cast<int>(report_exception(std::cerr));
  }
}
