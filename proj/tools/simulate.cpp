// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo driver: runs the benchmark sweeps and writes CSV results plus
// a run manifest. See README.md for the scenario file format.

#include "irsjam/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    grid.push_back(std::stod(item));
  }
  return grid;
}

std::vector<double> default_grid(irsjam::SweepKind kind) {
  switch (kind) {
    case irsjam::SweepKind::kPower: return {-10, -5, 0, 5, 10};
    case irsjam::SweepKind::kNIrs: return {32, 64, 128};
    case irsjam::SweepKind::kBits: return {1, 2, 3, 4};
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MU-MISO anti-jamming precoding simulator"};

  std::string config_path;
  std::string sweep_name;
  std::string out_dir;
  std::string profile = "desk";
  std::string benchmarks_csv;
  std::string grid_csv;
  std::string dump_channels_path;
  int trials = -1;
  long long seed = -1;
  int workers = 1;
  bool emit_diagnostics = false;

  app.add_option("--config", config_path, "Scenario file (dotted key = value lines)")
      ->check(CLI::ExistingFile);
  app.add_option("--sweep", sweep_name, "Sweep kind: power | n-irs | bits");
  app.add_option("--out", out_dir, "Output directory for CSV results");
  app.add_option("--trials", trials, "Monte Carlo trials per grid point")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Master RNG seed")->check(CLI::NonNegativeNumber);
  app.add_option("--profile", profile, "Base profile: desk | paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--benchmarks", benchmarks_csv,
                 "Comma list of benchmarks (default: all): no-jamming,proposed,ajp,"
                 "fpj-no-defense,active-jammer");
  app.add_option("--grid", grid_csv, "Comma list of sweep grid values");
  app.add_option("--workers", workers, "Worker threads (output is identical for any count)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--emit-diagnostics", emit_diagnostics,
               "Also write DIRS CLT diagnostics and an RCG convergence trace");
  app.add_option("--dump-channels", dump_channels_path,
                 "Write one binary channel realization to this path and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    irsjam::ScenarioConfig config = profile == "paper"
                                        ? irsjam::ScenarioConfig::paper_defaults()
                                        : irsjam::ScenarioConfig::desk_defaults();
    if (!config_path.empty()) config = irsjam::load_scenario_file(config_path, config);
    if (trials > 0) config.trials = trials;
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    config.validate();

    if (!dump_channels_path.empty()) {
      const irsjam::RngStream master(config.seed);
      const irsjam::TrialContext context = irsjam::draw_trial_context(config, master, 0);
      irsjam::write_channel_set(context.channels, dump_channels_path);
      std::cout << "wrote channel dump to " << dump_channels_path << "\n";
      if (sweep_name.empty()) return 0;
    }

    if (sweep_name.empty() || out_dir.empty()) {
      std::cerr << "error: --sweep and --out are required (see --help)\n";
      return 1;
    }
    const auto kind = irsjam::parse_sweep_kind(sweep_name);
    if (!kind) {
      std::cerr << "error: unknown sweep '" << sweep_name << "' (power | n-irs | bits)\n";
      return 1;
    }

    std::vector<irsjam::BenchmarkId> benchmarks;
    if (benchmarks_csv.empty()) {
      benchmarks = irsjam::all_benchmarks();
    } else {
      std::stringstream ss(benchmarks_csv);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto id = irsjam::parse_benchmark(item);
        if (!id) {
          std::cerr << "error: unknown benchmark '" << item << "'\n";
          return 1;
        }
        benchmarks.push_back(*id);
      }
    }

    const std::vector<double> grid =
        grid_csv.empty() ? default_grid(*kind) : parse_grid(grid_csv);

    const irsjam::RateReport report =
        irsjam::run_sweep(*kind, grid, config, benchmarks, workers);
    irsjam::emit_report(report, config, out_dir);
    std::cout << "wrote " << out_dir << "/sweep_" << report.sweep_var << ".csv ("
              << report.points.size() << " rows)\n";

    if (emit_diagnostics) {
      const irsjam::RngStream master(config.seed);
      irsjam::RngStream diag_rng = master.fork(0xd1a6ull);
      irsjam::RngStream geo_rng = diag_rng.fork(0);
      const irsjam::GeometryLayout geometry = irsjam::build_geometry(config, geo_rng);
      irsjam::RngStream clt_rng = diag_rng.fork(1);
      const irsjam::CltReport clt =
          irsjam::clt_diagnostics(config, geometry, 10000, clt_rng);
      irsjam::write_clt_csv(clt, out_dir + "/clt_diagnostics.csv");

      const irsjam::TrialContext context = irsjam::draw_trial_context(config, master, 0);
      irsjam::RngStream rcg_rng = diag_rng.fork(2);
      const auto settings = irsjam::RcgSettings::from_config(config);
      const auto [relaxed, trace] = irsjam::rcg_optimize(
          context.channels, settings, irsjam::ReflectionVector::zeros(config.n_irs), &rcg_rng);
      irsjam::write_rcg_trace_csv(trace, out_dir + "/rcg_trace.csv");
      std::cout << "wrote diagnostics CSVs\n";
    }
    return 0;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
}
