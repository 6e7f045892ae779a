// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "irsjam/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace irsjam;

namespace {

ScenarioConfig tiny_config() {
  ScenarioConfig config = ScenarioConfig::desk_defaults();
  config.n_antennas = 4;
  config.n_irs = 8;
  config.n_dirs = 32;
  config.n_users = 2;
  config.trials = 8;
  config.sjnr_draws = 60;
  config.rcg_max_iters = 60;
  config.seed = 1234;
  return config;
}

double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / values.size();
}

}  // namespace

TEST_CASE("benchmark names round-trip") {
  for (BenchmarkId id : all_benchmarks()) {
    const auto parsed = parse_benchmark(benchmark_name(id));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == id);
  }
  CHECK_FALSE(parse_benchmark("nope").has_value());
  CHECK(parse_sweep_kind("power") == SweepKind::kPower);
  CHECK(parse_sweep_kind("n-irs") == SweepKind::kNIrs);
  CHECK(parse_sweep_kind("bits") == SweepKind::kBits);
  CHECK_FALSE(parse_sweep_kind("frequency").has_value());
}

TEST_CASE("trial context is shared across benchmarks and worker counts") {
  const ScenarioConfig config = tiny_config();
  const RngStream master(config.seed);
  const TrialContext a = draw_trial_context(config, master, 3);
  const TrialContext b = draw_trial_context(config, master, 3);
  CHECK((a.channels.h_au - b.channels.h_au).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.channels.h_ad - b.channels.h_ad).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.geometry.user_positions - b.geometry.user_positions).cwiseAbs().maxCoeff() == 0.0);

  const TrialContext c = draw_trial_context(config, master, 4);
  CHECK((a.channels.h_au - c.channels.h_au).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("worker count does not change results") {
  const ScenarioConfig config = tiny_config();
  const RngStream master(config.seed);
  const auto serial = run_benchmark(BenchmarkId::kProposed, config, master, 1);
  const auto threaded = run_benchmark(BenchmarkId::kProposed, config, master, 3);
  REQUIRE(serial.size() == threaded.size());
  for (size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == threaded[i]);
}

TEST_CASE("frozen users reuse one layout across trials") {
  ScenarioConfig config = tiny_config();
  config.freeze_users = true;
  const RngStream master(config.seed);
  const TrialContext a = draw_trial_context(config, master, 0);
  const TrialContext b = draw_trial_context(config, master, 5);
  CHECK((a.geometry.user_positions - b.geometry.user_positions).cwiseAbs().maxCoeff() == 0.0);
  // channels still vary per trial
  CHECK((a.channels.h_au - b.channels.h_au).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("null active jammer equals the matching no-jamming policy") {
  ScenarioConfig config = tiny_config();
  config.jammer_power_dbm = -1e9;  // effectively zero watts

  BenchmarkPolicy jammer = policy_for(BenchmarkId::kActiveJammer, config);
  BenchmarkPolicy clean;  // no IRS, no DIRS, no jammer, beta = 0
  clean.irs = jammer.irs;

  const RngStream master(config.seed);
  for (int trial = 0; trial < 4; ++trial) {
    const double a = run_policy_trial(jammer, config, master, trial);
    const double b = run_policy_trial(clean, config, master, trial);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("benchmark policies encode the intended knobs") {
  const ScenarioConfig config = tiny_config();
  const BenchmarkPolicy proposed = policy_for(BenchmarkId::kProposed, config);
  CHECK(proposed.irs == BenchmarkPolicy::IrsMode::kOptimized);
  CHECK(proposed.beta_loaded);
  CHECK(proposed.dirs_active);
  CHECK_FALSE(proposed.jammer_active);

  const BenchmarkPolicy fpj = policy_for(BenchmarkId::kFpjNoDefense, config);
  CHECK(fpj.irs == BenchmarkPolicy::IrsMode::kNone);
  CHECK_FALSE(fpj.beta_loaded);
  CHECK(fpj.dirs_active);

  ScenarioConfig with_random = config;
  with_random.random_irs_for_baselines = true;
  CHECK(policy_for(BenchmarkId::kAjp, with_random).irs == BenchmarkPolicy::IrsMode::kRandom);
  CHECK(policy_for(BenchmarkId::kNoJamming, with_random).irs ==
        BenchmarkPolicy::IrsMode::kOptimized);
}

TEST_CASE("rate increases with transmit power and vanishes with it") {
  ScenarioConfig config = tiny_config();
  config.trials = 12;
  std::vector<double> means;
  for (double p : {-10.0, 0.0, 10.0}) {
    ScenarioConfig point = apply_sweep_value(SweepKind::kPower, p, config);
    const RngStream master(point.seed);
    means.push_back(mean(run_benchmark(BenchmarkId::kNoJamming, point, master, 2)));
  }
  CHECK(means[1] > means[0]);
  CHECK(means[2] > means[1]);

  ScenarioConfig dark = apply_sweep_value(SweepKind::kPower, -100.0, config);
  dark.trials = 4;
  const RngStream master(dark.seed);
  CHECK(mean(run_benchmark(BenchmarkId::kNoJamming, dark, master, 1)) < 1e-3);
}

TEST_CASE("jammed rate flattens at high power while clean rate keeps growing") {
  ScenarioConfig config = tiny_config();
  config.trials = 30;
  auto sweep_mean = [&](BenchmarkId id, double p) {
    ScenarioConfig point = apply_sweep_value(SweepKind::kPower, p, config);
    const RngStream master(point.seed);
    return mean(run_benchmark(id, point, master, 2));
  };
  // slope of the undefended benchmark shrinks between the low and high ends
  const double low_slope =
      sweep_mean(BenchmarkId::kFpjNoDefense, 0.0) - sweep_mean(BenchmarkId::kFpjNoDefense, -10.0);
  const double high_slope =
      sweep_mean(BenchmarkId::kFpjNoDefense, 20.0) - sweep_mean(BenchmarkId::kFpjNoDefense, 10.0);
  CHECK(high_slope < low_slope);
}

TEST_CASE("standard error shrinks with the trial count") {
  ScenarioConfig config = tiny_config();
  auto stderr_at = [&](int trials) {
    ScenarioConfig c = config;
    c.trials = trials;
    const RateReport report =
        run_sweep(SweepKind::kPower, {0.0}, c, {BenchmarkId::kFpjNoDefense}, 2);
    return report.points.at(0).std_error;
  };
  const double ratio = stderr_at(100) / stderr_at(400);
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.7);
}

TEST_CASE("sweep validation") {
  const ScenarioConfig config = tiny_config();
  CHECK_THROWS_AS(run_sweep(SweepKind::kPower, {}, config, all_benchmarks(), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(SweepKind::kPower, {0.0}, config, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(apply_sweep_value(SweepKind::kNIrs, 12.7, config), std::invalid_argument);
  CHECK_THROWS_AS(apply_sweep_value(SweepKind::kBits, 0.0, config), std::invalid_argument);

  const ScenarioConfig power = apply_sweep_value(SweepKind::kPower, -10.0, config);
  CHECK(power.power_budget_dbm ==
        doctest::Approx(-10.0 + 10.0 * std::log10(config.n_users)));
  CHECK(apply_sweep_value(SweepKind::kNIrs, 64, config).n_irs == 64);
  CHECK(apply_sweep_value(SweepKind::kBits, 3, config).irs_alphabet_bits == 3);
}

TEST_CASE("csv emission is deterministic and round-trips") {
  ScenarioConfig config = tiny_config();
  config.trials = 4;
  const std::vector<BenchmarkId> benchmarks{BenchmarkId::kNoJamming, BenchmarkId::kFpjNoDefense};
  const RateReport a = run_sweep(SweepKind::kPower, {0.0, 10.0}, config, benchmarks, 1);
  const RateReport b = run_sweep(SweepKind::kPower, {0.0, 10.0}, config, benchmarks, 2);
  CHECK(format_rate_csv(a) == format_rate_csv(b));

  // parse back the csv body and compare numbers
  std::istringstream lines(format_rate_csv(a));
  std::string line;
  std::getline(lines, line);  // header
  size_t row = 0;
  while (std::getline(lines, line)) {
    std::stringstream fields(line);
    std::string field;
    std::vector<std::string> cols;
    while (std::getline(fields, field, ',')) cols.push_back(field);
    REQUIRE(cols.size() == 7);
    CHECK(std::stod(cols[1]) == a.points[row].sweep_value);
    CHECK(cols[2] == benchmark_name(a.points[row].benchmark));
    CHECK(std::stod(cols[3]) == doctest::Approx(a.points[row].mean_rate).epsilon(1e-10));
    CHECK(std::stoi(cols[5]) == a.points[row].trials);
    ++row;
  }
  CHECK(row == a.points.size());
}

TEST_CASE("emit_report writes csv and manifest, rejects empty reports") {
  ScenarioConfig config = tiny_config();
  config.trials = 2;
  const auto dir = std::filesystem::temp_directory_path() / "irsjam_emit_test";
  std::filesystem::remove_all(dir);

  RateReport empty;
  empty.sweep_var = "power_dbm_per_lu";
  CHECK_THROWS_AS(emit_report(empty, config, dir.string()), std::invalid_argument);
  CHECK_FALSE(std::filesystem::exists(dir));

  const RateReport report =
      run_sweep(SweepKind::kPower, {0.0}, config, {BenchmarkId::kFpjNoDefense}, 1);
  emit_report(report, config, dir.string());
  CHECK(std::filesystem::exists(dir / "sweep_power_dbm_per_lu.csv"));
  CHECK(std::filesystem::exists(dir / "run_manifest.txt"));

  // the manifest embeds the full resolved scenario, reloadable as a config
  std::ifstream manifest(dir / "run_manifest.txt");
  std::stringstream buffer;
  buffer << manifest.rdbuf();
  const ScenarioConfig parsed =
      parse_scenario_text(buffer.str(), ScenarioConfig::paper_defaults());
  CHECK(parsed.n_antennas == config.n_antennas);
  CHECK(parsed.seed == config.seed);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config hash is stable and sensitive") {
  const ScenarioConfig config = tiny_config();
  ScenarioConfig other = config;
  CHECK(config_hash_hex(config) == config_hash_hex(other));
  other.seed = config.seed + 1;
  CHECK(config_hash_hex(config) != config_hash_hex(other));
}
