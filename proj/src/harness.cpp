// SPDX-License-Identifier: Apache-2.0
#include "irsjam/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace irsjam {

namespace {

// fork ids inside one trial stream
constexpr std::uint64_t kStreamGeometry = 0;
constexpr std::uint64_t kStreamChannels = 1;
constexpr std::uint64_t kStreamDirsEval = 2;
constexpr std::uint64_t kStreamJammer = 3;
constexpr std::uint64_t kStreamRcg = 4;
constexpr std::uint64_t kStreamRandomIrs = 5;
// master-level id for frozen user positions; outside the trial index range
constexpr std::uint64_t kStreamFrozenUsers = 0xf12e7a115e125ull;

}  // namespace

const char* benchmark_name(BenchmarkId id) {
  switch (id) {
    case BenchmarkId::kNoJamming: return "no-jamming";
    case BenchmarkId::kProposed: return "proposed";
    case BenchmarkId::kAjp: return "ajp";
    case BenchmarkId::kFpjNoDefense: return "fpj-no-defense";
    case BenchmarkId::kActiveJammer: return "active-jammer";
  }
  return "unknown";
}

std::optional<BenchmarkId> parse_benchmark(std::string_view name) {
  for (BenchmarkId id : all_benchmarks()) {
    if (name == benchmark_name(id)) return id;
  }
  return std::nullopt;
}

std::vector<BenchmarkId> all_benchmarks() {
  return {BenchmarkId::kNoJamming, BenchmarkId::kProposed, BenchmarkId::kAjp,
          BenchmarkId::kFpjNoDefense, BenchmarkId::kActiveJammer};
}

const char* sweep_var_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::kPower: return "power_dbm_per_lu";
    case SweepKind::kNIrs: return "n_irs";
    case SweepKind::kBits: return "irs_bits";
  }
  return "unknown";
}

std::optional<SweepKind> parse_sweep_kind(std::string_view name) {
  if (name == "power") return SweepKind::kPower;
  if (name == "n-irs") return SweepKind::kNIrs;
  if (name == "bits") return SweepKind::kBits;
  return std::nullopt;
}

BenchmarkPolicy policy_for(BenchmarkId id, const ScenarioConfig& config) {
  BenchmarkPolicy policy;
  const auto baseline_irs = config.random_irs_for_baselines ? BenchmarkPolicy::IrsMode::kRandom
                                                            : BenchmarkPolicy::IrsMode::kNone;
  switch (id) {
    case BenchmarkId::kNoJamming:
      policy.irs = BenchmarkPolicy::IrsMode::kOptimized;
      break;
    case BenchmarkId::kProposed:
      policy.irs = BenchmarkPolicy::IrsMode::kOptimized;
      policy.beta_loaded = true;
      policy.dirs_active = true;
      break;
    case BenchmarkId::kAjp:
      policy.irs = baseline_irs;
      policy.beta_loaded = true;
      policy.dirs_active = true;
      break;
    case BenchmarkId::kFpjNoDefense:
      policy.irs = baseline_irs;
      policy.dirs_active = true;
      break;
    case BenchmarkId::kActiveJammer:
      policy.irs = baseline_irs;
      policy.jammer_active = true;
      break;
  }
  return policy;
}

TrialContext draw_trial_context(const ScenarioConfig& config, const RngStream& master, int trial) {
  RngStream trial_rng = master.fork(static_cast<std::uint64_t>(trial));
  RngStream user_rng = config.freeze_users ? master.fork(kStreamFrozenUsers)
                                           : trial_rng.fork(kStreamGeometry);
  TrialContext context;
  context.geometry = build_geometry(config, user_rng);
  RngStream channel_rng = trial_rng.fork(kStreamChannels);
  context.channels = draw_channel_set(config, context.geometry, channel_rng);
  return context;
}

double run_policy_trial(const BenchmarkPolicy& policy, const ScenarioConfig& config,
                        const RngStream& master, int trial) {
  const TrialContext context = draw_trial_context(config, master, trial);
  RngStream trial_rng = master.fork(static_cast<std::uint64_t>(trial));
  const double noise = config.noise_watts();
  const double power = config.power_budget_watts();
  const int k_users = config.n_users;

  // Passive beamforming per policy.
  ReflectionVector irs_state = ReflectionVector::absent();
  switch (policy.irs) {
    case BenchmarkPolicy::IrsMode::kNone:
      break;
    case BenchmarkPolicy::IrsMode::kRandom: {
      RngStream irs_rng = trial_rng.fork(kStreamRandomIrs);
      irs_state = draw_reflection(config.n_irs, config.irs_alphabet(), irs_rng);
      break;
    }
    case BenchmarkPolicy::IrsMode::kOptimized: {
      RngStream rcg_rng = trial_rng.fork(kStreamRcg);
      const RcgSettings settings = RcgSettings::from_config(config);
      ReflectionVector init = ReflectionVector::zeros(config.n_irs);
      for (int pass = 0; pass < config.algorithm_passes; ++pass) {
        auto [relaxed, trace] = rcg_optimize(context.channels, settings, init, &rcg_rng);
        irs_state = project_discrete(relaxed, config.irs_alphabet());
        init = irs_state;
        init.alphabet.clear();  // warm-start the next pass from the projected point
      }
      break;
    }
  }

  // Active beamforming.
  RVector beta_est = RVector::Zero(k_users);
  if (policy.beta_loaded) {
    const AcaStatistics stats = aca_variance(config, context.geometry);
    beta_est = stats.beta * config.beta_multiplier;
  }
  const EffectiveChannels eff = effective_channels(context.channels, irs_state);
  const PrecoderMatrix precoder = anti_jamming_precoder(eff, beta_est, noise, power);

  // Evaluation.
  SjnrReport report;
  if (policy.dirs_active) {
    RngStream eval_rng = trial_rng.fork(kStreamDirsEval);
    const int draws = config.dirs_redraw_per_symbol ? config.sjnr_draws : 1;
    report = sjnr_monte_carlo(context.channels, irs_state, precoder, noise, draws, eval_rng,
                              config.dirs_alphabet);
  } else if (policy.jammer_active) {
    RngStream jammer_rng = trial_rng.fork(kStreamJammer);
    const double jam_power = config.jammer_power_watts();
    RVector noise_per_user(k_users);
    for (int k = 0; k < k_users; ++k) {
      const double distance =
          (config.jammer_position - Vec3(context.geometry.user_positions.col(k))).norm();
      const double gain = db_to_linear(-pathloss_db(PathlossKind::kNlosLike, distance));
      const Complex fade = jammer_rng.complex_normal();
      noise_per_user(k) = noise + jam_power * gain * std::norm(fade);
    }
    report = sjnr_closed_form(eff, precoder, RVector::Zero(k_users), noise_per_user);
  } else {
    report = sjnr_closed_form(eff, precoder, RVector::Zero(k_users), noise);
  }
  return report.rate / static_cast<double>(k_users);
}

std::vector<double> run_benchmark(BenchmarkId id, const ScenarioConfig& config,
                                  const RngStream& master, int workers) {
  config.validate();
  const BenchmarkPolicy policy = policy_for(id, config);
  const int trials = config.trials;
  std::vector<double> rates(trials, 0.0);
  const int thread_count = std::clamp(workers, 1, trials);

  if (thread_count == 1) {
    for (int t = 0; t < trials; ++t) rates[t] = run_policy_trial(policy, config, master, t);
    return rates;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (int w = 0; w < thread_count; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int t = w; t < trials; t += thread_count)
          rates[t] = run_policy_trial(policy, config, master, t);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);
  return rates;
}

ScenarioConfig apply_sweep_value(SweepKind kind, double value, ScenarioConfig config) {
  switch (kind) {
    case SweepKind::kPower:
      config.power_budget_dbm = value + 10.0 * std::log10(static_cast<double>(config.n_users));
      break;
    case SweepKind::kNIrs: {
      const int n = static_cast<int>(std::llround(value));
      if (n < 1 || std::abs(value - n) > 1e-9)
        throw std::invalid_argument("sweep: n-irs grid values must be positive integers");
      config.n_irs = n;
      break;
    }
    case SweepKind::kBits: {
      const int bits = static_cast<int>(std::llround(value));
      if (bits < 1 || std::abs(value - bits) > 1e-9)
        throw std::invalid_argument("sweep: bits grid values must be positive integers");
      config.irs_alphabet_bits = bits;
      break;
    }
  }
  return config;
}

RateReport run_sweep(SweepKind kind, const std::vector<double>& grid,
                     const ScenarioConfig& config, const std::vector<BenchmarkId>& benchmarks,
                     int workers) {
  if (grid.empty()) throw std::invalid_argument("run_sweep: empty grid");
  if (benchmarks.empty()) throw std::invalid_argument("run_sweep: no benchmarks selected");
  config.validate();

  RateReport report;
  report.sweep_var = sweep_var_name(kind);
  report.grid = grid;
  report.seed = config.seed;
  report.config_hash = config_hash_hex(config);
  report.version = kVersion;

  const RngStream master(config.seed);
  for (double value : grid) {
    const ScenarioConfig point_config = apply_sweep_value(kind, value, config);
    for (BenchmarkId id : benchmarks) {
      const std::vector<double> rates = run_benchmark(id, point_config, master, workers);
      double mean = 0.0;
      for (double r : rates) mean += r;
      mean /= rates.size();
      double var = 0.0;
      for (double r : rates) var += (r - mean) * (r - mean);
      var = rates.size() > 1 ? var / (rates.size() - 1) : 0.0;
      RatePoint point;
      point.sweep_value = value;
      point.benchmark = id;
      point.mean_rate = mean;
      point.std_error = std::sqrt(var / rates.size());
      point.trials = static_cast<int>(rates.size());
      report.points.push_back(point);
    }
  }
  return report;
}

std::string format_rate_csv(const RateReport& report) {
  std::ostringstream out;
  out << "sweep_var,value,benchmark,mean_rate,stderr,trials,seed\n";
  char buffer[256];
  for (const RatePoint& point : report.points) {
    std::snprintf(buffer, sizeof(buffer), "%s,%.12g,%s,%.12g,%.12g,%d,%llu\n",
                  report.sweep_var.c_str(), point.sweep_value,
                  benchmark_name(point.benchmark), point.mean_rate, point.std_error,
                  point.trials, static_cast<unsigned long long>(report.seed));
    out << buffer;
  }
  return out.str();
}

void emit_report(const RateReport& report, const ScenarioConfig& config,
                 const std::string& out_dir) {
  if (report.grid.empty() || report.points.empty())
    throw std::invalid_argument("emit_report: empty report");
  std::filesystem::create_directories(out_dir);
  const std::string csv_path = out_dir + "/sweep_" + report.sweep_var + ".csv";
  {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("emit_report: cannot open '" + csv_path + "'");
    out << format_rate_csv(report);
    if (!out) throw std::runtime_error("emit_report: write failed for '" + csv_path + "'");
  }
  const std::string manifest_path = out_dir + "/run_manifest.txt";
  {
    std::ofstream out(manifest_path);
    if (!out) throw std::runtime_error("emit_report: cannot open '" + manifest_path + "'");
    out << "# run manifest\n";
    out << "# version = " << report.version << "\n";
    out << "# config_hash = " << report.config_hash << "\n";
    out << "# sweep_var = " << report.sweep_var << "\n";
    out << "# grid =";
    char buffer[64];
    for (double g : report.grid) {
      std::snprintf(buffer, sizeof(buffer), " %.12g", g);
      out << buffer;
    }
    out << "\n";
    out << format_scenario(config);
    if (!out) throw std::runtime_error("emit_report: write failed for '" + manifest_path + "'");
  }
}

std::string config_hash_hex(const ScenarioConfig& config) {
  const std::string text = format_scenario(config);
  std::uint64_t hash = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace irsjam
