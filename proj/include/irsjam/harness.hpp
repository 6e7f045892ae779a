// SPDX-License-Identifier: Apache-2.0
#ifndef IRSJAM_HARNESS_HPP
#define IRSJAM_HARNESS_HPP

#include "irsjam/manifold.hpp"
#include "irsjam/precoding.hpp"
#include "irsjam/rng.hpp"
#include "irsjam/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irsjam {

enum class BenchmarkId { kNoJamming, kProposed, kAjp, kFpjNoDefense, kActiveJammer };

const char* benchmark_name(BenchmarkId id);
std::optional<BenchmarkId> parse_benchmark(std::string_view name);
std::vector<BenchmarkId> all_benchmarks();

enum class SweepKind { kPower, kNIrs, kBits };
const char* sweep_var_name(SweepKind kind);
std::optional<SweepKind> parse_sweep_kind(std::string_view name);

// What a benchmark varies: the legitimate-IRS mode, whether the precoder is
// loaded with the jamming statistics, whether the DIRS corrupts the data
// phase, and whether an active jammer radiates.
struct BenchmarkPolicy {
  enum class IrsMode { kNone, kRandom, kOptimized };
  IrsMode irs = IrsMode::kNone;
  bool beta_loaded = false;
  bool dirs_active = false;
  bool jammer_active = false;
};

BenchmarkPolicy policy_for(BenchmarkId id, const ScenarioConfig& config);

// Geometry and channels shared by every benchmark at a given (seed, trial);
// the common-random-number discipline lives here.
struct TrialContext {
  GeometryLayout geometry;
  ChannelSet channels;
};
TrialContext draw_trial_context(const ScenarioConfig& config, const RngStream& master, int trial);

// One Monte Carlo trial: channels, passive/active beamforming per policy,
// SJNR-rate evaluation. Returns the rate per LU (R/K, bits/s/Hz).
double run_policy_trial(const BenchmarkPolicy& policy, const ScenarioConfig& config,
                        const RngStream& master, int trial);

// All trials of one benchmark, optionally spread over worker threads; the
// returned per-trial rates are identical for any worker count.
std::vector<double> run_benchmark(BenchmarkId id, const ScenarioConfig& config,
                                  const RngStream& master, int workers = 1);

struct RatePoint {
  double sweep_value = 0.0;
  BenchmarkId benchmark = BenchmarkId::kNoJamming;
  double mean_rate = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

struct RateReport {
  std::string sweep_var;
  std::vector<double> grid;
  std::vector<RatePoint> points;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string version;
};

// Runs every benchmark at every grid point with shared per-trial random
// streams. Grid semantics: power = dBm per LU, n-irs = element count,
// bits = IRS quantization bits.
RateReport run_sweep(SweepKind kind, const std::vector<double>& grid,
                     const ScenarioConfig& config, const std::vector<BenchmarkId>& benchmarks,
                     int workers = 1);

ScenarioConfig apply_sweep_value(SweepKind kind, double value, ScenarioConfig config);

std::string format_rate_csv(const RateReport& report);

// Writes sweep_<var>.csv plus the run_manifest.txt sidecar (the full resolved
// config and provenance) under out_dir. Throws before creating anything if
// the report is empty.
void emit_report(const RateReport& report, const ScenarioConfig& config,
                 const std::string& out_dir);

std::string config_hash_hex(const ScenarioConfig& config);

}  // namespace irsjam

#endif  // IRSJAM_HARNESS_HPP
