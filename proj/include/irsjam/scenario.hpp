// SPDX-License-Identifier: Apache-2.0
#ifndef IRSJAM_SCENARIO_HPP
#define IRSJAM_SCENARIO_HPP

#include "irsjam/rng.hpp"
#include "irsjam/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace irsjam {

// Link classes of the 3GPP-style pathloss model used throughout:
//   los-like : 35.6 + 22.0  * log10(d)   (AP-DIRS, AP-IRS, IRS-LU links)
//   nlos-like: 32.6 + 36.7 * log10(d)    (AP-LU, DIRS-LU links)
enum class PathlossKind { kLosLike, kNlosLike };

double pathloss_db(PathlossKind kind, double distance_m);

// AWGN variance in dBm for a given bandwidth: -170 + 10 log10(BW).
double noise_power_dbm(double bandwidth_hz);

// Scenario configuration. Field defaults mirror the full-scale evaluation
// setup; desk_defaults() swaps in a small profile for fast runs.
struct ScenarioConfig {
  // system
  int n_antennas = 32;   // N_A
  int n_irs = 128;       // N_I
  int n_dirs = 2048;     // N_D
  int n_users = 16;      // K
  double power_budget_dbm = 12.041199826559248;  // total P0; 0 dBm per LU
  double bandwidth_hz = 180e3;
  double carrier_wavelength_m = 0.06;
  std::uint64_t seed = 1;
  int trials = 100;

  // geometry (meters)
  Vec3 ap_center{2.0, 0.0, 5.0};
  Vec3 irs_center{10.0, 280.0, 5.0};
  Vec3 dirs_center{2.0, 0.0, 2.0};
  Vec3 user_region_center{0.0, 300.0, 0.0};
  double user_region_radius_m = 20.0;
  double element_spacing_m = 0.03;  // d = lambda/2
  bool freeze_users = false;

  // Rician factors (linear). The AP-IRS factor defaults low: its LOS part is
  // a rank-one outer product shared by every user, and a strongly LOS AP-IRS
  // link collapses the users' effective channels onto one direction, which
  // inverts the multi-user behavior the benchmarks measure.
  double rician_ad = 3.0;
  double rician_ai = 0.1;
  double rician_iu = 3.0;

  // reflector phase alphabets
  int irs_alphabet_bits = 2;   // b2; IRS alphabet is 2^b2 phases uniform from 0
  int dirs_alphabet_bits = 1;  // b1
  std::vector<double> dirs_alphabet{kPi / 9.0, 6.0 * kPi / 5.0};
  bool dirs_redraw_per_symbol = true;

  // active jammer (benchmark 5 only)
  double jammer_power_dbm = 0.0;
  Vec3 jammer_position{2.0, 0.0, 5.0};

  // precoding
  double beta_multiplier = 1.0;  // scales the beta estimates fed to the precoder

  // passive-beamforming optimizer
  int rcg_max_iters = 500;
  double rcg_grad_tol = 1e-6;
  double rcg_armijo_init_step = 1.0;
  double rcg_armijo_contraction = 0.5;
  double rcg_armijo_slope = 1e-4;
  int rcg_max_backtracks = 50;
  int rcg_restart_period = 0;  // 0 = restart every n_irs iterations
  int rcg_restarts = 1;        // best-of-R random restarts

  // harness
  int sjnr_draws = 500;  // DIRS draws per Monte Carlo SJNR estimate
  bool random_irs_for_baselines = false;
  int algorithm_passes = 1;

  double power_budget_watts() const { return dbm_to_watts(power_budget_dbm); }
  double noise_watts() const { return dbm_to_watts(noise_power_dbm(bandwidth_hz)); }
  double jammer_power_watts() const { return dbm_to_watts(jammer_power_dbm); }

  // 2^b2 uniformly spaced phases starting at 0.
  std::vector<double> irs_alphabet() const;

  // Throws std::invalid_argument on any broken invariant.
  void validate() const;

  static ScenarioConfig paper_defaults();
  static ScenarioConfig desk_defaults();
};

// rows x cols layout of a planar aperture with n elements: rows is the
// smallest divisor of n that is >= sqrt(n) (128 -> 16x8, 2048 -> 64x32).
std::pair<int, int> planar_dims(int n_elements);

// Element/user coordinates and every derived distance. Arrays: AP antennas on
// a uniform linear array along x; IRS/DIRS on uniform planar arrays in the
// x-z plane (rows step z, columns step x), element index r = i*cols + j.
struct GeometryLayout {
  double wavelength_m = 0.06;
  RMatrix ap_positions;    // 3 x N_A
  RMatrix irs_positions;   // 3 x N_I
  RMatrix dirs_positions;  // 3 x N_D
  RMatrix user_positions;  // 3 x K

  double d_ad = 0.0;  // AP center to DIRS center
  double d_ai = 0.0;  // AP center to IRS center
  RVector d_iu;       // IRS center to user k
  RVector d_au;       // AP center to user k
  RVector d_du;       // DIRS center to user k

  RMatrix pair_dist;  // N_D x N_A, D_n^r: antenna n to DIRS element r
  RVector ref_dist;   // N_A, D_n: antenna n to DIRS center
};

// Users are drawn uniformly in the configured disk from `rng`; everything
// else is deterministic given the config.
GeometryLayout build_geometry(const ScenarioConfig& config, RngStream& rng);

// Scenario files: flat UTF-8 "dotted.key = value" lines, '#' comments,
// vectors in brackets. Unknown keys are a hard error.
ScenarioConfig parse_scenario_text(const std::string& text, ScenarioConfig base);
ScenarioConfig load_scenario_file(const std::string& path, ScenarioConfig base);
std::string format_scenario(const ScenarioConfig& config);

}  // namespace irsjam

#endif  // IRSJAM_SCENARIO_HPP
