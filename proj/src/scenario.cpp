// SPDX-License-Identifier: Apache-2.0
#include "irsjam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace irsjam {

double pathloss_db(PathlossKind kind, double distance_m) {
  if (!(distance_m > 0.0))
    throw std::invalid_argument("pathloss_db: distance must be positive");
  switch (kind) {
    case PathlossKind::kLosLike:
      return 35.6 + 22.0 * std::log10(distance_m);
    case PathlossKind::kNlosLike:
      return 32.6 + 36.7 * std::log10(distance_m);
  }
  throw std::invalid_argument("pathloss_db: unknown kind");
}

double noise_power_dbm(double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0))
    throw std::invalid_argument("noise_power_dbm: bandwidth must be positive");
  return -170.0 + 10.0 * std::log10(bandwidth_hz);
}

std::vector<double> ScenarioConfig::irs_alphabet() const {
  const int count = 1 << irs_alphabet_bits;
  std::vector<double> phases(count);
  for (int i = 0; i < count; ++i) phases[i] = 2.0 * kPi * i / count;
  return phases;
}

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(std::string("ScenarioConfig: ") + message);
  };
  require(n_antennas >= 1, "n_antennas must be >= 1");
  require(n_irs >= 1, "n_irs must be >= 1");
  require(n_dirs >= 1, "n_dirs must be >= 1");
  require(n_users >= 1, "n_users must be >= 1");
  require(std::isfinite(power_budget_dbm), "power_budget_dbm must be finite");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be positive");
  require(carrier_wavelength_m > 0.0, "carrier_wavelength_m must be positive");
  require(trials >= 1, "trials must be >= 1");
  require(user_region_radius_m > 0.0, "user_region_radius_m must be positive");
  require(element_spacing_m > 0.0, "element_spacing_m must be positive");
  require(rician_ad >= 0.0 && rician_ai >= 0.0 && rician_iu >= 0.0,
          "Rician factors must be nonnegative");
  require(irs_alphabet_bits >= 1 && irs_alphabet_bits <= 16, "irs alphabet bits out of range");
  require(dirs_alphabet_bits >= 1 && dirs_alphabet_bits <= 16, "dirs alphabet bits out of range");
  require(static_cast<int>(dirs_alphabet.size()) == (1 << dirs_alphabet_bits),
          "dirs alphabet size must equal 2^bits");
  std::set<double> distinct;
  for (double phase : dirs_alphabet) {
    require(phase >= 0.0 && phase < 2.0 * kPi, "dirs alphabet phases must lie in [0, 2pi)");
    distinct.insert(phase);
  }
  require(distinct.size() == dirs_alphabet.size(), "dirs alphabet phases must be distinct");
  require(beta_multiplier >= 0.0, "beta_multiplier must be nonnegative");
  require(rcg_max_iters >= 1, "rcg max_iters must be >= 1");
  require(rcg_grad_tol > 0.0, "rcg grad_tol must be positive");
  require(rcg_armijo_init_step > 0.0, "rcg armijo_init_step must be positive");
  require(rcg_armijo_contraction > 0.0 && rcg_armijo_contraction < 1.0,
          "rcg armijo_contraction must lie in (0,1)");
  require(rcg_armijo_slope > 0.0, "rcg armijo_slope must be positive");
  require(rcg_max_backtracks >= 1, "rcg max_backtracks must be >= 1");
  require(rcg_restart_period >= 0, "rcg restart_period must be nonnegative");
  require(rcg_restarts >= 1, "rcg restarts must be >= 1");
  require(sjnr_draws >= 1, "sjnr_draws must be >= 1");
  require(algorithm_passes >= 1, "algorithm_passes must be >= 1");
}

ScenarioConfig ScenarioConfig::paper_defaults() { return ScenarioConfig{}; }

ScenarioConfig ScenarioConfig::desk_defaults() {
  ScenarioConfig config;
  config.n_antennas = 8;
  config.n_irs = 32;
  config.n_dirs = 256;
  config.n_users = 4;
  config.power_budget_dbm = 6.020599913279624;  // 0 dBm per LU at K=4
  config.trials = 200;
  config.sjnr_draws = 500;
  // The small profile keeps the full-scale operating regime: with 8x fewer
  // DIRS elements and 4x fewer users, the DIRS moves to 0.5 m from the AP so
  // jamming stays at the same strength relative to noise, and the IRS sits
  // inside the user area so the cascade stays comparable to the direct path.
  config.dirs_center = Vec3(2.0, 0.0, 4.5);
  config.irs_center = Vec3(0.0, 296.0, 3.0);
  return config;
}

std::pair<int, int> planar_dims(int n_elements) {
  if (n_elements < 1) throw std::invalid_argument("planar_dims: need at least one element");
  const int start = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_elements))));
  for (int rows = start; rows <= n_elements; ++rows) {
    if (n_elements % rows == 0) return {rows, n_elements / rows};
  }
  return {n_elements, 1};
}

namespace {

RMatrix linear_array(const Vec3& center, int count, double spacing) {
  RMatrix positions(3, count);
  for (int n = 0; n < count; ++n) {
    Vec3 p = center;
    p.x() += spacing * (n - 0.5 * (count - 1));
    positions.col(n) = p;
  }
  return positions;
}

RMatrix planar_array(const Vec3& center, int count, double spacing) {
  const auto [rows, cols] = planar_dims(count);
  RMatrix positions(3, count);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      Vec3 p = center;
      p.z() += spacing * (i - 0.5 * (rows - 1));
      p.x() += spacing * (j - 0.5 * (cols - 1));
      positions.col(i * cols + j) = p;
    }
  }
  return positions;
}

}  // namespace

GeometryLayout build_geometry(const ScenarioConfig& config, RngStream& rng) {
  config.validate();
  GeometryLayout geometry;
  geometry.wavelength_m = config.carrier_wavelength_m;
  geometry.ap_positions = linear_array(config.ap_center, config.n_antennas,
                                       config.element_spacing_m);
  geometry.irs_positions = planar_array(config.irs_center, config.n_irs,
                                        config.element_spacing_m);
  geometry.dirs_positions = planar_array(config.dirs_center, config.n_dirs,
                                         config.element_spacing_m);

  const int k_users = config.n_users;
  geometry.user_positions.resize(3, k_users);
  for (int k = 0; k < k_users; ++k) {
    const double angle = 2.0 * kPi * rng.uniform();
    const double radius = config.user_region_radius_m * std::sqrt(rng.uniform());
    Vec3 p = config.user_region_center;
    p.x() += radius * std::cos(angle);
    p.y() += radius * std::sin(angle);
    geometry.user_positions.col(k) = p;
  }

  geometry.d_ad = (config.ap_center - config.dirs_center).norm();
  geometry.d_ai = (config.ap_center - config.irs_center).norm();
  geometry.d_iu.resize(k_users);
  geometry.d_au.resize(k_users);
  geometry.d_du.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const Vec3 user = geometry.user_positions.col(k);
    geometry.d_iu(k) = (config.irs_center - user).norm();
    geometry.d_au(k) = (config.ap_center - user).norm();
    geometry.d_du(k) = (config.dirs_center - user).norm();
  }

  geometry.pair_dist.resize(config.n_dirs, config.n_antennas);
  geometry.ref_dist.resize(config.n_antennas);
  for (int n = 0; n < config.n_antennas; ++n) {
    const Vec3 antenna = geometry.ap_positions.col(n);
    geometry.ref_dist(n) = (antenna - config.dirs_center).norm();
    for (int r = 0; r < config.n_dirs; ++r) {
      geometry.pair_dist(r, n) = (antenna - geometry.dirs_positions.col(r)).norm();
    }
  }

  auto positive = [](double d) { return d > 0.0; };
  if (!positive(geometry.d_ad) || !positive(geometry.d_ai) ||
      !std::all_of(geometry.d_iu.begin(), geometry.d_iu.end(), positive) ||
      !std::all_of(geometry.d_au.begin(), geometry.d_au.end(), positive) ||
      !std::all_of(geometry.d_du.begin(), geometry.d_du.end(), positive) ||
      geometry.ref_dist.minCoeff() <= 0.0 || geometry.pair_dist.minCoeff() <= 0.0) {
    throw std::invalid_argument("build_geometry: degenerate geometry, zero link distance");
  }
  return geometry;
}

// ---------------------------------------------------------------------------
// Scenario file parsing
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& value, const std::string& key) {
  try {
    size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (trim(value.substr(used)).empty()) return parsed;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("scenario: bad numeric value for " + key + ": '" + value + "'");
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("scenario: bad boolean value for " + key + ": '" + value + "'");
}

std::vector<double> parse_vector(const std::string& value, const std::string& key) {
  const std::string body = trim(value);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']')
    throw std::invalid_argument("scenario: expected [..] vector for " + key);
  std::vector<double> out;
  std::stringstream ss(body.substr(1, body.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("scenario: empty vector element for " + key);
    out.push_back(parse_number(item, key));
  }
  if (out.empty()) throw std::invalid_argument("scenario: empty vector for " + key);
  return out;
}

Vec3 parse_vec3(const std::string& value, const std::string& key) {
  const auto items = parse_vector(value, key);
  if (items.size() != 3)
    throw std::invalid_argument("scenario: " + key + " needs exactly 3 components");
  return Vec3(items[0], items[1], items[2]);
}

int parse_int(const std::string& value, const std::string& key) {
  const double parsed = parse_number(value, key);
  const int rounded = static_cast<int>(std::llround(parsed));
  if (std::abs(parsed - rounded) > 1e-9)
    throw std::invalid_argument("scenario: " + key + " must be an integer");
  return rounded;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_vec3(const Vec3& v) {
  return "[" + format_double(v.x()) + ", " + format_double(v.y()) + ", " +
         format_double(v.z()) + "]";
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text, ScenarioConfig base) {
  ScenarioConfig config = base;
  bool saw_wavelength = false;
  bool saw_spacing = false;
  bool saw_dirs_alphabet = false;
  bool saw_dirs_bits = false;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"system.n_antennas", [&](auto& k, auto& v) { config.n_antennas = parse_int(v, k); }},
      {"system.n_irs", [&](auto& k, auto& v) { config.n_irs = parse_int(v, k); }},
      {"system.n_dirs", [&](auto& k, auto& v) { config.n_dirs = parse_int(v, k); }},
      {"system.n_users", [&](auto& k, auto& v) { config.n_users = parse_int(v, k); }},
      {"system.power_budget_dbm",
       [&](auto& k, auto& v) { config.power_budget_dbm = parse_number(v, k); }},
      {"system.bandwidth_hz", [&](auto& k, auto& v) { config.bandwidth_hz = parse_number(v, k); }},
      {"system.carrier_wavelength_m",
       [&](auto& k, auto& v) {
         config.carrier_wavelength_m = parse_number(v, k);
         saw_wavelength = true;
       }},
      {"system.seed",
       [&](auto& k, auto& v) { config.seed = static_cast<std::uint64_t>(parse_number(v, k)); }},
      {"system.trials", [&](auto& k, auto& v) { config.trials = parse_int(v, k); }},
      {"geometry.ap_center", [&](auto& k, auto& v) { config.ap_center = parse_vec3(v, k); }},
      {"geometry.irs_center", [&](auto& k, auto& v) { config.irs_center = parse_vec3(v, k); }},
      {"geometry.dirs_center", [&](auto& k, auto& v) { config.dirs_center = parse_vec3(v, k); }},
      {"geometry.user_region_center",
       [&](auto& k, auto& v) { config.user_region_center = parse_vec3(v, k); }},
      {"geometry.user_region_radius_m",
       [&](auto& k, auto& v) { config.user_region_radius_m = parse_number(v, k); }},
      {"geometry.element_spacing_m",
       [&](auto& k, auto& v) {
         config.element_spacing_m = parse_number(v, k);
         saw_spacing = true;
       }},
      {"geometry.freeze_users", [&](auto& k, auto& v) { config.freeze_users = parse_bool(v, k); }},
      {"channel.rician_ad", [&](auto& k, auto& v) { config.rician_ad = parse_number(v, k); }},
      {"channel.rician_ai", [&](auto& k, auto& v) { config.rician_ai = parse_number(v, k); }},
      {"channel.rician_iu", [&](auto& k, auto& v) { config.rician_iu = parse_number(v, k); }},
      {"irs.alphabet_bits", [&](auto& k, auto& v) { config.irs_alphabet_bits = parse_int(v, k); }},
      {"dirs.alphabet_bits",
       [&](auto& k, auto& v) {
         config.dirs_alphabet_bits = parse_int(v, k);
         saw_dirs_bits = true;
       }},
      {"dirs.alphabet",
       [&](auto& k, auto& v) {
         config.dirs_alphabet = parse_vector(v, k);
         saw_dirs_alphabet = true;
       }},
      {"dirs.redraw_per_symbol",
       [&](auto& k, auto& v) { config.dirs_redraw_per_symbol = parse_bool(v, k); }},
      {"jammer.power_dbm", [&](auto& k, auto& v) { config.jammer_power_dbm = parse_number(v, k); }},
      {"jammer.position", [&](auto& k, auto& v) { config.jammer_position = parse_vec3(v, k); }},
      {"precoding.beta_multiplier",
       [&](auto& k, auto& v) { config.beta_multiplier = parse_number(v, k); }},
      {"rcg.max_iters", [&](auto& k, auto& v) { config.rcg_max_iters = parse_int(v, k); }},
      {"rcg.grad_tol", [&](auto& k, auto& v) { config.rcg_grad_tol = parse_number(v, k); }},
      {"rcg.armijo_init_step",
       [&](auto& k, auto& v) { config.rcg_armijo_init_step = parse_number(v, k); }},
      {"rcg.armijo_contraction",
       [&](auto& k, auto& v) { config.rcg_armijo_contraction = parse_number(v, k); }},
      {"rcg.armijo_slope", [&](auto& k, auto& v) { config.rcg_armijo_slope = parse_number(v, k); }},
      {"rcg.max_backtracks",
       [&](auto& k, auto& v) { config.rcg_max_backtracks = parse_int(v, k); }},
      {"rcg.restart_period",
       [&](auto& k, auto& v) { config.rcg_restart_period = parse_int(v, k); }},
      {"rcg.restarts", [&](auto& k, auto& v) { config.rcg_restarts = parse_int(v, k); }},
      {"harness.sjnr_draws", [&](auto& k, auto& v) { config.sjnr_draws = parse_int(v, k); }},
      {"harness.random_irs_for_baselines",
       [&](auto& k, auto& v) { config.random_irs_for_baselines = parse_bool(v, k); }},
      {"harness.algorithm_passes",
       [&](auto& k, auto& v) { config.algorithm_passes = parse_int(v, k); }},
  };

  std::stringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("scenario: line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw std::invalid_argument("scenario: unknown key '" + key + "' (line " +
                                  std::to_string(line_no) + ")");
    it->second(key, value);
  }

  if (saw_wavelength && !saw_spacing)
    config.element_spacing_m = config.carrier_wavelength_m / 2.0;
  if (saw_dirs_bits && !saw_dirs_alphabet) {
    // No explicit set given: fall back to uniformly spaced phases from 0.
    const int count = 1 << config.dirs_alphabet_bits;
    config.dirs_alphabet.resize(count);
    for (int i = 0; i < count; ++i) config.dirs_alphabet[i] = 2.0 * kPi * i / count;
  }
  if (saw_dirs_alphabet && !saw_dirs_bits) {
    int bits = 0;
    while ((1u << bits) < config.dirs_alphabet.size()) ++bits;
    config.dirs_alphabet_bits = bits;
  }
  config.validate();
  return config;
}

ScenarioConfig load_scenario_file(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), std::move(base));
}

std::string format_scenario(const ScenarioConfig& config) {
  std::ostringstream out;
  out << "system.n_antennas = " << config.n_antennas << "\n";
  out << "system.n_irs = " << config.n_irs << "\n";
  out << "system.n_dirs = " << config.n_dirs << "\n";
  out << "system.n_users = " << config.n_users << "\n";
  out << "system.power_budget_dbm = " << format_double(config.power_budget_dbm) << "\n";
  out << "system.bandwidth_hz = " << format_double(config.bandwidth_hz) << "\n";
  out << "system.carrier_wavelength_m = " << format_double(config.carrier_wavelength_m) << "\n";
  out << "system.seed = " << config.seed << "\n";
  out << "system.trials = " << config.trials << "\n";
  out << "geometry.ap_center = " << format_vec3(config.ap_center) << "\n";
  out << "geometry.irs_center = " << format_vec3(config.irs_center) << "\n";
  out << "geometry.dirs_center = " << format_vec3(config.dirs_center) << "\n";
  out << "geometry.user_region_center = " << format_vec3(config.user_region_center) << "\n";
  out << "geometry.user_region_radius_m = " << format_double(config.user_region_radius_m) << "\n";
  out << "geometry.element_spacing_m = " << format_double(config.element_spacing_m) << "\n";
  out << "geometry.freeze_users = " << (config.freeze_users ? "true" : "false") << "\n";
  out << "channel.rician_ad = " << format_double(config.rician_ad) << "\n";
  out << "channel.rician_ai = " << format_double(config.rician_ai) << "\n";
  out << "channel.rician_iu = " << format_double(config.rician_iu) << "\n";
  out << "irs.alphabet_bits = " << config.irs_alphabet_bits << "\n";
  out << "dirs.alphabet_bits = " << config.dirs_alphabet_bits << "\n";
  out << "dirs.alphabet = [";
  for (size_t i = 0; i < config.dirs_alphabet.size(); ++i) {
    if (i) out << ", ";
    out << format_double(config.dirs_alphabet[i]);
  }
  out << "]\n";
  out << "dirs.redraw_per_symbol = " << (config.dirs_redraw_per_symbol ? "true" : "false") << "\n";
  out << "jammer.power_dbm = " << format_double(config.jammer_power_dbm) << "\n";
  out << "jammer.position = " << format_vec3(config.jammer_position) << "\n";
  out << "precoding.beta_multiplier = " << format_double(config.beta_multiplier) << "\n";
  out << "rcg.max_iters = " << config.rcg_max_iters << "\n";
  out << "rcg.grad_tol = " << format_double(config.rcg_grad_tol) << "\n";
  out << "rcg.armijo_init_step = " << format_double(config.rcg_armijo_init_step) << "\n";
  out << "rcg.armijo_contraction = " << format_double(config.rcg_armijo_contraction) << "\n";
  out << "rcg.armijo_slope = " << format_double(config.rcg_armijo_slope) << "\n";
  out << "rcg.max_backtracks = " << config.rcg_max_backtracks << "\n";
  out << "rcg.restart_period = " << config.rcg_restart_period << "\n";
  out << "rcg.restarts = " << config.rcg_restarts << "\n";
  out << "harness.sjnr_draws = " << config.sjnr_draws << "\n";
  out << "harness.random_irs_for_baselines = "
      << (config.random_irs_for_baselines ? "true" : "false") << "\n";
  out << "harness.algorithm_passes = " << config.algorithm_passes << "\n";
  return out.str();
}

}  // namespace irsjam
