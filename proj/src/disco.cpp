// SPDX-License-Identifier: Apache-2.0
#include "irsjam/disco.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace irsjam {

CVector ReflectionVector::values() const {
  CVector v(phases.size());
  for (Eigen::Index r = 0; r < phases.size(); ++r)
    v(r) = Complex(std::cos(phases(r)), std::sin(phases(r)));
  return v;
}

void ReflectionVector::validate() const {
  if (!discrete()) return;
  for (Eigen::Index r = 0; r < phases.size(); ++r) {
    bool member = false;
    for (double a : alphabet) {
      if (phases(r) == a) {
        member = true;
        break;
      }
    }
    if (!member)
      throw std::invalid_argument("ReflectionVector: phase not in alphabet at element " +
                                  std::to_string(r));
  }
}

ReflectionVector ReflectionVector::zeros(int n, std::vector<double> alphabet) {
  ReflectionVector state;
  state.phases = RVector::Zero(n);
  state.alphabet = std::move(alphabet);
  return state;
}

ReflectionVector draw_reflection(int n, const std::vector<double>& alphabet, RngStream& rng) {
  if (alphabet.empty()) throw std::invalid_argument("draw_reflection: empty alphabet");
  ReflectionVector state;
  state.alphabet = alphabet;
  state.phases.resize(n);
  for (int r = 0; r < n; ++r)
    state.phases(r) = alphabet[rng.uniform_int(alphabet.size())];
  return state;
}

ReflectionVector draw_dirs_state(const ScenarioConfig& config, RngStream& rng) {
  config.validate();
  return draw_reflection(config.n_dirs, config.dirs_alphabet, rng);
}

CMatrix jammed_channel(const CMatrix& h_ad, const CMatrix& h_du, const ReflectionVector& state) {
  if (h_ad.rows() != h_du.rows() || h_ad.rows() != state.size())
    throw std::invalid_argument("jammed_channel: dimension mismatch");
  if (state.size() == 0) return CMatrix::Zero(h_du.cols(), h_ad.cols());
  const CVector v = state.values();
  return h_du.adjoint() * (v.asDiagonal() * h_ad);
}

AcaStatistics aca_variance(const ScenarioConfig& config, const GeometryLayout& geometry) {
  AcaStatistics stats;
  stats.n_dirs = config.n_dirs;
  stats.l_ad = db_to_linear(-pathloss_db(PathlossKind::kLosLike, geometry.d_ad));
  stats.l_du.resize(config.n_users);
  stats.beta.resize(config.n_users);
  for (int k = 0; k < config.n_users; ++k) {
    stats.l_du(k) = db_to_linear(-pathloss_db(PathlossKind::kNlosLike, geometry.d_du(k)));
    stats.beta(k) = stats.l_ad * stats.l_du(k) * config.n_dirs;
  }
  return stats;
}

CltReport clt_diagnostics(const ScenarioConfig& config, const GeometryLayout& geometry,
                          int n_draws, RngStream& rng, int draws_per_state) {
  if (n_draws < 1000) throw std::invalid_argument("clt_diagnostics: need n_draws >= 1000");
  if (draws_per_state < 1)
    throw std::invalid_argument("clt_diagnostics: draws_per_state must be >= 1");

  const int k_users = config.n_users;
  const int n_ant = config.n_antennas;
  const int n_states = n_draws / draws_per_state;
  const AcaStatistics stats = aca_variance(config, geometry);
  const CMatrix los = near_field_los_ad(geometry);

  CMatrix sum = CMatrix::Zero(k_users, n_ant);
  RMatrix sum2 = RMatrix::Zero(k_users, n_ant);
  RMatrix sum4 = RMatrix::Zero(k_users, n_ant);

  for (int s = 0; s < n_states; ++s) {
    RngStream state_rng = rng.fork(s);
    RngStream rng_ad = state_rng.fork(0);
    RngStream rng_du = state_rng.fork(1);
    RngStream rng_phase = state_rng.fork(2);

    const CMatrix h_ad = assemble_rician(
        los, draw_rayleigh(config.n_dirs, n_ant, rng_ad), config.rician_ad, stats.l_ad);
    CMatrix h_du = draw_rayleigh(config.n_dirs, k_users, rng_du);
    for (int k = 0; k < k_users; ++k) h_du.col(k) *= std::sqrt(stats.l_du(k));

    for (int d = 0; d < draws_per_state; ++d) {
      const ReflectionVector state =
          draw_reflection(config.n_dirs, config.dirs_alphabet, rng_phase);
      const CMatrix jammed = jammed_channel(h_ad, h_du, state);
      sum += jammed;
      const RMatrix power = jammed.cwiseAbs2();
      sum2 += power;
      sum4 += power.cwiseProduct(power);
    }
  }

  const double count = static_cast<double>(n_states) * draws_per_state;
  CltReport report;
  report.n_dirs = config.n_dirs;
  report.total_draws = static_cast<int>(count);
  report.beta = stats.beta;
  const CMatrix mean = sum / count;
  report.mean_re = mean.real();
  report.mean_im = mean.imag();
  report.variance = sum2 / count - mean.cwiseAbs2();
  const RMatrix fourth = sum4 / count;
  report.kurtosis = fourth.cwiseQuotient(report.variance.cwiseProduct(report.variance));
  report.pooled_variance = report.variance.rowwise().mean();
  return report;
}

double CltReport::kurtosis_gap() const {
  return (kurtosis.array() - 2.0).abs().mean();
}

std::string format_clt_csv(const CltReport& report) {
  std::ostringstream out;
  out << "n_dirs,k,n,emp_mean_re,emp_mean_im,emp_var,beta,kurtosis\n";
  char buffer[256];
  for (Eigen::Index k = 0; k < report.variance.rows(); ++k) {
    for (Eigen::Index n = 0; n < report.variance.cols(); ++n) {
      std::snprintf(buffer, sizeof(buffer), "%d,%ld,%ld,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                    report.n_dirs, static_cast<long>(k), static_cast<long>(n),
                    report.mean_re(k, n), report.mean_im(k, n), report.variance(k, n),
                    report.beta(k), report.kurtosis(k, n));
      out << buffer;
    }
  }
  return out.str();
}

void write_clt_csv(const CltReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_clt_csv: cannot open '" + path + "'");
  out << format_clt_csv(report);
  if (!out) throw std::runtime_error("write_clt_csv: write failed for '" + path + "'");
}

}  // namespace irsjam
