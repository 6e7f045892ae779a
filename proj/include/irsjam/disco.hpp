// SPDX-License-Identifier: Apache-2.0
#ifndef IRSJAM_DISCO_HPP
#define IRSJAM_DISCO_HPP

#include "irsjam/channels.hpp"
#include "irsjam/rng.hpp"
#include "irsjam/scenario.hpp"
#include "irsjam/types.hpp"

#include <string>
#include <vector>

namespace irsjam {

// Phase state of a reflective surface (IRS or DIRS). In discrete mode every
// phase must be a member of the alphabet; the derived reflection values
// e^{j*phase} have unit modulus either way. A zero-length vector stands for
// "surface absent".
struct ReflectionVector {
  RVector phases;
  std::vector<double> alphabet;  // empty = continuous mode

  int size() const { return static_cast<int>(phases.size()); }
  bool discrete() const { return !alphabet.empty(); }
  CVector values() const;
  void validate() const;  // throws on alphabet-membership violations

  static ReflectionVector zeros(int n, std::vector<double> alphabet = {});
  static ReflectionVector absent() { return ReflectionVector{}; }
};

// i.i.d. uniform draw over the alphabet, one phase per element.
ReflectionVector draw_reflection(int n, const std::vector<double>& alphabet, RngStream& rng);
// DIRS state at the configured size/alphabet.
ReflectionVector draw_dirs_state(const ScenarioConfig& config, RngStream& rng);

// Jammed channel H_D: row k = h_DU,k^H * diag(values) * H_AD  (K x N_A).
CMatrix jammed_channel(const CMatrix& h_ad, const CMatrix& h_du, const ReflectionVector& state);

// Asymptotic per-entry variance of the jammed channel rows:
// beta_k = L_AD * L_DU,k * N_D (linear scale).
struct AcaStatistics {
  RVector beta;  // K
  int n_dirs = 0;
  double l_ad = 1.0;
  RVector l_du;  // K
};
AcaStatistics aca_variance(const ScenarioConfig& config, const GeometryLayout& geometry);

// Monte Carlo diagnostics of the Gaussian limit: per small-scale trial the
// AP-DIRS and DIRS-LU fades are redrawn, then `draws_per_state` DIRS phase
// draws are accumulated, pooling entry statistics over all joint draws.
struct CltReport {
  int n_dirs = 0;
  int total_draws = 0;
  RMatrix mean_re;    // K x N_A
  RMatrix mean_im;    // K x N_A
  RMatrix variance;   // K x N_A
  RMatrix kurtosis;   // K x N_A: E|x|^4 / (E|x|^2)^2, 2 for complex Gaussian
  RVector beta;       // K
  RVector pooled_variance;  // K, variance averaged over the antenna index

  // Mean over entries of |kurtosis - 2|; shrinks as N_D grows.
  double kurtosis_gap() const;
};

CltReport clt_diagnostics(const ScenarioConfig& config, const GeometryLayout& geometry,
                          int n_draws, RngStream& rng, int draws_per_state = 10);

// CSV rows: n_dirs,k,n,emp_mean_re,emp_mean_im,emp_var,beta,kurtosis
std::string format_clt_csv(const CltReport& report);
void write_clt_csv(const CltReport& report, const std::string& path);

}  // namespace irsjam

#endif  // IRSJAM_DISCO_HPP
