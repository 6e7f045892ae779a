// SPDX-License-Identifier: Apache-2.0
#ifndef IRSJAM_PRECODING_HPP
#define IRSJAM_PRECODING_HPP

#include "irsjam/channels.hpp"
#include "irsjam/disco.hpp"
#include "irsjam/rng.hpp"
#include "irsjam/types.hpp"

#include <string>
#include <vector>

namespace irsjam {

// Effective legitimate channels h_L,k = h_I,k + h_AU,k as columns, where
// h_I,k = H_AI^H Phi_I^H h_IU,k is the IRS-cascaded path. An absent IRS
// state (size 0) leaves only the direct path.
struct EffectiveChannels {
  CMatrix h_l;  // N_A x K

  // Columns of every user but k, in original order.
  CMatrix stacked_except(int k) const;
};

EffectiveChannels effective_channels(const ChannelSet& channels, const ReflectionVector& irs_state);

// Per-user SJNR generalized-eigen pencil:
//   numerator   = h_L,k h_L,k^H + beta_k I
//   denominator = Htilde Htilde^H + (noise*K/power + sum_{u != k} beta_u) I
// The denominator is Hermitian positive definite by construction.
struct SjnrPencil {
  CMatrix numerator;
  CMatrix denominator;

  // numerator * denominator^{-1}, evaluated through Cholesky solves.
  CMatrix ratio() const;
};

SjnrPencil build_sjnr_pencil(int k, const EffectiveChannels& eff, const RVector& beta_est,
                             double noise_watts, double power_watts);

struct EigenPair {
  double value = 0.0;
  CVector vector;
};

// Dominant eigenpair of numerator*denominator^{-1} via Cholesky-whitened
// power iteration on the equivalent Hermitian problem. The returned vector is
// unit norm with its largest-magnitude entry made real positive; the residual
// ||A w - lambda w|| <= tol*||A||_F is enforced (throws std::runtime_error on
// non-convergence, carrying the last residual).
EigenPair dominant_eigenpair(const SjnrPencil& pencil, double tol = 1e-8, int max_iters = 20000);

// Transmit precoder: column k = sqrt(P0/K) * dominant eigenvector, so the
// power budget ||W||_F^2 = P0 is met with equality.
struct PrecoderMatrix {
  CMatrix w;  // N_A x K
  double power_budget_watts = 0.0;
};

PrecoderMatrix anti_jamming_precoder(const EffectiveChannels& eff, const RVector& beta_est,
                                     double noise_watts, double power_watts);

struct SjnrReport {
  RVector sjnr;      // K, linear
  double rate = 0.0; // sum_k log2(1 + sjnr_k), bits/s/Hz
  std::string method;
};

// Closed-form SJNR with the Gaussian jamming surrogate: user k's numerator
// and every denominator term carry beta_k. The per-user-noise overload
// supports receiver-side additive jamming power.
SjnrReport sjnr_closed_form(const EffectiveChannels& eff, const PrecoderMatrix& precoder,
                            const RVector& beta, const RVector& noise_watts_per_user);
SjnrReport sjnr_closed_form(const EffectiveChannels& eff, const PrecoderMatrix& precoder,
                            const RVector& beta, double noise_watts);

// Monte Carlo SJNR: redraws the DIRS phases per draw and averages the
// received powers |h_DT,k^H w_u|^2. With no DIRS rows present the estimate
// is the deterministic jamming-free value.
SjnrReport sjnr_monte_carlo(const ChannelSet& channels, const ReflectionVector& irs_state,
                            const PrecoderMatrix& precoder, double noise_watts, int n_draws,
                            RngStream& rng, const std::vector<double>& dirs_alphabet);

}  // namespace irsjam

#endif  // IRSJAM_PRECODING_HPP
