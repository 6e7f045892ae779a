// SPDX-License-Identifier: Apache-2.0
#ifndef IRSJAM_MANIFOLD_HPP
#define IRSJAM_MANIFOLD_HPP

#include "irsjam/channels.hpp"
#include "irsjam/disco.hpp"
#include "irsjam/rng.hpp"
#include "irsjam/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace irsjam {

struct RcgSettings {
  int max_iters = 500;
  double grad_tol = 1e-6;  // scaled by sqrt(N_I) on the unit-scale problem
  double armijo_init_step = 1.0;
  double armijo_contraction = 0.5;
  double armijo_slope = 1e-4;
  int max_backtracks = 50;
  int restart_period = 0;   // 0 = every N_I iterations
  int random_restarts = 1;  // best-of-R random initializations

  void validate() const;
  static RcgSettings from_config(const ScenarioConfig& config);
};

enum class RcgStop { kGradientTol, kMaxIters, kLineSearchStalled };

const char* rcg_stop_name(RcgStop reason);

// Per-iteration record of an RCG run; power is nondecreasing by the Armijo
// acceptance rule.
struct RcgTrace {
  std::vector<double> power;      // P_E at the initial point and each accepted iterate
  std::vector<double> grad_norm;  // Riemannian gradient norm (unit-scale problem)
  std::vector<double> step;       // accepted Armijo step (0 for the initial entry)
  RcgStop reason = RcgStop::kMaxIters;
};

// Cascade model behind the effective channel power
//   P_E(v) = sum_k || M_k^T v + g_k ||^2,
// with M_k = diag(conj(h_IU,k)) H_AI and g_k = conj(h_AU,k). Channel entries
// are tiny in absolute terms (pathloss scale), so the model also carries a
// Frobenius normalization that maps the optimization to unit scale without
// moving the optimum.
struct EffectivePowerModel {
  std::vector<CMatrix> cascade;  // K matrices, N_I x N_A
  CMatrix direct;                // N_A x K, columns g_k
  double scale = 1.0;            // multiply unit-scale power by scale^2

  int n_irs() const { return cascade.empty() ? 0 : static_cast<int>(cascade[0].rows()); }
};

EffectivePowerModel effective_power_model(const ChannelSet& channels);

// P_E at a unit-modulus point (validated; throws on |v_r| far from 1).
double effective_power(const CVector& v, const ChannelSet& channels);
double effective_power(const CVector& v, const EffectivePowerModel& model);

// The same quadratic form on all of C^N, no unit-modulus requirement; this is
// the function the Euclidean gradient differentiates.
double effective_power_ambient(const CVector& v, const EffectivePowerModel& model);

// Euclidean gradient g with d P_E = Re<g, delta>: g = 2 sum_k conj(M_k) u_k.
// Identifying g with the real coordinates, dP/dRe(v_r) = Re(g_r) and
// dP/dIm(v_r) = Im(g_r).
CVector euclidean_gradient(const CVector& v, const ChannelSet& channels);
CVector euclidean_gradient(const CVector& v, const EffectivePowerModel& model);

// Orthogonal projection onto the tangent space of the complex circle at v:
// a - Re{a .* conj(v)} .* v. Used both for the Riemannian gradient and for
// transporting previous directions.
CVector tangent_project(const CVector& ambient, const CVector& v);
CVector riemannian_gradient(const CVector& euclidean, const CVector& v);

// Polak-Ribiere conjugate direction with clamp at zero (automatic restart);
// gradients follow the descent convention of the objective being minimized,
// so the first iteration returns -grad.
CVector conjugate_direction(const CVector& grad, const CVector& prev_dir,
                            const CVector& prev_grad, const CVector& v);

// Entry-wise retraction (v + step*d)_r / |(v + step*d)_r|; a zero-magnitude
// entry shrinks the step and retries rather than emitting NaN.
CVector retract_step(const CVector& v, const CVector& direction, double step);

// Maximizes P_E over unit-modulus v by Riemannian conjugate gradient with
// Armijo backtracking (internally minimizing -P_E on the unit-scale model).
// Additional random restarts use `restart_rng` when provided; the best run
// by final P_E wins.
std::pair<ReflectionVector, RcgTrace> rcg_optimize(const ChannelSet& channels,
                                                   const RcgSettings& settings,
                                                   const ReflectionVector& init,
                                                   RngStream* restart_rng = nullptr);

// Per-element nearest alphabet phase in angular (equivalently chordal)
// distance; exact ties resolve to the smaller alphabet index.
ReflectionVector project_discrete(const ReflectionVector& v_continuous,
                                  const std::vector<double>& alphabet);

std::string format_rcg_trace_csv(const RcgTrace& trace);
void write_rcg_trace_csv(const RcgTrace& trace, const std::string& path);

}  // namespace irsjam

#endif  // IRSJAM_MANIFOLD_HPP
