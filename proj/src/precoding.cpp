// SPDX-License-Identifier: Apache-2.0
#include "irsjam/precoding.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace irsjam {

CMatrix EffectiveChannels::stacked_except(int k) const {
  const Eigen::Index k_users = h_l.cols();
  if (k < 0 || k >= k_users) throw std::invalid_argument("stacked_except: user index out of range");
  CMatrix stacked(h_l.rows(), k_users - 1);
  Eigen::Index c = 0;
  for (Eigen::Index u = 0; u < k_users; ++u) {
    if (u == k) continue;
    stacked.col(c++) = h_l.col(u);
  }
  return stacked;
}

EffectiveChannels effective_channels(const ChannelSet& channels, const ReflectionVector& irs_state) {
  EffectiveChannels eff;
  eff.h_l = channels.h_au;
  if (irs_state.size() == 0) return eff;
  if (irs_state.size() != channels.h_ai.rows() || channels.h_ai.rows() != channels.h_iu.rows())
    throw std::invalid_argument("effective_channels: IRS dimension mismatch");
  const CVector phi_conj = irs_state.values().conjugate();
  // h_I,k = H_AI^H Phi_I^H h_IU,k
  eff.h_l += channels.h_ai.adjoint() * (phi_conj.asDiagonal() * channels.h_iu);
  return eff;
}

SjnrPencil build_sjnr_pencil(int k, const EffectiveChannels& eff, const RVector& beta_est,
                             double noise_watts, double power_watts) {
  const Eigen::Index k_users = eff.h_l.cols();
  if (beta_est.size() != k_users)
    throw std::invalid_argument("build_sjnr_pencil: beta estimate size mismatch");
  if (!(power_watts > 0.0)) throw std::invalid_argument("build_sjnr_pencil: power must be positive");
  const double loading =
      noise_watts * static_cast<double>(k_users) / power_watts + (beta_est.sum() - beta_est(k));
  if (!(loading > 0.0))
    throw std::invalid_argument("build_sjnr_pencil: denominator loading must be positive");

  SjnrPencil pencil;
  const CVector h = eff.h_l.col(k);
  pencil.numerator = h * h.adjoint();
  pencil.numerator.diagonal().array() += beta_est(k);
  const CMatrix stacked = eff.stacked_except(k);
  pencil.denominator = stacked * stacked.adjoint();
  pencil.denominator.diagonal().array() += loading;
  return pencil;
}

CMatrix SjnrPencil::ratio() const {
  const Eigen::LLT<CMatrix> llt(denominator);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("SjnrPencil::ratio: denominator not positive definite");
  // numerator * denominator^{-1} = (denominator^{-1} * numerator)^H
  return llt.solve(numerator).adjoint();
}

EigenPair dominant_eigenpair(const SjnrPencil& pencil, double tol, int max_iters) {
  const Eigen::Index n = pencil.numerator.rows();
  const Eigen::LLT<CMatrix> llt(pencil.denominator);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("dominant_eigenpair: denominator not positive definite");
  const auto lower = llt.matrixL();
  const auto upper = llt.matrixU();  // L^H

  // Whitened operator B = L^{-1} N L^{-H}, Hermitian PSD.
  auto apply = [&](const CVector& y) -> CVector {
    CVector t = upper.solve(y);
    t = pencil.numerator * t;
    return lower.solve(t);
  };

  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(1.0 + 1e-3 * std::sin(1.0 + i), 0.0);
  v.normalize();

  double lambda = 0.0;
  const double stop_tol = std::min(tol, 1e-10);
  for (int iter = 0; iter < max_iters; ++iter) {
    CVector bv = apply(v);
    lambda = bv.dot(v).real();  // v^H (B v), real for Hermitian B
    const double resid = (bv - lambda * v).norm();
    const double scale = std::max(std::abs(lambda), 1e-300);
    if (resid <= stop_tol * scale || bv.norm() == 0.0) break;
    v = bv / bv.norm();
  }

  // Map back to the eigenvector of numerator*denominator^{-1}: with
  // B y = lambda y, the vector L y satisfies A (L y) = lambda (L y).
  CVector w = lower * v;
  w.normalize();

  // Phase convention: largest-magnitude entry real positive.
  Eigen::Index top = 0;
  w.cwiseAbs().maxCoeff(&top);
  const double mag = std::abs(w(top));
  if (mag > 0.0) w *= std::conj(w(top)) / mag;

  const CMatrix a = pencil.ratio();
  const double residual_a = (a * w - lambda * w).norm();
  const double bound = tol * a.norm();
  if (residual_a > bound) {
    std::ostringstream message;
    message << "dominant_eigenpair: no convergence after " << max_iters
            << " iterations, residual " << residual_a << " (bound " << bound << ")";
    throw std::runtime_error(message.str());
  }
  return {lambda, w};
}

PrecoderMatrix anti_jamming_precoder(const EffectiveChannels& eff, const RVector& beta_est,
                                     double noise_watts, double power_watts) {
  const Eigen::Index k_users = eff.h_l.cols();
  PrecoderMatrix precoder;
  precoder.power_budget_watts = power_watts;
  precoder.w.resize(eff.h_l.rows(), k_users);
  const double column_gain = std::sqrt(power_watts / static_cast<double>(k_users));
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const SjnrPencil pencil =
        build_sjnr_pencil(static_cast<int>(k), eff, beta_est, noise_watts, power_watts);
    precoder.w.col(k) = column_gain * dominant_eigenpair(pencil).vector;
  }
  return precoder;
}

namespace {

SjnrReport report_from_powers(const RMatrix& mean_power, const RVector& noise_watts_per_user,
                              const char* method) {
  const Eigen::Index k_users = mean_power.rows();
  SjnrReport report;
  report.method = method;
  report.sjnr.resize(k_users);
  report.rate = 0.0;
  for (Eigen::Index k = 0; k < k_users; ++k) {
    double leakage = 0.0;
    for (Eigen::Index u = 0; u < k_users; ++u) {
      if (u != k) leakage += mean_power(u, k);  // w_k leaking into user u
    }
    report.sjnr(k) = mean_power(k, k) / (leakage + noise_watts_per_user(k));
    report.rate += std::log2(1.0 + report.sjnr(k));
  }
  return report;
}

}  // namespace

SjnrReport sjnr_closed_form(const EffectiveChannels& eff, const PrecoderMatrix& precoder,
                            const RVector& beta, const RVector& noise_watts_per_user) {
  const Eigen::Index k_users = eff.h_l.cols();
  if (beta.size() != k_users || noise_watts_per_user.size() != k_users)
    throw std::invalid_argument("sjnr_closed_form: size mismatch");
  // User k's numerator and every one of its denominator terms carry beta_k.
  const CMatrix inner = eff.h_l.adjoint() * precoder.w;  // (u, k) = h_L,u^H w_k
  const RVector column_power = precoder.w.colwise().squaredNorm();
  SjnrReport report;
  report.method = "closed-form";
  report.sjnr.resize(k_users);
  report.rate = 0.0;
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const double jam = beta(k) * column_power(k);
    double leakage = 0.0;
    for (Eigen::Index u = 0; u < k_users; ++u) {
      if (u == k) continue;
      leakage += std::norm(inner(u, k)) + jam;
    }
    const double numerator = std::norm(inner(k, k)) + jam;
    report.sjnr(k) = numerator / (leakage + noise_watts_per_user(k));
    report.rate += std::log2(1.0 + report.sjnr(k));
  }
  return report;
}

SjnrReport sjnr_closed_form(const EffectiveChannels& eff, const PrecoderMatrix& precoder,
                            const RVector& beta, double noise_watts) {
  return sjnr_closed_form(eff, precoder, beta,
                          RVector::Constant(eff.h_l.cols(), noise_watts));
}

SjnrReport sjnr_monte_carlo(const ChannelSet& channels, const ReflectionVector& irs_state,
                            const PrecoderMatrix& precoder, double noise_watts, int n_draws,
                            RngStream& rng, const std::vector<double>& dirs_alphabet) {
  const Eigen::Index k_users = channels.h_au.cols();
  const EffectiveChannels eff = effective_channels(channels, irs_state);
  const CMatrix base = eff.h_l.adjoint() * precoder.w;  // K x K, row u = h_L,u^H W

  RMatrix mean_power;
  const Eigen::Index n_dirs = channels.h_ad.rows();
  if (n_dirs == 0) {
    mean_power = base.cwiseAbs2();
  } else {
    if (n_draws < 1) throw std::invalid_argument("sjnr_monte_carlo: need n_draws >= 1");
    if (dirs_alphabet.empty())
      throw std::invalid_argument("sjnr_monte_carlo: empty DIRS alphabet");
    const CMatrix forwarded = channels.h_ad * precoder.w;  // N_D x K
    mean_power = RMatrix::Zero(k_users, k_users);
    CVector v(n_dirs);
    for (int draw = 0; draw < n_draws; ++draw) {
      for (Eigen::Index r = 0; r < n_dirs; ++r) {
        const double phase = dirs_alphabet[rng.uniform_int(dirs_alphabet.size())];
        v(r) = Complex(std::cos(phase), std::sin(phase));
      }
      const CMatrix received = base + channels.h_du.adjoint() * (v.asDiagonal() * forwarded);
      mean_power += received.cwiseAbs2();
    }
    mean_power /= static_cast<double>(n_draws);
  }
  SjnrReport report =
      report_from_powers(mean_power, RVector::Constant(k_users, noise_watts), "monte-carlo");
  return report;
}

}  // namespace irsjam
