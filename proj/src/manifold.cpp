// SPDX-License-Identifier: Apache-2.0
#include "irsjam/manifold.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace irsjam {

void RcgSettings::validate() const {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(std::string("RcgSettings: ") + message);
  };
  require(max_iters >= 1, "max_iters must be >= 1");
  require(grad_tol > 0.0, "grad_tol must be positive");
  require(armijo_init_step > 0.0, "armijo_init_step must be positive");
  require(armijo_contraction > 0.0 && armijo_contraction < 1.0,
          "armijo_contraction must lie in (0,1)");
  require(armijo_slope > 0.0, "armijo_slope must be positive");
  require(max_backtracks >= 1, "max_backtracks must be >= 1");
  require(restart_period >= 0, "restart_period must be nonnegative");
  require(random_restarts >= 1, "random_restarts must be >= 1");
}

RcgSettings RcgSettings::from_config(const ScenarioConfig& config) {
  RcgSettings settings;
  settings.max_iters = config.rcg_max_iters;
  settings.grad_tol = config.rcg_grad_tol;
  settings.armijo_init_step = config.rcg_armijo_init_step;
  settings.armijo_contraction = config.rcg_armijo_contraction;
  settings.armijo_slope = config.rcg_armijo_slope;
  settings.max_backtracks = config.rcg_max_backtracks;
  settings.restart_period = config.rcg_restart_period;
  settings.random_restarts = config.rcg_restarts;
  return settings;
}

const char* rcg_stop_name(RcgStop reason) {
  switch (reason) {
    case RcgStop::kGradientTol: return "gradient-tol";
    case RcgStop::kMaxIters: return "max-iters";
    case RcgStop::kLineSearchStalled: return "line-search-stalled";
  }
  return "unknown";
}

EffectivePowerModel effective_power_model(const ChannelSet& channels) {
  EffectivePowerModel model;
  const Eigen::Index k_users = channels.h_au.cols();
  const Eigen::Index n_irs = channels.h_ai.rows();
  model.direct = channels.h_au.conjugate();
  model.cascade.reserve(k_users);
  double frob2 = model.direct.squaredNorm();
  for (Eigen::Index k = 0; k < k_users; ++k) {
    CMatrix m;
    if (n_irs > 0) {
      m = channels.h_iu.col(k).conjugate().asDiagonal() * channels.h_ai;
    } else {
      m = CMatrix::Zero(0, channels.h_au.rows());
    }
    frob2 += m.squaredNorm();
    model.cascade.push_back(std::move(m));
  }
  model.scale = frob2 > 0.0 ? std::sqrt(frob2) : 1.0;
  if (model.scale > 0.0 && model.scale != 1.0) {
    model.direct /= model.scale;
    for (auto& m : model.cascade) m /= model.scale;
  }
  return model;
}

namespace {

void check_unit_modulus(const CVector& v) {
  for (Eigen::Index r = 0; r < v.size(); ++r) {
    if (std::abs(std::abs(v(r)) - 1.0) > 1e-6)
      throw std::invalid_argument("effective_power: input is not unit modulus at element " +
                                  std::to_string(r));
  }
}

// Unit-scale P_E; multiply by scale^2 for physical units.
double power_unit(const CVector& v, const EffectivePowerModel& model) {
  double total = 0.0;
  for (size_t k = 0; k < model.cascade.size(); ++k) {
    const CVector u = model.cascade[k].transpose() * v + model.direct.col(k);
    total += u.squaredNorm();
  }
  return total;
}

CVector gradient_unit(const CVector& v, const EffectivePowerModel& model) {
  CVector grad = CVector::Zero(v.size());
  for (size_t k = 0; k < model.cascade.size(); ++k) {
    const CVector u = model.cascade[k].transpose() * v + model.direct.col(k);
    grad += 2.0 * (model.cascade[k].conjugate() * u);
  }
  return grad;
}

}  // namespace

double effective_power(const CVector& v, const EffectivePowerModel& model) {
  check_unit_modulus(v);
  return power_unit(v, model) * model.scale * model.scale;
}

double effective_power_ambient(const CVector& v, const EffectivePowerModel& model) {
  return power_unit(v, model) * model.scale * model.scale;
}

double effective_power(const CVector& v, const ChannelSet& channels) {
  return effective_power(v, effective_power_model(channels));
}

CVector euclidean_gradient(const CVector& v, const EffectivePowerModel& model) {
  return gradient_unit(v, model) * model.scale * model.scale;
}

CVector euclidean_gradient(const CVector& v, const ChannelSet& channels) {
  return euclidean_gradient(v, effective_power_model(channels));
}

CVector tangent_project(const CVector& ambient, const CVector& v) {
  if (ambient.size() != v.size()) throw std::invalid_argument("tangent_project: size mismatch");
  CVector out(v.size());
  for (Eigen::Index r = 0; r < v.size(); ++r) {
    const double radial = std::real(ambient(r) * std::conj(v(r)));
    out(r) = ambient(r) - radial * v(r);
  }
  return out;
}

CVector riemannian_gradient(const CVector& euclidean, const CVector& v) {
  return tangent_project(euclidean, v);
}

CVector conjugate_direction(const CVector& grad, const CVector& prev_dir,
                            const CVector& prev_grad, const CVector& v) {
  if (prev_dir.size() == 0 || prev_grad.size() == 0) return -grad;
  const CVector transported_grad = tangent_project(prev_grad, v);
  const double denom = prev_grad.squaredNorm();
  double beta = 0.0;
  if (denom > 0.0) {
    const double pr = (grad.dot(grad) - grad.dot(transported_grad)).real();
    beta = std::max(0.0, pr / denom);
  }
  return -grad + beta * tangent_project(prev_dir, v);
}

CVector retract_step(const CVector& v, const CVector& direction, double step) {
  if (v.size() != direction.size()) throw std::invalid_argument("retract_step: size mismatch");
  double current = step;
  for (int attempt = 0; attempt < 64; ++attempt) {
    CVector out(v.size());
    bool ok = true;
    for (Eigen::Index r = 0; r < v.size(); ++r) {
      const Complex moved = v(r) + current * direction(r);
      const double mag = std::abs(moved);
      if (!(mag > 0.0) || !std::isfinite(mag)) {
        ok = false;
        break;
      }
      out(r) = moved / mag;
    }
    if (ok) return out;
    current *= 0.5;
  }
  throw std::runtime_error("retract_step: could not find a valid step");
}

namespace {

struct RcgRun {
  CVector v;
  double power = 0.0;  // unit-scale
  RcgTrace trace;
};

RcgRun rcg_single_run(const EffectivePowerModel& model, const RcgSettings& settings,
                      const CVector& v0) {
  const Eigen::Index n = v0.size();
  const double scale2 = model.scale * model.scale;
  const int restart_every = settings.restart_period > 0 ? settings.restart_period
                                                        : static_cast<int>(std::max<Eigen::Index>(n, 1));
  // Descent convention: minimize f = -P_E on the unit-scale model.
  auto objective = [&](const CVector& v) { return -power_unit(v, model); };
  auto gradient_f = [&](const CVector& v) {
    return riemannian_gradient(CVector(-gradient_unit(v, model)), v);
  };

  RcgRun run;
  run.v = v0;
  double f = objective(run.v);
  CVector grad = gradient_f(run.v);
  run.trace.power.push_back(-f * scale2);
  run.trace.grad_norm.push_back(grad.norm());
  run.trace.step.push_back(0.0);

  const double tol = settings.grad_tol * std::sqrt(static_cast<double>(std::max<Eigen::Index>(n, 1)));
  if (grad.norm() <= tol) {
    run.trace.reason = RcgStop::kGradientTol;
    run.power = -f;
    return run;
  }

  CVector prev_dir;
  CVector prev_grad;
  double last_step = 0.0;
  int since_restart = 0;
  run.trace.reason = RcgStop::kMaxIters;

  for (int iter = 0; iter < settings.max_iters; ++iter) {
    CVector dir;
    bool steepest = prev_dir.size() == 0 || since_restart >= restart_every;
    if (steepest) {
      dir = -grad;
      since_restart = 0;
    } else {
      dir = conjugate_direction(grad, prev_dir, prev_grad, run.v);
    }
    double slope = grad.dot(dir).real();
    if (slope >= 0.0) {  // not a descent direction: fall back to steepest
      dir = -grad;
      slope = -grad.squaredNorm();
      steepest = true;
      since_restart = 0;
    }

    const double dir_norm = dir.norm();
    if (!(dir_norm > 0.0)) {
      run.trace.reason = RcgStop::kGradientTol;
      break;
    }
    // Scale-invariant initial trial step: first candidate moves the iterate
    // by about armijo_init_step * ||v||; afterwards warm-start from twice the
    // last accepted step, as backtracking line searches commonly do.
    const double cap = settings.armijo_init_step *
                       std::sqrt(static_cast<double>(std::max<Eigen::Index>(n, 1))) / dir_norm;
    double step = last_step > 0.0 ? std::min(2.0 * last_step, cap) : cap;

    bool accepted = false;
    CVector v_next;
    double f_next = 0.0;
    for (int backtrack = 0; backtrack < settings.max_backtracks; ++backtrack) {
      v_next = retract_step(run.v, dir, step);
      f_next = objective(v_next);
      if (f_next <= f + settings.armijo_slope * step * slope) {
        accepted = true;
        break;
      }
      step *= settings.armijo_contraction;
    }

    if (!accepted) {
      if (!steepest) {
        // Retry this iteration along steepest descent before giving up.
        prev_dir.resize(0);
        prev_grad.resize(0);
        since_restart = restart_every;  // force steepest next pass
        continue;
      }
      run.trace.reason = RcgStop::kLineSearchStalled;
      break;
    }

    prev_dir = dir;
    prev_grad = grad;
    run.v = v_next;
    f = f_next;
    grad = gradient_f(run.v);
    last_step = step;
    ++since_restart;

    run.trace.power.push_back(-f * scale2);
    run.trace.grad_norm.push_back(grad.norm());
    run.trace.step.push_back(step);

    if (grad.norm() <= tol) {
      run.trace.reason = RcgStop::kGradientTol;
      break;
    }
  }
  run.power = -f;
  return run;
}

}  // namespace

std::pair<ReflectionVector, RcgTrace> rcg_optimize(const ChannelSet& channels,
                                                   const RcgSettings& settings,
                                                   const ReflectionVector& init,
                                                   RngStream* restart_rng) {
  settings.validate();
  const EffectivePowerModel model = effective_power_model(channels);
  const Eigen::Index n = channels.h_ai.rows();
  if (init.size() != n) throw std::invalid_argument("rcg_optimize: init size mismatch");

  RcgRun best = rcg_single_run(model, settings, init.values());
  for (int r = 1; r < settings.random_restarts && restart_rng != nullptr; ++r) {
    CVector v0(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double phase = 2.0 * kPi * restart_rng->uniform();
      v0(i) = Complex(std::cos(phase), std::sin(phase));
    }
    RcgRun candidate = rcg_single_run(model, settings, v0);
    if (candidate.power > best.power) best = std::move(candidate);
  }

  ReflectionVector result;
  result.phases.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) result.phases(i) = std::arg(best.v(i));
  return {result, best.trace};
}

ReflectionVector project_discrete(const ReflectionVector& v_continuous,
                                  const std::vector<double>& alphabet) {
  if (alphabet.empty()) throw std::invalid_argument("project_discrete: empty alphabet");
  ReflectionVector out;
  out.alphabet = alphabet;
  out.phases.resize(v_continuous.size());
  for (int r = 0; r < v_continuous.size(); ++r) {
    const double target = v_continuous.phases(r);
    double best_dist = std::numeric_limits<double>::infinity();
    double best_phase = alphabet.front();
    for (double candidate : alphabet) {
      double diff = std::fmod(target - candidate, 2.0 * kPi);
      if (diff < -kPi) diff += 2.0 * kPi;
      if (diff > kPi) diff -= 2.0 * kPi;
      const double dist = std::abs(diff);
      if (dist < best_dist) {  // strict: exact ties keep the earlier index
        best_dist = dist;
        best_phase = candidate;
      }
    }
    out.phases(r) = best_phase;
  }
  return out;
}

std::string format_rcg_trace_csv(const RcgTrace& trace) {
  std::ostringstream out;
  out << "iter,p_e,grad_norm,step\n";
  char buffer[160];
  for (size_t i = 0; i < trace.power.size(); ++i) {
    std::snprintf(buffer, sizeof(buffer), "%zu,%.12g,%.12g,%.12g\n", i, trace.power[i],
                  trace.grad_norm[i], trace.step[i]);
    out << buffer;
  }
  out << "# termination = " << rcg_stop_name(trace.reason) << "\n";
  return out.str();
}

void write_rcg_trace_csv(const RcgTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_rcg_trace_csv: cannot open '" + path + "'");
  out << format_rcg_trace_csv(trace);
  if (!out) throw std::runtime_error("write_rcg_trace_csv: write failed for '" + path + "'");
}

}  // namespace irsjam
