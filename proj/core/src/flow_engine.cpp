#include "lbmcf/flow_engine.hpp"

#include <algorithm>
#include <cmath>

#include "lbmcf/errors.hpp"
#include "lbmcf/parallel.hpp"

namespace lbmcf {

namespace {

/// Theta - theta_hat without building the full phase cache (RK stages only
/// need the phase).
ScalarField phase_defect(const ScalarField& phi, const Background& bg) {
  const HermitianField h = complex_hessian(phi);
  ScalarField out(phi.grid());
  parallel_for(phi.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      out[i] = lagrangian_phase(bg.frame.eigenvalues(bg.f_hat[i] + h[i])) - bg.theta_hat;
    }
  });
  return out;
}

void require_finite(const ScalarField& f, double t) {
  if (!f.all_finite()) {
    throw NumericalError("non-finite potential at t=" + std::to_string(t));
  }
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
  if (name == "rk4" || name == "explicit-rk4") return Scheme::ExplicitRk4;
  if (name == "euler" || name == "explicit-euler") return Scheme::ExplicitEuler;
  if (name == "imex") return Scheme::Imex;
  throw PreconditionError("unknown scheme '" + name + "' (expected rk4, euler or imex)");
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ExplicitEuler: return "euler";
    case Scheme::ExplicitRk4: return "rk4";
    case Scheme::Imex: return "imex";
  }
  return "?";
}

FlowState make_state(double t, ScalarField phi, const Background& bg) {
  FlowState s;
  s.t = t;
  s.cache = compute_phase_field(phi, bg);
  s.phi = std::move(phi);
  return s;
}

TraceRow sample_row(const FlowState& state, const Background& bg, double dt_used) {
  const FunctionalReport rep = functional_report(state.phi, state.cache, bg);
  TraceRow row;
  row.t = state.t;
  row.theta_min = state.cache.theta_min();
  row.theta_max = state.cache.theta_max();
  row.v_max = state.cache.v_max();
  row.V = rep.v_val;
  row.I = rep.i_val;
  row.J = rep.j_val;
  row.res_dhym_sup = rep.res_dhym_sup;
  row.res_dhym_l2 = rep.res_dhym_l2;
  row.res_ma_sup = rep.res_ma_sup;
  row.dissipation = rep.dissipation;
  row.dt_used = dt_used;
  return row;
}

ScalarField make_initial_potential(const GridSpec& grid, const InitialSpec& init, std::uint64_t seed) {
  ScalarField phi = synthesize(grid, init.amplitude, init.modes);
  if (init.noise_amplitude != 0.0) {
    phi += random_band_limited(grid, init.noise_k_max, init.noise_amplitude, seed);
  }
  return phi;
}

void FlowConfig::validate() const {
  if (n < 4 || n % 2 != 0) throw PreconditionError("n must be even and >= 4");
  if (!(cfl_sigma > 0.0 && cfl_sigma <= 1.0)) throw PreconditionError("cfl_sigma must lie in (0, 1]");
  if (!(residual_tol > 0.0)) throw PreconditionError("residual_tol must be positive");
  if (!(t_max > 0.0)) throw PreconditionError("t_max must be positive");
  if (!(sample_interval > 0.0)) throw PreconditionError("sample_interval must be positive");
  if (!(dt >= 0.0)) throw PreconditionError("dt must be non-negative");
}

ScalarField rhs(const FlowState& state, const Background& bg) {
  ScalarField out(state.phi.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = state.cache.theta[i] - bg.theta_hat;
  return out;
}

double cfl_time_step(const FlowState& state, double cfl_sigma) {
  double max_trace = 0.0;
  for (const Mat2& e : state.cache.eta_inv) max_trace = std::max(max_trace, e.trace().real());
  const double h = state.phi.grid().spacing();
  return cfl_sigma * h * h / max_trace;
}

double imex_split_constant(const FlowState& state) {
  double c = 0.0;
  for (const auto& l : state.cache.lambda) {
    const double smallest = std::min(l.hi * l.hi, l.lo * l.lo);
    c = std::max(c, 1.0 / (1.0 + smallest));
  }
  return c;
}

FlowState step(const FlowState& state, const Background& bg, double dt, Scheme scheme,
               double cfl_sigma) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  const ScalarField& phi = state.phi;
  ScalarField next;
  switch (scheme) {
    case Scheme::ExplicitEuler:
    case Scheme::ExplicitRk4: {
      const double limit = cfl_time_step(state, cfl_sigma);
      if (dt > limit * (1.0 + 1e-12)) {
        throw NumericalError("CFL violation: dt=" + std::to_string(dt) +
                             " exceeds " + std::to_string(limit));
      }
      const ScalarField k1 = rhs(state, bg);
      if (scheme == Scheme::ExplicitEuler) {
        next = axpy(phi, dt, k1);
        break;
      }
      const ScalarField k2 = phase_defect(axpy(phi, 0.5 * dt, k1), bg);
      const ScalarField k3 = phase_defect(axpy(phi, 0.5 * dt, k2), bg);
      const ScalarField k4 = phase_defect(axpy(phi, dt, k3), bg);
      next = ScalarField(phi.grid());
      const double w = dt / 6.0;
      for (std::size_t i = 0; i < phi.size(); ++i) {
        next[i] = phi[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      break;
    }
    case Scheme::Imex: {
      // (1 - dt c L) phi+ = phi + dt (Theta - theta_hat - c L phi), L the alpha-Laplacian.
      const double c = imex_split_constant(state);
      const ScalarField lap = apply_constant_laplacian(phi, bg.alpha());
      ScalarField explicit_part = rhs(state, bg);
      for (std::size_t i = 0; i < phi.size(); ++i) {
        explicit_part[i] = phi[i] + dt * (explicit_part[i] - c * lap[i]);
      }
      next = solve_shifted_laplacian(explicit_part, bg.alpha(), dt * c);
      break;
    }
  }
  const double t_next = state.t + dt;
  require_finite(next, t_next);
  return make_state(t_next, std::move(next), bg);
}

RunResult run(const FlowConfig& config) {
  config.validate();
  const GridSpec grid(config.n, 4);
  const Background bg = make_background(grid, config.background);
  return run(config, bg, make_initial_potential(grid, config.initial, config.seed));
}

RunResult run(const FlowConfig& config, const Background& bg, const ScalarField& phi0) {
  config.validate();
  RunResult result;
  result.background = bg;
  FlowState state = make_state(0.0, phi0, bg);

  auto check_hypercritical = [&](const FlowState& s) {
    if (!config.hypercritical) return;
    const std::size_t bad = s.cache.first_non_hypercritical();
    if (bad != s.cache.size()) throw HypercriticalityLost(s.t, bad, s.cache.theta[bad]);
  };
  if (config.hypercritical && state.cache.first_non_hypercritical() != state.cache.size()) {
    throw PreconditionError("initial potential is not hypercritical at every grid point");
  }

  result.trace.rows.push_back(sample_row(state, bg, 0.0));
  double next_sample = config.sample_interval;
  std::size_t sample_index = 1;
  double last_dt = 0.0;
  bool last_recorded = true;

  while (true) {
    const double res_l2 = dhym_residual(state.cache, bg).l2;
    if (res_l2 < config.residual_tol) {
      result.status = RunStatus::Converged;
      break;
    }
    if (state.t >= config.t_max) {
      result.status = RunStatus::TimeLimit;
      break;
    }
    double dt = config.dt;
    if (dt == 0.0) {
      dt = cfl_time_step(state, config.cfl_sigma);
      if (config.scheme == Scheme::Imex) dt *= 10.0;
    }
    double target = state.t + dt;
    bool on_sample = false;
    if (target >= next_sample) {
      target = next_sample;
      on_sample = true;
    }
    if (target >= config.t_max) target = config.t_max;
    const double used = target - state.t;
    state = step(state, bg, used, config.scheme, config.cfl_sigma);
    state.t = target;
    ++result.steps;
    last_dt = used;
    check_hypercritical(state);
    last_recorded = false;
    if (on_sample) {
      result.trace.rows.push_back(sample_row(state, bg, used));
      last_recorded = true;
      ++sample_index;
      // Multiply rather than accumulate so sample times carry no drift.
      next_sample = static_cast<double>(sample_index) * config.sample_interval;
    }
  }
  if (!last_recorded) result.trace.rows.push_back(sample_row(state, bg, last_dt));
  result.final_state = std::move(state);
  return result;
}

}  // namespace lbmcf
