#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lbmcf/functionals.hpp"

namespace lbmcf {

enum class Scheme { ExplicitEuler, ExplicitRk4, Imex };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

/// Potential at one time plus its pointwise phase cache.
struct FlowState {
  double t = 0.0;
  ScalarField phi;
  PhaseField cache;
};

FlowState make_state(double t, ScalarField phi, const Background& bg);

/// One sampled row of a flow run.
struct TraceRow {
  double t = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double v_max = 0.0;
  double V = 0.0;
  double I = 0.0;
  double J = 0.0;
  double res_dhym_sup = 0.0;
  double res_dhym_l2 = 0.0;
  double res_ma_sup = 0.0;
  double dissipation = 0.0;
  double dt_used = 0.0;
};

struct FlowTrace {
  std::vector<TraceRow> rows;
};

TraceRow sample_row(const FlowState& state, const Background& bg, double dt_used);

/// Description of the initial potential: a trigonometric part plus optional
/// seeded band-limited noise.
struct InitialSpec {
  double amplitude = 0.0;
  std::vector<TrigProduct> modes;
  double noise_amplitude = 0.0;
  int noise_k_max = 2;
};

ScalarField make_initial_potential(const GridSpec& grid, const InitialSpec& init, std::uint64_t seed);

struct FlowConfig {
  int n = 16;
  BackgroundSpec background;
  InitialSpec initial;
  Scheme scheme = Scheme::ExplicitRk4;
  double cfl_sigma = 0.2;
  /// Fixed time step; 0 selects the CFL step (explicit) or 10x it (IMEX).
  double dt = 0.0;
  double t_max = 40.0;
  double residual_tol = 1e-10;
  double sample_interval = 1.0 / 128.0;
  std::uint64_t seed = 1;
  bool hypercritical = true;

  /// Throws PreconditionError on out-of-range values.
  void validate() const;
};

/// Theta - theta_hat pointwise.
ScalarField rhs(const FlowState& state, const Background& bg);

/// Largest explicit step allowed by the CFL rule
/// dt <= cfl_sigma * h^2 / max_x tr(eta^{-1}).
double cfl_time_step(const FlowState& state, double cfl_sigma);

/// Splitting constant for the IMEX scheme: the largest eigenvalue of eta^{-1}
/// in the alpha frame, maximized over the grid.
double imex_split_constant(const FlowState& state);

/// Advances the flow by dt. Explicit schemes throw NumericalError when dt
/// exceeds the CFL step; every scheme throws on non-finite values.
FlowState step(const FlowState& state, const Background& bg, double dt, Scheme scheme,
               double cfl_sigma = 0.2);

enum class RunStatus { Converged, TimeLimit };

struct RunResult {
  FlowTrace trace;
  FlowState final_state;
  Background background;
  RunStatus status = RunStatus::TimeLimit;
  std::size_t steps = 0;
};

/// Integrates until res_dhym_l2 < residual_tol or t >= t_max, recording a row
/// every sample_interval (step sizes are clipped to land on sample times) and
/// always recording the final state. Throws HypercriticalityLost when a
/// hypercritical run leaves the hypercritical set.
RunResult run(const FlowConfig& config);
RunResult run(const FlowConfig& config, const Background& bg, const ScalarField& phi0);

// ---------------------------------------------------------------------------
// Newton oracle for the elliptic equation Theta(phi) = theta_hat
// ---------------------------------------------------------------------------

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 60;
  int max_halvings = 10;
  int linear_max_iterations = 400;
};

struct NewtonIterate {
  int iteration = 0;
  double residual_sup = 0.0;  // sup |Theta - theta_hat| before the update
  double residual_l2 = 0.0;   // dhym L2 residual before the update
  double step_length = 0.0;
  int linear_iterations = 0;
  double mu = 0.0;            // constant absorbed by the solvability condition
};

struct NewtonResult {
  ScalarField phi;
  double residual_sup = 0.0;
  std::vector<NewtonIterate> history;
};

/// Solves Theta(phi) = theta_hat from a hypercritical phi0 by damped Newton
/// iteration on Delta_eta delta = -(Theta - theta_hat - mu). The linear system
/// is solved with right-preconditioned BiCGSTAB (constant-coefficient Laplacian
/// preconditioner) on the zero-mean subspace. Returns a mean-zero potential.
NewtonResult newton_dhym(const ScalarField& phi0, const Background& bg,
                         const NewtonOptions& options = {});

}  // namespace lbmcf
