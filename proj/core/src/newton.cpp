#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/LU>

#include "lbmcf/errors.hpp"
#include "lbmcf/flow_engine.hpp"
#include "lbmcf/parallel.hpp"

namespace lbmcf {

namespace {

double dot(const ScalarField& a, const ScalarField& b) {
  return deterministic_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double norm(const ScalarField& a) { return std::sqrt(dot(a, a)); }

void remove_mean(ScalarField& f) { f += -f.mean(); }

ScalarField phase_residual(const PhaseField& pf, const Background& bg) {
  ScalarField r(pf.grid);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = pf.theta[i] - bg.theta_hat;
  return r;
}

double sup_abs(const ScalarField& f) { return f.max_abs(); }

struct LinearSolve {
  ScalarField x;
  int iterations = 0;
};

/// Right-preconditioned BiCGSTAB for A x = b on the zero-mean subspace.
LinearSolve bicgstab(const std::function<ScalarField(const ScalarField&)>& apply,
                     const std::function<ScalarField(const ScalarField&)>& precondition,
                     const ScalarField& b, double rel_tol, int max_iterations) {
  LinearSolve out;
  out.x = ScalarField(b.grid());
  const double b_norm = norm(b);
  if (b_norm == 0.0) return out;
  const double target = rel_tol * b_norm;

  ScalarField r = b;
  const ScalarField r_hat = b;
  ScalarField p(b.grid());
  ScalarField v(b.grid());
  double rho = 1.0;
  double alpha = 1.0;
  double omega = 1.0;

  for (int it = 1; it <= max_iterations; ++it) {
    out.iterations = it;
    const double rho_next = dot(r_hat, r);
    if (rho_next == 0.0) throw NumericalError("BiCGSTAB breakdown (rho = 0)");
    const double beta = (rho_next / rho) * (alpha / omega);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    const ScalarField p_hat = precondition(p);
    v = apply(p_hat);
    const double denom = dot(r_hat, v);
    if (denom == 0.0) throw NumericalError("BiCGSTAB breakdown (r_hat . v = 0)");
    alpha = rho_next / denom;
    ScalarField s = axpy(r, -alpha, v);
    if (norm(s) <= target) {
      out.x = axpy(out.x, alpha, p_hat);
      return out;
    }
    const ScalarField s_hat = precondition(s);
    const ScalarField t = apply(s_hat);
    const double tt = dot(t, t);
    if (tt == 0.0) throw NumericalError("BiCGSTAB breakdown (t = 0)");
    omega = dot(t, s) / tt;
    for (std::size_t i = 0; i < out.x.size(); ++i) {
      out.x[i] += alpha * p_hat[i] + omega * s_hat[i];
    }
    r = axpy(s, -omega, t);
    if (norm(r) <= target) return out;
    if (omega == 0.0) throw NumericalError("BiCGSTAB breakdown (omega = 0)");
    rho = rho_next;
  }
  throw NumericalError("linear solve stagnated: relative residual " +
                       std::to_string(norm(r) / b_norm) + " after " +
                       std::to_string(max_iterations) + " iterations");
}

}  // namespace

NewtonResult newton_dhym(const ScalarField& phi0, const Background& bg,
                         const NewtonOptions& options) {
  if (!(options.tol > 0.0)) throw PreconditionError("Newton tolerance must be positive");
  NewtonResult result;
  result.phi = phi0;
  remove_mean(result.phi);

  PhaseField pf = compute_phase_field(result.phi, bg);
  {
    const std::size_t bad = pf.first_non_hypercritical();
    if (bad != pf.size()) {
      throw PreconditionError("Newton start is not hypercritical at grid index " +
                              std::to_string(bad));
    }
  }
  ScalarField r = phase_residual(pf, bg);
  double r_sup = sup_abs(r);

  for (int it = 0; it < options.max_iterations; ++it) {
    if (r_sup < options.tol) break;
    NewtonIterate rec;
    rec.iteration = it;
    rec.residual_sup = r_sup;
    rec.residual_l2 = dhym_residual(pf, bg).l2;

    // Preconditioner: constant-coefficient Laplacian of the averaged eta^{-1}.
    Mat2 mean_eta_inv = Mat2::Zero();
    for (const Mat2& e : pf.eta_inv) mean_eta_inv += e;
    mean_eta_inv /= static_cast<double>(pf.size());
    const Mat2 coeff = hermitize(mean_eta_inv.inverse(), "preconditioner metric");

    auto apply = [&](const ScalarField& u) {
      ScalarField lu = eta_laplacian(pf, u);
      remove_mean(lu);
      return lu;
    };
    auto precondition = [&](const ScalarField& u) { return solve_constant_laplacian(u, coeff); };

    ScalarField b = -1.0 * r;
    remove_mean(b);
    const double forcing = std::max(1e-13, std::min(1e-3, 0.1 * r_sup));
    LinearSolve lin = bicgstab(apply, precondition, b, forcing, options.linear_max_iterations);
    remove_mean(lin.x);
    rec.linear_iterations = lin.iterations;
    {
      const ScalarField lu = eta_laplacian(pf, lin.x);
      rec.mu = grid_mean(lu.grid(), [&](std::size_t i) { return lu[i] + r[i]; });
    }

    double step_length = 1.0;
    bool accepted = false;
    bool any_hypercritical = false;
    std::size_t lost_at = pf.size();
    for (int h = 0; h <= options.max_halvings; ++h) {
      ScalarField trial = axpy(result.phi, step_length, lin.x);
      remove_mean(trial);
      if (!trial.all_finite()) throw NumericalError("non-finite Newton iterate");
      PhaseField trial_pf = compute_phase_field(trial, bg);
      const std::size_t bad = trial_pf.first_non_hypercritical();
      if (bad != trial_pf.size() && lost_at == pf.size()) lost_at = bad;
      if (bad == trial_pf.size()) {
        any_hypercritical = true;
        ScalarField trial_r = phase_residual(trial_pf, bg);
        const double trial_sup = sup_abs(trial_r);
        if (trial_sup < r_sup) {
          result.phi = std::move(trial);
          pf = std::move(trial_pf);
          r = std::move(trial_r);
          r_sup = trial_sup;
          accepted = true;
          break;
        }
      }
      step_length *= 0.5;
    }
    rec.step_length = accepted ? step_length : 0.0;
    result.history.push_back(rec);
    if (!accepted) {
      if (!any_hypercritical) {
        // Every trial left the hypercritical set; report the full-step location.
        throw HypercriticalityLost(static_cast<double>(it), lost_at, 0.0);
      }
      throw NumericalError("Newton step rejected after " + std::to_string(options.max_halvings) +
                           " halvings (sup residual " + std::to_string(r_sup) + ")");
    }
  }
  if (!(r_sup < options.tol)) {
    throw NumericalError("Newton did not converge in " + std::to_string(options.max_iterations) +
                         " iterations (sup residual " + std::to_string(r_sup) + ")");
  }
  result.residual_sup = r_sup;
  return result;
}

}  // namespace lbmcf
