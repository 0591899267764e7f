#include "lbmcf/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lbmcf/errors.hpp"
#include "lbmcf/parallel.hpp"

namespace lbmcf {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_4d(const GridSpec& grid) {
  if (grid.dims() != 4) throw PreconditionError("functionals need a 4-dimensional grid");
}

Complex integrate_complex(const GridSpec& grid, const Mat2& alpha,
                          const std::function<Complex(std::size_t)>& term) {
  // Materialize once so the two reductions see identical values.
  std::vector<Complex> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) values[i] = term(i);
  });
  const double re = grid_mean(grid, [&](std::size_t i) { return values[i].real(); });
  const double im = grid_mean(grid, [&](std::size_t i) { return values[i].imag(); });
  return Complex(re, im) * volume_density(alpha);
}

double integrate_real(const GridSpec& grid, const Mat2& alpha,
                      const std::function<double(std::size_t)>& term) {
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) values[i] = term(i);
  });
  return grid_mean(grid, [&](std::size_t i) { return values[i]; }) * volume_density(alpha);
}

Mat2 inverse2(const Mat2& m) {
  const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Mat2 inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  inv /= det;
  return 0.5 * (inv + inv.adjoint());
}

}  // namespace

// ---------------------------------------------------------------------------
// Background

ZTheta compute_z_and_theta_hat(const Mat2& alpha, const Mat2& f_hat_const, const ScalarField& bump) {
  require_4d(bump.grid());
  const AlphaFrame frame(alpha);
  const Mat2 f0 = hermitize(f_hat_const, "f_hat_const");
  const HermitianField h = complex_hessian(bump);
  const Complex z = integrate_complex(bump.grid(), frame.alpha(), [&](std::size_t i) {
    return frame.det_ratio(frame.alpha() + kI * (f0 + h[i]));
  });
  ZTheta out;
  out.z = z;
  out.theta_hat = phase_from_arg(z);
  out.cot_theta_hat = z.real() / z.imag();
  return out;
}

Background make_background(const Mat2& alpha, const Mat2& f_hat_const, const ScalarField& bump) {
  require_4d(bump.grid());
  Background bg;
  bg.frame = AlphaFrame(alpha);
  bg.f_hat_const = hermitize(f_hat_const, "f_hat_const");
  bg.f_hat_bump = bump;
  const HermitianField h = complex_hessian(bump);
  bg.f_hat = HermitianField(bump.grid());
  for (std::size_t i = 0; i < h.size(); ++i) bg.f_hat[i] = bg.f_hat_const + h[i];
  const ZTheta zt = compute_z_and_theta_hat(alpha, f_hat_const, bump);
  bg.z = zt.z;
  bg.theta_hat = zt.theta_hat;
  bg.cot_theta_hat = zt.cot_theta_hat;
  return bg;
}

Background make_background(const GridSpec& grid, const BackgroundSpec& spec) {
  return make_background(spec.alpha, spec.f_hat_const,
                         synthesize(grid, spec.bump_amplitude, spec.bump_modes));
}

// ---------------------------------------------------------------------------
// Class arithmetic

double class_pairing(const Mat2& a, const Mat2& b) {
  const Complex mixed = a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - a(0, 1) * b(1, 0) - a(1, 0) * b(0, 1);
  return 4.0 * mixed.real();
}

double ClassData::cot_theta_hat() const {
  if (af == 0.0) throw BranchCutError("[alpha].[F] = 0: theta_hat = pi/2, cot undefined");
  return (aa - ff) / (2.0 * af);
}

ClassData class_data(const Mat2& alpha, const Mat2& f) {
  return {class_pairing(alpha, alpha), class_pairing(f, f), class_pairing(alpha, f)};
}

OmegaIdentities omega_identities(const ClassData& c) {
  const double cot = c.cot_theta_hat();
  OmegaIdentities out;
  out.omega_sq = cot * cot * c.aa + 2.0 * cot * c.af + c.ff;
  out.omega_sq_rhs = (1.0 + cot * cot) * c.aa;
  out.omega_dot_f = cot * c.af + c.ff;
  out.omega_dot_f_rhs = 0.5 * (c.aa + c.ff);
  return out;
}

// ---------------------------------------------------------------------------
// Phase field

double PhaseField::theta_min() const { return *std::min_element(theta.begin(), theta.end()); }
double PhaseField::theta_max() const { return *std::max_element(theta.begin(), theta.end()); }
double PhaseField::v_max() const { return *std::max_element(v.begin(), v.end()); }

std::size_t PhaseField::first_non_hypercritical() const {
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!hypercritical(lambda[i])) return i;
  }
  return lambda.size();
}

PhaseField compute_phase_field(const ScalarField& phi, const Background& bg) {
  if (!(phi.grid() == bg.grid())) throw PreconditionError("potential and background grids differ");
  const HermitianField h = complex_hessian(phi);
  PhaseField pf;
  pf.grid = phi.grid();
  const std::size_t n = phi.size();
  pf.f.resize(n);
  pf.lambda.resize(n);
  pf.theta.resize(n);
  pf.zeta.resize(n);
  pf.v.resize(n);
  pf.eta_inv.resize(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Mat2 f = bg.f_hat[i] + h[i];
      const PhasePoint p = bg.frame.phase_point(f);
      pf.f[i] = f;
      pf.lambda[i] = p.lambda;
      pf.theta[i] = p.theta;
      pf.zeta[i] = p.zeta;
      pf.v[i] = p.v;
      pf.eta_inv[i] = inverse2(p.eta);
    }
  });
  return pf;
}

ScalarField eta_laplacian(const PhaseField& pf, const ScalarField& psi) {
  const HermitianField h = complex_hessian(psi);
  ScalarField out(psi.grid());
  parallel_for(psi.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = (pf.eta_inv[i] * h[i]).trace().real();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Functionals

Complex cy_complex(const ScalarField& phi, const PhaseField& pf, const Background& bg) {
  const Mat2& a = bg.alpha();
  return integrate_complex(phi.grid(), a, [&](std::size_t i) {
    const Mat2 p = a + kI * pf.f[i];        // alpha + i F_phi
    const Mat2 q = a + kI * bg.f_hat[i];    // alpha + i F-hat
    const Complex pp = bg.frame.det_ratio(p);
    const Complex qq = bg.frame.det_ratio(q);
    const Complex pq = 0.5 * (bg.frame.det_ratio(p + q) - pp - qq);
    return phi[i] * (qq + pq + pp) / 3.0;
  });
}

Complex cy_complex(const ScalarField& phi, const Background& bg) {
  return cy_complex(phi, compute_phase_field(phi, bg), bg);
}

double i_functional(const ScalarField& phi, const Background& bg) {
  return cy_complex(phi, bg).imag();
}

double j_functional(const ScalarField& phi, const Background& bg) {
  return -(std::exp(-kI * bg.theta_hat) * cy_complex(phi, bg)).imag();
}

// Integral of v, evaluated as |Z| plus the integral of v - Re(e^{-i theta_hat} zeta)
// = 2 v sin^2((Theta - theta_hat)/2). The grid integral of zeta equals Z exactly,
// so the two agree, but the excess keeps full relative precision as the flow
// settles, where summing v directly loses it to rounding in a near-constant sum.
double volume_functional(const PhaseField& pf, const Background& bg) {
  const double excess = integrate_real(pf.grid, bg.alpha(), [&](std::size_t i) {
    const double s = std::sin(0.5 * (pf.theta[i] - bg.theta_hat));
    return 2.0 * pf.v[i] * s * s;
  });
  return std::abs(bg.z) + excess;
}

double volume_functional(const ScalarField& phi, const Background& bg) {
  return volume_functional(compute_phase_field(phi, bg), bg);
}

double dissipation(const PhaseField& pf, const Background& bg) {
  ScalarField theta(pf.grid, pf.theta);
  theta += -bg.theta_hat;
  const auto grad = gradient_z(theta);
  return integrate_real(pf.grid, bg.alpha(), [&](std::size_t i) {
    Eigen::Vector2cd a(grad[0][i], grad[1][i]);
    const double q = (a.adjoint() * pf.eta_inv[i] * a)(0, 0).real();
    return q * pf.v[i];
  });
}

double dissipation(const ScalarField& phi, const Background& bg) {
  return dissipation(compute_phase_field(phi, bg), bg);
}

DhymResidual dhym_residual(const PhaseField& pf, const Background& bg) {
  const Complex rot = std::exp(-kI * bg.theta_hat);
  std::vector<double> r(pf.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (rot * pf.zeta[i]).imag();
  DhymResidual out;
  for (const double x : r) out.sup = std::max(out.sup, std::abs(x));
  out.l2 = std::sqrt(integrate_real(pf.grid, bg.alpha(), [&](std::size_t i) { return r[i] * r[i]; }));
  return out;
}

DhymResidual dhym_residual(const ScalarField& phi, const Background& bg) {
  return dhym_residual(compute_phase_field(phi, bg), bg);
}

double ma_residual(const PhaseField& pf, const Background& bg) {
  const double cot = bg.cot_theta_hat;
  const Mat2 shift = cot * bg.alpha();
  double sup = 0.0;
  for (std::size_t i = 0; i < pf.size(); ++i) {
    const double m = bg.frame.det_ratio(shift + pf.f[i]).real() - (1.0 + cot * cot);
    sup = std::max(sup, std::abs(m));
  }
  return sup;
}

double ma_residual(const ScalarField& phi, const Background& bg) {
  return ma_residual(compute_phase_field(phi, bg), bg);
}

double ma_recombination_defect(const PhaseField& pf, const Background& bg) {
  const double cot = bg.cot_theta_hat;
  const Mat2 shift = cot * bg.alpha();
  double sup = 0.0;
  for (std::size_t i = 0; i < pf.size(); ++i) {
    const double m = bg.frame.det_ratio(shift + pf.f[i]).real() - (1.0 + cot * cot);
    const double alpha_wedge_f = 0.5 * (bg.frame.alpha_inv() * pf.f[i]).trace().real();
    const double f_sq = bg.frame.det_ratio(pf.f[i]).real();
    const double recombined = 2.0 * cot * alpha_wedge_f - (1.0 - f_sq);
    sup = std::max(sup, std::abs(m - recombined));
  }
  return sup;
}

double phase_drift_identity(const PhaseField& pf, const Background& bg) {
  constexpr double kPi = std::numbers::pi;
  if (!(bg.theta_hat > kPi / 2 && bg.theta_hat < kPi)) {
    throw PreconditionError("phase_drift_identity needs theta_hat in (pi/2, pi)");
  }
  const std::size_t bad = pf.first_non_hypercritical();
  if (bad != pf.size()) {
    throw PreconditionError("phase_drift_identity: point " + std::to_string(bad) +
                            " is not hypercritical");
  }
  const double s = std::sin(bg.theta_hat);
  const double c = std::cos(bg.theta_hat);
  const double cot = bg.cot_theta_hat;
  const Mat2 shift = cot * bg.alpha();
  double sup = 0.0;
  for (std::size_t i = 0; i < pf.size(); ++i) {
    const double ratio = bg.frame.det_ratio(shift + pf.f[i]).real() / (1.0 + cot * cot);
    const double denom = pf.zeta[i].real() * s * c + pf.zeta[i].imag() * s * s;
    const double rhs = std::atan((ratio - 1.0) / denom);
    sup = std::max(sup, std::abs((pf.theta[i] - bg.theta_hat) - rhs));
  }
  return sup;
}

double phase_drift_identity(const ScalarField& phi, const Background& bg) {
  return phase_drift_identity(compute_phase_field(phi, bg), bg);
}

FunctionalReport functional_report(const ScalarField& phi, const PhaseField& pf,
                                   const Background& bg) {
  FunctionalReport rep;
  rep.cy = cy_complex(phi, pf, bg);
  rep.i_val = rep.cy.imag();
  rep.j_val = -(std::exp(-kI * bg.theta_hat) * rep.cy).imag();
  rep.v_val = volume_functional(pf, bg);
  rep.dissipation = dissipation(pf, bg);
  const DhymResidual r = dhym_residual(pf, bg);
  rep.res_dhym_sup = r.sup;
  rep.res_dhym_l2 = r.l2;
  rep.res_ma_sup = ma_residual(pf, bg);
  return rep;
}

}  // namespace lbmcf
