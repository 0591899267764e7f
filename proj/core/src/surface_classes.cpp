#include "lbmcf/surface_classes.hpp"

#include <cmath>
#include <string>

#include "lbmcf/errors.hpp"
#include "lbmcf/hermitian_core.hpp"

namespace lbmcf {

void BlowupLattice::validate() const {
  if (!(std::isfinite(L) && L > 0.0)) throw PreconditionError("lattice L must be positive");
}

double pairing(const ClassVector& a, const ClassVector& b, const BlowupLattice& lat) {
  lat.validate();
  return a.h * b.h * lat.L - a.e * b.e;
}

double cot_theta_from_classes(const ClassVector& a, const ClassVector& f, const BlowupLattice& lat) {
  const double af = pairing(a, f, lat);
  if (af == 0.0) throw BranchCutError("[alpha].[F] = 0: target phase is pi/2, cot undefined");
  return (pairing(a, a, lat) - pairing(f, f, lat)) / (2.0 * af);
}

double theta_from_classes(const ClassVector& a, const ClassVector& f, const BlowupLattice& lat) {
  const Complex z(pairing(a, a, lat) - pairing(f, f, lat), 2.0 * pairing(a, f, lat));
  return phase_from_arg(z);
}

double g_function(double s, double t, double m, double L) {
  return s * ((1.0 - m * m) * L - s * s + t * t) + 2.0 * t * (m * L - s * t);
}

GPartials g_partials(double s, double t, double m, double L) {
  GPartials p;
  p.ds = (1.0 - m * m) * L - 3.0 * s * s - t * t;
  p.dt = 2.0 * (m * L - s * t);
  return p;
}

double solve_t_of_s(double s, double m, double L, double tol) {
  if (!(s >= 0.0)) throw PreconditionError("s must be non-negative");
  if (!(L > 0.0)) throw PreconditionError("L must be positive");
  if (!(m > 0.0)) throw PreconditionError("m must be positive");
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (s == 0.0) return 0.0;

  double lo = 0.0;
  double hi = s * (m * m - 1.0) / m;
  double g_lo = g_function(s, lo, m, L);
  const double g_hi = g_function(s, hi, m, L);
  if (g_lo == 0.0) return lo;
  if (g_hi == 0.0) return hi;
  if ((g_lo < 0.0) == (g_hi < 0.0)) {
    throw NumericalError("no sign change of G(" + std::to_string(s) + ", t) on [0, " +
                         std::to_string(hi) + "]; s is outside the local regime");
  }

  for (int i = 0; i < 200 && (hi - lo) > 1e-8 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = g_function(s, mid, m, L);
    if (g_mid == 0.0) return mid;
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }

  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 50; ++i) {
    const double g = g_function(s, t, m, L);
    if (std::abs(g) < tol) return t;
    const double d = g_partials(s, t, m, L).dt;
    if (d == 0.0) break;
    const double next = t - g / d;
    if (next == t) break;
    t = next;
  }
  if (std::abs(g_function(s, t, m, L)) < tol) return t;
  throw NumericalError("t(s) refinement did not reach |G| < " + std::to_string(tol));
}

BlowupFamily blowup_family(double s, double t, double m, const BlowupLattice& lat) {
  BlowupFamily f;
  f.upsilon = {1.0, -s};
  f.gamma = {m, -t};
  f.M = pairing(f.upsilon, f.upsilon, lat);
  f.N = pairing(f.gamma, f.gamma, lat);
  f.S = pairing(f.upsilon, f.gamma, lat);
  return f;
}

RayCheck ray_check(double s, double m, double L, double tol) {
  const BlowupLattice lat{L};
  RayCheck rc;
  rc.t = solve_t_of_s(s, m, L, tol);
  const BlowupFamily fam = blowup_family(s, rc.t, m, lat);
  rc.cot_theta = cot_theta_from_classes(fam.upsilon, fam.gamma, lat);
  rc.e_defect = -rc.cot_theta * s - rc.t;
  rc.h_coeff = rc.cot_theta + m;
  return rc;
}

double perturbed_cot(double delta, double M, double N, double S) {
  if (!(delta < 1.0)) throw PreconditionError("perturbed_cot requires delta < 1");
  if (S == 0.0) throw PreconditionError("perturbed_cot requires S != 0");
  const double k = 1.0 - delta;
  return (M - k * k * N) / (2.0 * k * S);
}

double perturbed_cot_slope(double M, double N, double S) {
  if (S == 0.0) throw PreconditionError("perturbed_cot_slope requires S != 0");
  return (M + N) / (2.0 * S);
}

}  // namespace lbmcf
