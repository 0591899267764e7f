#pragma once

namespace lbmcf {

/// Rank-2 intersection lattice of a surface blown up at one point, with basis
/// H (pullback of [alpha]) and the exceptional class E: H.H = L, E.E = -1,
/// H.E = 0.
struct BlowupLattice {
  double L = 1.0;

  /// Throws PreconditionError unless L is finite and positive.
  void validate() const;
};

/// The class h * H + e * E.
struct ClassVector {
  double h = 0.0;
  double e = 0.0;
};

double pairing(const ClassVector& a, const ClassVector& b, const BlowupLattice& lat);

/// ([a]^2 - [f]^2) / (2 [a].[f]); throws BranchCutError when [a].[f] == 0
/// (the target phase is exactly pi/2 there and cot is undefined).
double cot_theta_from_classes(const ClassVector& a, const ClassVector& f, const BlowupLattice& lat);

/// Arg Z with Z = ([a]^2 - [f]^2) + 2i [a].[f], so the quadrant comes from the
/// signs of both parts rather than from cot alone. Throws BranchCutError on
/// (-inf, 0].
double theta_from_classes(const ClassVector& a, const ClassVector& f, const BlowupLattice& lat);

/// G(s, t) = s[(1 - m^2)L - s^2 + t^2] + 2t(mL - st).
double g_function(double s, double t, double m, double L);

struct GPartials {
  double ds = 0.0;
  double dt = 0.0;
};

GPartials g_partials(double s, double t, double m, double L);

/// Root t(s) of G(s, .) on [0, s(m^2 - 1)/m]: bisection down to a narrow
/// bracket, then Newton until |G| < tol. Throws NumericalError when the
/// bracket carries no sign change (s outside the local regime).
double solve_t_of_s(double s, double m, double L, double tol = 1e-14);

/// The pair of classes Upsilon = H - sE and Gamma = mH - tE.
struct BlowupFamily {
  ClassVector upsilon;
  ClassVector gamma;
  double M = 0.0;  // Upsilon^2
  double N = 0.0;  // Gamma^2
  double S = 0.0;  // Upsilon.Gamma
};

BlowupFamily blowup_family(double s, double t, double m, const BlowupLattice& lat);

struct RayCheck {
  double t = 0.0;
  double cot_theta = 0.0;
  double e_defect = 0.0;  // -cot * s - t, the E-coefficient of cot*Upsilon + Gamma
  double h_coeff = 0.0;   // cot + m, the H-coefficient
};

/// Solves t(s) and checks that cot(Upsilon, Gamma) Upsilon + Gamma lies on the
/// ray spanned by H.
RayCheck ray_check(double s, double m, double L, double tol = 1e-14);

/// (M - (1 - d)^2 N) / (2 (1 - d) S); throws PreconditionError for d >= 1 or
/// S == 0.
double perturbed_cot(double delta, double M, double N, double S);

/// (M + N) / (2 S), the derivative of perturbed_cot at delta = 0.
double perturbed_cot_slope(double M, double N, double S);

}  // namespace lbmcf
