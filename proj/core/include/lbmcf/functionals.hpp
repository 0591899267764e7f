#pragma once

#include <vector>

#include "lbmcf/hermitian_core.hpp"
#include "lbmcf/torus_fields.hpp"

namespace lbmcf {

/// User-facing description of the background data (alpha, F-hat).
struct BackgroundSpec {
  Mat2 alpha = Mat2::Identity();
  Mat2 f_hat_const = 3.0 * Mat2::Identity();
  double bump_amplitude = 0.0;
  std::vector<TrigProduct> bump_modes;
};

/// Background forms on the torus: constant alpha, F-hat = f_hat_const +
/// i ddbar(f_hat_bump), and the frozen target phase derived from
/// Z = integral of (alpha + i F-hat)^2.
struct Background {
  AlphaFrame frame{Mat2::Identity()};
  Mat2 f_hat_const = Mat2::Zero();
  ScalarField f_hat_bump;
  HermitianField f_hat;  // pointwise F-hat
  Complex z;
  double theta_hat = 0.0;
  double cot_theta_hat = 0.0;

  const Mat2& alpha() const { return frame.alpha(); }
  const GridSpec& grid() const { return f_hat.grid(); }
};

/// Builds the background on `grid`; computes Z and theta_hat once.
Background make_background(const GridSpec& grid, const BackgroundSpec& spec);
Background make_background(const Mat2& alpha, const Mat2& f_hat_const, const ScalarField& bump);

struct ZTheta {
  Complex z;
  double theta_hat = 0.0;
  double cot_theta_hat = 0.0;
};

/// Z = integral of det(I + i alpha^{-1} F(x)) d mu_alpha with F = f_hat_const +
/// i ddbar(bump); theta_hat = Arg Z (BranchCutError if Z lies on (-inf, 0]).
ZTheta compute_z_and_theta_hat(const Mat2& alpha, const Mat2& f_hat_const, const ScalarField& bump);

// ---------------------------------------------------------------------------
// Cohomology-level arithmetic for constant representatives on the unit torus
// ---------------------------------------------------------------------------

/// Intersection pairing of the classes of two constant (1,1)-forms A, B:
/// integral of A ^ B = 8 * (1/2)(A11 B22 + A22 B11 - A12 B21 - A21 B12).
double class_pairing(const Mat2& a, const Mat2& b);

struct ClassData {
  double aa = 0.0;  // [alpha]^2
  double ff = 0.0;  // [F]^2
  double af = 0.0;  // [alpha].[F]

  Complex z() const { return {aa - ff, 2.0 * af}; }
  /// ([alpha]^2 - [F]^2) / (2 [alpha].[F]).
  double cot_theta_hat() const;
};

ClassData class_data(const Mat2& alpha, const Mat2& f);

/// Both sides of the two class identities satisfied by Omega-hat =
/// cot(theta_hat)[alpha] + [F-hat].
struct OmegaIdentities {
  double omega_sq = 0.0;        // [Omega]^2
  double omega_sq_rhs = 0.0;    // (1 + cot^2)[alpha]^2
  double omega_dot_f = 0.0;     // [Omega].[F]
  double omega_dot_f_rhs = 0.0; // ([alpha]^2 + [F]^2)/2
};

OmegaIdentities omega_identities(const ClassData& c);

// ---------------------------------------------------------------------------
// Pointwise phase data of a potential
// ---------------------------------------------------------------------------

/// Pointwise cache for phi: F = F-hat + i ddbar phi and its phase data.
struct PhaseField {
  GridSpec grid;
  std::vector<Mat2> f;
  std::vector<PencilEigenvalues> lambda;
  std::vector<double> theta;
  std::vector<Complex> zeta;
  std::vector<double> v;
  std::vector<Mat2> eta_inv;

  std::size_t size() const { return theta.size(); }
  double theta_min() const;
  double theta_max() const;
  double v_max() const;
  /// Index of the first point that is not hypercritical, or size() if none.
  std::size_t first_non_hypercritical() const;
};

PhaseField compute_phase_field(const ScalarField& phi, const Background& bg);

/// Pointwise delta Theta for a change dF of the curvature form:
/// tr(eta^{-1} dF) at every point (the linearization Delta_eta of the phase).
ScalarField eta_laplacian(const PhaseField& pf, const ScalarField& psi);

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

/// (1/3) sum_{j=0}^{2} integral phi (alpha + i F_phi)^j ^ (alpha + i F-hat)^{2-j}.
Complex cy_complex(const ScalarField& phi, const Background& bg);
Complex cy_complex(const ScalarField& phi, const PhaseField& pf, const Background& bg);

/// Im CY (the real part of e^{-i pi/2} CY).
double i_functional(const ScalarField& phi, const Background& bg);
/// -Im(e^{-i theta_hat} CY).
double j_functional(const ScalarField& phi, const Background& bg);

double volume_functional(const ScalarField& phi, const Background& bg);
double volume_functional(const PhaseField& pf, const Background& bg);

/// integral |d Theta|^2_eta v alpha^2.
double dissipation(const ScalarField& phi, const Background& bg);
double dissipation(const PhaseField& pf, const Background& bg);

struct DhymResidual {
  double sup = 0.0;
  double l2 = 0.0;
};

/// r = Im(e^{-i theta_hat} zeta): sup |r| and (integral r^2 d mu_alpha)^{1/2}.
DhymResidual dhym_residual(const ScalarField& phi, const Background& bg);
DhymResidual dhym_residual(const PhaseField& pf, const Background& bg);

/// sup over the grid of |det(alpha^{-1}(cot theta_hat alpha + F)) - (1 + cot^2)|.
double ma_residual(const ScalarField& phi, const Background& bg);
double ma_residual(const PhaseField& pf, const Background& bg);

/// sup over the grid of the difference between the Monge-Ampere residual and
/// its expansion 2 cot (alpha ^ F)/alpha^2 - (1 - F^2/alpha^2).
double ma_recombination_defect(const PhaseField& pf, const Background& bg);

/// sup over the grid of |(Theta - theta_hat) - arctan[(R - 1) / D]| with
/// R = (cot alpha + F)^2 / ((1 + cot^2) alpha^2) and
/// D = Re zeta sin cos + Im zeta sin^2 (angles at theta_hat). Requires a
/// hypercritical state and theta_hat in (pi/2, pi).
double phase_drift_identity(const ScalarField& phi, const Background& bg);
double phase_drift_identity(const PhaseField& pf, const Background& bg);

struct FunctionalReport {
  Complex cy;
  double i_val = 0.0;
  double j_val = 0.0;
  double v_val = 0.0;
  double dissipation = 0.0;
  double res_dhym_sup = 0.0;
  double res_dhym_l2 = 0.0;
  double res_ma_sup = 0.0;
};

FunctionalReport functional_report(const ScalarField& phi, const PhaseField& pf,
                                   const Background& bg);

}  // namespace lbmcf
