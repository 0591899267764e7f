#pragma once

#include <complex>

#include <Eigen/Core>

namespace lbmcf {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

/// Largest anti-Hermitian part (absolute, scaled by max(1, |M|)) tolerated on
/// input. Anything below is symmetrized away; anything above is rejected.
inline constexpr double kHermitianTolerance = 1e-10;

/// Returns (M + M*)/2, or throws PreconditionError when M is further than
/// kHermitianTolerance from Hermitian. `what` names the matrix in the message.
Mat2 hermitize(const Mat2& m, const char* what = "matrix");

/// Builds a 2x2 Hermitian matrix from its diagonal and the (1,2) entry.
Mat2 hermitian(double a11, double a22, Complex a12 = {});

/// Eigenvalues of the pencil (F, alpha), sorted so that hi >= lo.
struct PencilEigenvalues {
  double hi = 0.0;
  double lo = 0.0;
};

/// A point's Kaehler form alpha and curvature form F, both validated Hermitian,
/// with alpha positive definite.
class HermitianPair {
 public:
  HermitianPair(const Mat2& alpha, const Mat2& f);

  const Mat2& alpha() const { return alpha_; }
  const Mat2& f() const { return f_; }

 private:
  Mat2 alpha_;
  Mat2 f_;
};

/// Pointwise phase data of a pencil.
struct PhasePoint {
  PencilEigenvalues lambda;
  double theta = 0.0;  // sum of arctan of the eigenvalues
  Complex zeta{1.0, 0.0};
  double v = 1.0;  // |zeta|
  Mat2 eta = Mat2::Identity();
};

/// Precomputed data for a fixed (constant) Kaehler form alpha, so that
/// pointwise evaluations in hot loops skip revalidating alpha.
///
/// The eigenvalue problem det(F - lambda alpha) = 0 is solved in the
/// alpha-orthonormal frame F' = L^{-1} F L^{-*} (alpha = L L*), where the
/// discriminant takes the cancellation-free form ((F'11 - F'22)/2)^2 + |F'12|^2.
class AlphaFrame {
 public:
  explicit AlphaFrame(const Mat2& alpha);

  const Mat2& alpha() const { return alpha_; }
  const Mat2& alpha_inv() const { return alpha_inv_; }
  double det_alpha() const { return det_alpha_; }

  /// F expressed in the alpha-orthonormal frame.
  Mat2 to_frame(const Mat2& f) const;

  PencilEigenvalues eigenvalues(const Mat2& f) const;

  /// alpha + F alpha^{-1} F.
  Mat2 eta(const Mat2& f) const;

  PhasePoint phase_point(const Mat2& f) const;

  /// det(alpha^{-1} P) for an arbitrary (possibly complex) 2x2 matrix P; this is
  /// the density P^2 / alpha^2 of the top form.
  Complex det_ratio(const Mat2& p) const;

 private:
  Mat2 alpha_;
  Mat2 alpha_inv_;
  Mat2 chol_inv_;  // L^{-1}
  double det_alpha_ = 1.0;
};

PencilEigenvalues pencil_eigenvalues(const HermitianPair& p);

/// arctan(lambda_1) + arctan(lambda_2), in (-pi, pi).
double lagrangian_phase(PencilEigenvalues lambda);

struct ZetaV {
  Complex zeta;
  double v = 0.0;
};

/// zeta = (1 + i lambda_1)(1 + i lambda_2) and v = |zeta|.
ZetaV zeta_v(PencilEigenvalues lambda);

/// Principal argument in (-pi, pi); throws BranchCutError on (-inf, 0].
double phase_from_arg(Complex zeta);

Mat2 eta_metric(const HermitianPair& p);

/// True iff the Lagrangian phase exceeds pi/2, i.e. both eigenvalues positive
/// with product above one.
bool hypercritical(PencilEigenvalues lambda);

PhasePoint phase_point(const HermitianPair& p);

// ---------------------------------------------------------------------------
// C-subsolution gap function
// ---------------------------------------------------------------------------

/// G(x1, x2) = sum arctan x_p - theta_hat - sum (cot theta_hat + x_p)/(1 + x_p^2)
///             + sum delta/(1 + x_p^2).
double gap_function(double x1, double x2, double theta_hat, double delta);

/// Limit of G as x1 -> infinity along x2 = -cot(theta), theta in (pi/2, pi).
double gap_limit_at_infinity(double theta, double theta_hat, double delta);

struct GapScanParams {
  double gamma = 0.1;
  double delta = 0.1;
  double theta_hat = 2.2;
  double r = 50.0;       // lower bound on x1
  double x_max = 1e4;    // upper bound on x1
  double step = 1e-3;    // grid step in (arctan x1, arctan x2)
};

struct GapScanResult {
  double minimum = 0.0;
  double x1_at_min = 0.0;
  double x2_at_min = 0.0;
  std::size_t points = 0;
};

/// Minimum of G over D n {R <= x1 <= x_max}, where
/// D = {pi/2 + gamma <= arctan x1 + arctan x2 <= pi - gamma}, scanned on a
/// uniform grid in the bounded coordinates (arctan x1, arctan x2).
GapScanResult subsolution_gap_scan(const GapScanParams& params);

/// Convenience wrapper returning only the scanned minimum.
double subsolution_gap(double gamma, double delta, double theta_hat, double r, double x_max,
                       double step);

}  // namespace lbmcf
