#include "lbmcf/hermitian_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lbmcf/errors.hpp"

namespace lbmcf {

Mat2 hermitize(const Mat2& m, const char* what) {
  const Mat2 adj = m.adjoint();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double skew = (m - adj).cwiseAbs().maxCoeff() * 0.5;
  if (!std::isfinite(skew) || !m.allFinite()) {
    throw PreconditionError(std::string(what) + " has non-finite entries");
  }
  if (skew > kHermitianTolerance * scale) {
    throw PreconditionError(std::string(what) + " is not Hermitian (anti-Hermitian part " +
                            std::to_string(skew) + ")");
  }
  return 0.5 * (m + adj);
}

Mat2 hermitian(double a11, double a22, Complex a12) {
  Mat2 m;
  m << Complex(a11, 0.0), a12, std::conj(a12), Complex(a22, 0.0);
  return m;
}

HermitianPair::HermitianPair(const Mat2& alpha, const Mat2& f)
    : alpha_(hermitize(alpha, "alpha")), f_(hermitize(f, "F")) {
  const double a11 = alpha_(0, 0).real();
  const double det = (alpha_(0, 0) * alpha_(1, 1) - alpha_(0, 1) * alpha_(1, 0)).real();
  if (!(a11 > 0.0) || !(det > 0.0)) {
    throw PreconditionError("alpha must be positive definite");
  }
}

AlphaFrame::AlphaFrame(const Mat2& alpha) : alpha_(hermitize(alpha, "alpha")) {
  const double a11 = alpha_(0, 0).real();
  const double a22 = alpha_(1, 1).real();
  const Complex a21 = alpha_(1, 0);
  det_alpha_ = a11 * a22 - std::norm(a21);
  if (!(a11 > 0.0) || !(det_alpha_ > 0.0)) {
    throw PreconditionError("alpha must be positive definite");
  }
  const double l11 = std::sqrt(a11);
  const Complex l21 = a21 / l11;
  const double l22 = std::sqrt(a22 - std::norm(l21));
  chol_inv_ << Complex(1.0 / l11), Complex(0.0), -l21 / (l11 * l22), Complex(1.0 / l22);
  alpha_inv_ << Complex(a22), -alpha_(0, 1), -a21, Complex(a11);
  alpha_inv_ /= det_alpha_;
}

Mat2 AlphaFrame::to_frame(const Mat2& f) const { return chol_inv_ * f * chol_inv_.adjoint(); }

PencilEigenvalues AlphaFrame::eigenvalues(const Mat2& f) const {
  // Diagonal and (1,2) entries of C F C* for the lower-triangular C = L^{-1}.
  const double c11 = chol_inv_(0, 0).real();
  const Complex c21 = chol_inv_(1, 0);
  const double c22 = chol_inv_(1, 1).real();
  const double a = f(0, 0).real();
  const double d = f(1, 1).real();
  const Complex b = f(0, 1);
  const double p = c11 * c11 * a;
  const double q = std::norm(c21) * a + c22 * c22 * d + 2.0 * c22 * (c21 * b).real();
  const Complex g12 = c11 * (a * std::conj(c21) + c22 * b);
  const double mid = 0.5 * (p + q);
  const double half_gap = 0.5 * (p - q);
  const double disc = std::sqrt(half_gap * half_gap + std::norm(g12));
  return {mid + disc, mid - disc};
}

Mat2 AlphaFrame::eta(const Mat2& f) const {
  const Mat2 e = alpha_ + f * alpha_inv_ * f;
  return 0.5 * (e + e.adjoint());
}

PhasePoint AlphaFrame::phase_point(const Mat2& f) const {
  PhasePoint out;
  out.lambda = eigenvalues(f);
  out.theta = lagrangian_phase(out.lambda);
  const ZetaV zv = zeta_v(out.lambda);
  out.zeta = zv.zeta;
  out.v = zv.v;
  out.eta = eta(f);
  return out;
}

Complex AlphaFrame::det_ratio(const Mat2& p) const {
  return (p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0)) / det_alpha_;
}

PencilEigenvalues pencil_eigenvalues(const HermitianPair& p) {
  return AlphaFrame(p.alpha()).eigenvalues(p.f());
}

double lagrangian_phase(PencilEigenvalues lambda) {
  return std::atan(lambda.hi) + std::atan(lambda.lo);
}

ZetaV zeta_v(PencilEigenvalues lambda) {
  const Complex zeta = Complex(1.0, lambda.hi) * Complex(1.0, lambda.lo);
  const double v = std::sqrt((1.0 + lambda.hi * lambda.hi) * (1.0 + lambda.lo * lambda.lo));
  return {zeta, v};
}

double phase_from_arg(Complex zeta) {
  if (zeta.imag() == 0.0 && zeta.real() <= 0.0) {
    throw BranchCutError("argument requested on the branch cut (-inf, 0]");
  }
  return std::arg(zeta);
}

Mat2 eta_metric(const HermitianPair& p) { return AlphaFrame(p.alpha()).eta(p.f()); }

bool hypercritical(PencilEigenvalues lambda) {
  return lambda.lo > 0.0 && lambda.hi * lambda.lo > 1.0;
}

PhasePoint phase_point(const HermitianPair& p) {
  return AlphaFrame(p.alpha()).phase_point(p.f());
}

double gap_function(double x1, double x2, double theta_hat, double delta) {
  const double cot_hat = std::cos(theta_hat) / std::sin(theta_hat);
  double g = std::atan(x1) + std::atan(x2) - theta_hat;
  for (const double x : {x1, x2}) {
    const double w = 1.0 / (1.0 + x * x);
    g += (delta - cot_hat - x) * w;
  }
  return g;
}

double gap_limit_at_infinity(double theta, double theta_hat, double delta) {
  const double x2 = -std::cos(theta) / std::sin(theta);
  const double cot_hat = std::cos(theta_hat) / std::sin(theta_hat);
  const double w = 1.0 / (1.0 + x2 * x2);
  return std::numbers::pi / 2 + std::atan(x2) - theta_hat + (delta - cot_hat - x2) * w;
}

GapScanResult subsolution_gap_scan(const GapScanParams& prm) {
  constexpr double kPi = std::numbers::pi;
  if (!(prm.gamma > 0.0) || !(prm.delta > 0.0)) {
    throw PreconditionError("subsolution_gap: gamma and delta must be positive");
  }
  if (prm.theta_hat < kPi / 2 + prm.gamma || prm.theta_hat > kPi - prm.gamma) {
    throw PreconditionError("subsolution_gap: theta_hat outside [pi/2 + gamma, pi - gamma]");
  }
  if (!(prm.r < prm.x_max) || !(prm.step > 0.0)) {
    throw PreconditionError("subsolution_gap: need R < x_max and a positive step");
  }

  const double a1_lo = std::atan(prm.r);
  const double a1_hi = std::atan(prm.x_max);
  const double phase_lo = kPi / 2 + prm.gamma;
  const double phase_hi = kPi - prm.gamma;

  GapScanResult best;
  best.minimum = std::numeric_limits<double>::infinity();
  const auto n1 = static_cast<std::size_t>(std::floor((a1_hi - a1_lo) / prm.step));
  for (std::size_t i = 0; i <= n1 + 1; ++i) {
    const double a1 = (i <= n1) ? a1_lo + static_cast<double>(i) * prm.step : a1_hi;
    if (a1 > a1_hi) continue;
    // Keep a2 strictly inside (-pi/2, pi/2).
    const double a2_lo = std::max(phase_lo - a1, -kPi / 2 + prm.step);
    const double a2_hi = std::min(phase_hi - a1, kPi / 2 - prm.step);
    if (a2_lo > a2_hi) continue;
    const double x1 = std::tan(a1);
    const auto n2 = static_cast<std::size_t>(std::floor((a2_hi - a2_lo) / prm.step));
    for (std::size_t j = 0; j <= n2 + 1; ++j) {
      const double a2 = (j <= n2) ? a2_lo + static_cast<double>(j) * prm.step : a2_hi;
      if (a2 > a2_hi) continue;
      const double x2 = std::tan(a2);
      const double g = gap_function(x1, x2, prm.theta_hat, prm.delta);
      ++best.points;
      if (g < best.minimum) {
        best.minimum = g;
        best.x1_at_min = x1;
        best.x2_at_min = x2;
      }
    }
  }
  if (best.points == 0) {
    throw PreconditionError("subsolution_gap: empty scan domain");
  }
  return best;
}

double subsolution_gap(double gamma, double delta, double theta_hat, double r, double x_max,
                       double step) {
  return subsolution_gap_scan({gamma, delta, theta_hat, r, x_max, step}).minimum;
}

}  // namespace lbmcf
