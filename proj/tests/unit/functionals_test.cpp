#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lbmcf/errors.hpp"
#include "lbmcf/functionals.hpp"
#include "oracles.hpp"

namespace {

using namespace lbmcf;
constexpr double kPi = std::numbers::pi;

TrigProduct mode(const char* text) { return parse_trig_product(text); }

Background bump_background(int n, double amp = 0.1) {
  BackgroundSpec spec;
  spec.bump_amplitude = amp;
  spec.bump_modes = {mode("s1:c0:s1:c0")};
  return make_background(GridSpec(n), spec);
}

Background constant_background(int n, const Mat2& alpha, const Mat2& f) {
  BackgroundSpec spec;
  spec.alpha = alpha;
  spec.f_hat_const = f;
  return make_background(GridSpec(n), spec);
}

TEST(ZTheta, ConstantExamples) {
  const Background b3 = constant_background(4, Mat2::Identity(), 3.0 * Mat2::Identity());
  EXPECT_NEAR(std::abs(b3.z - 8.0 * Complex(-8, 6)), 0.0, 1e-12);
  EXPECT_NEAR(b3.theta_hat, kPi - std::atan(0.75), 1e-15);
  EXPECT_NEAR(b3.cot_theta_hat, -4.0 / 3.0, 1e-14);
  const ClassData c = class_data(Mat2::Identity(), 3.0 * Mat2::Identity());
  EXPECT_DOUBLE_EQ(c.aa, 8.0);
  EXPECT_DOUBLE_EQ(c.ff, 72.0);
  EXPECT_DOUBLE_EQ(c.af, 24.0);
  EXPECT_NEAR(c.cot_theta_hat(), -4.0 / 3.0, 1e-15);

  const Background b1 = constant_background(4, Mat2::Identity(), Mat2::Identity());
  EXPECT_NEAR(std::abs(b1.z - Complex(0, 16)), 0.0, 1e-13);
  EXPECT_NEAR(b1.theta_hat, kPi / 2, 1e-15);
  EXPECT_NEAR(b1.cot_theta_hat, 0.0, 1e-15);
}

TEST(ZTheta, BumpDoesNotChangeZ) {
  const Background plain = constant_background(8, Mat2::Identity(), 3.0 * Mat2::Identity());
  for (const double amp : {0.05, 0.1, 0.3}) {
    const Background b = bump_background(8, amp);
    EXPECT_LT(std::abs(b.z - plain.z) / std::abs(plain.z), 1e-10);
  }
}

TEST(ZTheta, AgreesWithClassFormulaForGeneralAlpha) {
  std::mt19937_64 rng(31);
  const GridSpec g(8);
  for (int k = 0; k < 10; ++k) {
    const Mat2 a = oracle::random_positive(rng, 0.5, 2.0);
    const Mat2 f = oracle::random_hermitian(rng, 2.0);
    const ScalarField bump = random_band_limited(g, 2, 0.05, 100 + k);
    const ClassData c = class_data(a, f);
    if (std::abs(c.af) < 1e-2) continue;
    const ZTheta zt = compute_z_and_theta_hat(a, f, bump);
    EXPECT_LT(std::abs(zt.z - c.z()) / std::abs(c.z()), 1e-10);
    EXPECT_NEAR(zt.cot_theta_hat, c.cot_theta_hat(), 1e-9 * (1 + std::abs(c.cot_theta_hat())));
  }
}

TEST(ClassPairing, MatchesExteriorAlgebra) {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 50; ++k) {
    const Mat2 a = oracle::random_hermitian(rng, 2.0);
    const Mat2 b = oracle::random_hermitian(rng, 2.0);
    const Complex top = oracle::wedge_top(oracle::kahler_form(a), oracle::kahler_form(b));
    EXPECT_NEAR(class_pairing(a, b), top.real(), 1e-12);
    EXPECT_NEAR(top.imag(), 0.0, 1e-12);
  }
}

TEST(ClassIdentities, OmegaHat) {
  std::mt19937_64 rng(33);
  int checked = 0;
  while (checked < 100) {
    const Mat2 a = oracle::random_positive(rng);
    const Mat2 f = oracle::random_hermitian(rng, 3.0);
    const ClassData c = class_data(a, f);
    if (std::abs(c.af) < 1e-3) continue;
    const OmegaIdentities id = omega_identities(c);
    EXPECT_NEAR(id.omega_sq, id.omega_sq_rhs, 1e-12 * std::abs(id.omega_sq_rhs));
    EXPECT_NEAR(id.omega_dot_f, id.omega_dot_f_rhs, 1e-12 * std::max(1.0, std::abs(id.omega_dot_f_rhs)));
    ++checked;
  }
  EXPECT_THROW((ClassData{8.0, 8.0, 0.0}.cot_theta_hat()), BranchCutError);
}

/// CY computed by expanding every wedge in real coordinates with analytic
/// Hessians of the trigonometric potentials.
Complex cy_oracle(const GridSpec& g, const Mat2& alpha, const Mat2& f_const,
                  const std::vector<std::pair<double, oracle::TrigMode>>& bump,
                  const std::vector<std::pair<double, oracle::TrigMode>>& phi) {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.coordinates(i);
    Mat2 fh = f_const;
    for (const auto& [amp, m] : bump) fh += amp * m.complex_hessian(x);
    Mat2 fp = fh;
    double phi_val = 0.0;
    for (const auto& [amp, m] : phi) {
      fp += amp * m.complex_hessian(x);
      phi_val += amp * m.derivative(x, -1, -1);
    }
    const Complex I(0, 1);
    const oracle::Form2 a = oracle::kahler_form(alpha + I * fh);
    const oracle::Form2 b = oracle::kahler_form(alpha + I * fp);
    sum += phi_val * (oracle::wedge_top(a, a) + oracle::wedge_top(b, a) + oracle::wedge_top(b, b)) / 3.0;
  }
  return sum / static_cast<double>(g.size());
}

oracle::TrigMode trig(std::array<bool, 4> s, std::array<int, 4> k) {
  oracle::TrigMode m;
  m.is_sin = s;
  m.k = k;
  return m;
}

TEST(CyComplex, ZeroConstantAndWedgeOracle) {
  const Background bg = bump_background(8);
  const GridSpec g = bg.grid();
  EXPECT_EQ(cy_complex(ScalarField(g), bg), Complex(0, 0));
  const Complex c = cy_complex(ScalarField(g, 0.7), bg);
  EXPECT_LT(std::abs(c - 0.7 * bg.z), 1e-10 * std::abs(bg.z));

  const std::vector<std::pair<double, oracle::TrigMode>> bump{
      {0.1, trig({true, false, true, false}, {1, 0, 1, 0})}};
  const std::vector<std::pair<double, oracle::TrigMode>> phi{
      {0.05, trig({false, true, false, false}, {1, 1, 0, 0})},
      {0.03, trig({false, false, true, false}, {0, 0, 2, 1})},
      {0.2, trig({false, false, false, false}, {0, 0, 0, 0})}};
  const std::vector<TrigProduct> phi_modes_a{mode("c1:s1:c0:c0")};
  const std::vector<TrigProduct> phi_modes_b{mode("c0:c0:s2:c1")};
  ScalarField p = synthesize(g, 0.05, phi_modes_a) + synthesize(g, 0.03, phi_modes_b);
  p += 0.2;
  const Complex lib = cy_complex(p, bg);
  const Complex ref = cy_oracle(g, Mat2::Identity(), 3.0 * Mat2::Identity(), bump, phi);
  EXPECT_LT(std::abs(lib - ref), 1e-11 * std::abs(ref));
}

TEST(CyComplex, WedgeOracleGeneralAlpha) {
  const Mat2 alpha = hermitian(1.5, 0.8, Complex(0.2, -0.1));
  const Mat2 fc = hermitian(2.0, 3.0, Complex(0.4, 0.3));
  const GridSpec g(8);
  const std::vector<TrigProduct> bump_modes{mode("c1:c0:c0:s1")};
  const Background bg = make_background(alpha, fc, synthesize(g, 0.07, bump_modes));
  const std::vector<TrigProduct> phi_modes{mode("s1:c1:c0:c0")};
  const ScalarField p = synthesize(g, 0.04, phi_modes);
  const Complex ref = cy_oracle(g, alpha, fc, {{0.07, trig({false, false, false, true}, {1, 0, 0, 1})}},
                                {{0.04, trig({true, false, false, false}, {1, 1, 0, 0})}});
  EXPECT_LT(std::abs(cy_complex(p, bg) - ref), 1e-11 * std::max(1.0, std::abs(ref)));
}

TEST(Functionals, IJAtZeroAndConstants) {
  const Background bg = bump_background(8);
  const GridSpec g = bg.grid();
  EXPECT_EQ(i_functional(ScalarField(g), bg), 0.0);
  EXPECT_EQ(j_functional(ScalarField(g), bg), 0.0);
  const double c = 0.4;
  EXPECT_NEAR(i_functional(ScalarField(g, c), bg),
              c * std::abs(bg.z) * std::cos(bg.theta_hat - kPi / 2), 1e-10);
  EXPECT_NEAR(j_functional(ScalarField(g, c), bg), 0.0, 1e-10);
  const ScalarField p = random_band_limited(g, 2, 0.05, 3);
  EXPECT_NEAR(j_functional(p + ScalarField(g, c), bg), j_functional(p, bg), 1e-12);
}

double slope_of(const std::vector<double>& eps, const std::vector<double>& err) {
  return std::log(err.front() / err.back()) / std::log(eps.front() / eps.back());
}

TEST(Functionals, VariationalFormulasConvergeSecondOrder) {
  const Background bg = bump_background(8);
  const GridSpec g = bg.grid();
  const ScalarField phi = random_band_limited(g, 2, 0.03, 4);
  const ScalarField psi = random_band_limited(g, 2, 1.0, 5);
  const PhaseField pf = compute_phase_field(phi, bg);
  const double w = volume_density(bg.alpha());

  // dCY = int psi zeta dmu, dI = Im of it, dJ = -int psi Im(e^{-i theta_hat} zeta) dmu
  Complex dcy = 0.0;
  double dj = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    dcy += psi[i] * pf.zeta[i];
    dj -= psi[i] * (std::exp(Complex(0, -bg.theta_hat)) * pf.zeta[i]).imag();
  }
  dcy *= w / static_cast<double>(g.size());
  dj *= w / static_cast<double>(g.size());

  const std::vector<double> eps{4e-2, 2e-2, 1e-2};
  std::vector<double> e_cy, e_i, e_j;
  for (const double e : eps) {
    const ScalarField up = axpy(phi, e, psi);
    const ScalarField dn = axpy(phi, -e, psi);
    const Complex fd = (cy_complex(up, bg) - cy_complex(dn, bg)) / (2 * e);
    e_cy.push_back(std::abs(fd - dcy));
    e_i.push_back(std::abs((i_functional(up, bg) - i_functional(dn, bg)) / (2 * e) - dcy.imag()));
    e_j.push_back(std::abs((j_functional(up, bg) - j_functional(dn, bg)) / (2 * e) - dj));
  }
  // Either second-order convergence or a match at rounding level: on surfaces
  // Im CY is quadratic in phi, so its central difference is exact.
  auto converges = [&](const std::vector<double>& err) {
    if (*std::max_element(err.begin(), err.end()) < 1e-12) return true;
    return std::abs(slope_of(eps, err) - 2.0) < 0.2;
  };
  EXPECT_TRUE(converges(e_cy)) << e_cy[0] << " " << e_cy[1] << " " << e_cy[2];
  EXPECT_TRUE(converges(e_i)) << e_i[0] << " " << e_i[1] << " " << e_i[2];
  EXPECT_TRUE(converges(e_j)) << e_j[0] << " " << e_j[1] << " " << e_j[2];
}

TEST(VolumeFunctional, Examples) {
  const Background b0 = constant_background(4, Mat2::Identity(), Mat2::Zero());
  EXPECT_NEAR(volume_functional(ScalarField(b0.grid()), b0), 8.0, 1e-14);
  const Background b3 = constant_background(4, Mat2::Identity(), 3.0 * Mat2::Identity());
  EXPECT_NEAR(volume_functional(ScalarField(b3.grid()), b3), 80.0, 1e-12);
  const Background bg = bump_background(8);
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const ScalarField p = random_band_limited(bg.grid(), 2, 0.05, s);
    const PhaseField pf = compute_phase_field(p, bg);
    EXPECT_GE(volume_functional(pf, bg), std::abs(bg.z) * (1 - 1e-14));
    Complex zint = 0.0;
    for (std::size_t i = 0; i < pf.size(); ++i) zint += pf.zeta[i];
    zint *= volume_density(bg.alpha()) / static_cast<double>(pf.size());
    EXPECT_LT(std::abs(zint - bg.z), 1e-10 * std::abs(bg.z));
  }
}

TEST(VolumeFunctional, EqualsDirectIntegralOfV) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 4; ++k) {
    const Mat2 alpha = oracle::random_positive(rng, 0.6, 1.8);
    const Mat2 f = 2.0 * Mat2::Identity() + oracle::random_hermitian(rng, 1.0);
    const GridSpec g(8);
    const Background bg = make_background(alpha, f, random_band_limited(g, 2, 0.02, 50 + k));
    const ScalarField p = random_band_limited(g, 3, 0.05, 60 + k);
    const PhaseField pf = compute_phase_field(p, bg);
    long double direct = 0.0L;
    for (const double v : pf.v) direct += v;
    direct *= static_cast<long double>(volume_density(alpha)) / pf.size();
    const double got = volume_functional(pf, bg);
    EXPECT_NEAR(got, static_cast<double>(direct), 1e-13 * got);
  }
}

TEST(Dissipation, ConstantPhaseAndShiftInvariance) {
  const Background b3 = constant_background(4, Mat2::Identity(), 3.0 * Mat2::Identity());
  EXPECT_NEAR(dissipation(ScalarField(b3.grid()), b3), 0.0, 1e-20);
  const Background bg = bump_background(8);
  Background shifted = bg;
  shifted.theta_hat += 0.3;
  const double d = dissipation(ScalarField(bg.grid()), bg);
  EXPECT_GT(d, 0.0);
  EXPECT_EQ(dissipation(ScalarField(bg.grid()), shifted), d);
}

TEST(DhymResidual, ZeroAtConstantSolutionsAndTwoFormulaConsistency) {
  const Background b3 = constant_background(4, Mat2::Identity(), 3.0 * Mat2::Identity());
  const DhymResidual r0 = dhym_residual(ScalarField(b3.grid()), b3);
  EXPECT_LT(r0.sup, 1e-14);
  EXPECT_LT(r0.l2, 1e-14);

  const Background bg = bump_background(8);
  const ScalarField p = random_band_limited(bg.grid(), 2, 0.05, 6);
  const PhaseField pf = compute_phase_field(p, bg);
  const DhymResidual r = dhym_residual(pf, bg);
  double sup = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < pf.size(); ++i) {
    const double ri = pf.v[i] * std::sin(pf.theta[i] - bg.theta_hat);
    sup = std::max(sup, std::abs(ri));
    sq += ri * ri;
  }
  const double l2 = std::sqrt(sq / static_cast<double>(pf.size()) * volume_density(bg.alpha()));
  EXPECT_NEAR(r.sup, sup, 1e-12 * std::max(1.0, sup));
  EXPECT_NEAR(r.l2, l2, 1e-12 * std::max(1.0, l2));
}

TEST(MaResidual, HandExamples) {
  const Background b3 = constant_background(4, Mat2::Identity(), 3.0 * Mat2::Identity());
  EXPECT_NEAR(ma_residual(ScalarField(b3.grid()), b3), 0.0, 1e-13);
  Background b2 = b3;
  b2.f_hat_const = 2.0 * Mat2::Identity();
  b2.f_hat = HermitianField(b3.grid(), 2.0 * Mat2::Identity());
  const PhaseField pf = compute_phase_field(ScalarField(b2.grid()), b2);
  EXPECT_NEAR(ma_residual(pf, b2), 21.0 / 9.0, 1e-13);
  EXPECT_LT(ma_recombination_defect(pf, b2), 1e-13);
}

TEST(MaResidual, EquivalentToDhymAtConstantKaehlerStates) {
  for (const auto& [l1, l2] : std::vector<std::pair<double, double>>{{3, 3}, {5, 0.5}, {2, 1.5}, {0.8, 0.6}}) {
    const Background b = constant_background(4, hermitian(1.3, 0.7, Complex(0.1, 0.2)),
                                             hermitian(1.3 * l1, 0.7 * l2, Complex(0.1, 0.2) * l1));
    const PhaseField pf = compute_phase_field(ScalarField(b.grid()), b);
    EXPECT_LT(dhym_residual(pf, b).sup, 1e-12);
    EXPECT_LT(ma_residual(pf, b), 1e-12);
    Background off = b;
    off.theta_hat += 0.05;
    off.cot_theta_hat = std::cos(off.theta_hat) / std::sin(off.theta_hat);
    EXPECT_GT(dhym_residual(pf, off).sup, 1e-3);
    EXPECT_GT(ma_residual(pf, off), 1e-3);
  }
}

TEST(PhaseDriftIdentity, ExactOnHypercriticalStates) {
  const Background b3 = constant_background(4, Mat2::Identity(), 3.0 * Mat2::Identity());
  EXPECT_LT(phase_drift_identity(ScalarField(b3.grid()), b3), 1e-14);
  const Background bg = bump_background(8);
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const ScalarField p = random_band_limited(bg.grid(), 2, 0.005, s);
    EXPECT_LT(phase_drift_identity(p, bg), 1e-10);
  }
  const Background b1 = constant_background(4, Mat2::Identity(), Mat2::Identity());
  EXPECT_THROW(phase_drift_identity(ScalarField(b1.grid()), b1), PreconditionError);
  Background low = b3;
  low.f_hat = HermitianField(b3.grid(), 0.5 * Mat2::Identity());
  EXPECT_THROW(phase_drift_identity(ScalarField(b3.grid()), low), PreconditionError);
}

TEST(FunctionalReport, MatchesIndividualFunctionals) {
  const Background bg = bump_background(8);
  const ScalarField p = random_band_limited(bg.grid(), 2, 0.05, 8);
  const PhaseField pf = compute_phase_field(p, bg);
  const FunctionalReport r = functional_report(p, pf, bg);
  EXPECT_EQ(r.v_val, volume_functional(pf, bg));
  EXPECT_EQ(r.i_val, i_functional(p, bg));
  EXPECT_EQ(r.j_val, j_functional(p, bg));
  EXPECT_EQ(r.res_ma_sup, ma_residual(pf, bg));
  EXPECT_EQ(r.dissipation, dissipation(pf, bg));
  EXPECT_GE(r.v_val, std::abs(bg.z));
}

TEST(PhaseField, CacheConsistentWithHessian) {
  const Background bg = bump_background(8);
  const ScalarField p = random_band_limited(bg.grid(), 2, 0.05, 9);
  const PhaseField pf = compute_phase_field(p, bg);
  const HermitianField h = complex_hessian(p);
  for (std::size_t i = 0; i < pf.size(); ++i) {
    EXPECT_LT((pf.f[i] - (bg.f_hat[i] + h[i])).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(pf.theta[i], lagrangian_phase(pf.lambda[i]), 1e-15);
  }
}

TEST(Functionals, RequireFourDimensions) {
  EXPECT_THROW(make_background(GridSpec(8, 2), BackgroundSpec{}), PreconditionError);
}

}  // namespace
