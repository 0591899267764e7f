#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lbmcf/errors.hpp"
#include "lbmcf/surface_classes.hpp"
#include "oracles.hpp"

namespace {

using namespace lbmcf;

const BlowupLattice kUnit{1.0};
const ClassVector kH{1.0, 0.0};
const ClassVector kE{0.0, 1.0};

TEST(Lattice, Validation) {
  EXPECT_NO_THROW(kUnit.validate());
  EXPECT_THROW(BlowupLattice{0.0}.validate(), PreconditionError);
  EXPECT_THROW(BlowupLattice{-1.0}.validate(), PreconditionError);
  EXPECT_THROW(BlowupLattice{std::nan("")}.validate(), PreconditionError);
}

TEST(Pairing, Examples) {
  const BlowupLattice lat{2.5};
  EXPECT_DOUBLE_EQ(pairing(kH, kH, lat), 2.5);
  EXPECT_DOUBLE_EQ(pairing(kE, kE, lat), -1.0);
  EXPECT_DOUBLE_EQ(pairing(kH, kE, lat), 0.0);
  EXPECT_NEAR(pairing({1.0, -0.1}, {2.0, -0.2}, kUnit), 1.98, 1e-15);
}

TEST(Pairing, SymmetricBilinear) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    const BlowupLattice lat{1.0 + std::abs(u(rng))};
    const ClassVector a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    const double x = u(rng);
    EXPECT_DOUBLE_EQ(pairing(a, b, lat), pairing(b, a, lat));
    const ClassVector axc{a.h + x * c.h, a.e + x * c.e};
    EXPECT_NEAR(pairing(axc, b, lat), pairing(a, b, lat) + x * pairing(c, b, lat), 1e-13);
  }
}

TEST(CotTheta, Examples) {
  for (const double m : {1.5, 2.0, 3.0, 5.0}) {
    EXPECT_NEAR(cot_theta_from_classes(kH, {m, 0.0}, kUnit), (1 - m * m) / (2 * m), 1e-15);
  }
  EXPECT_DOUBLE_EQ(cot_theta_from_classes(kH, {2.0, 0.0}, kUnit), -0.75);
  const BlowupFamily fam = blowup_family(0.0, 0.0, 2.0, kUnit);
  EXPECT_DOUBLE_EQ(cot_theta_from_classes(fam.upsilon, fam.gamma, kUnit), -0.75);
  EXPECT_THROW(cot_theta_from_classes(kH, kE, kUnit), BranchCutError);
}

TEST(CotTheta, QuadrantFromClasses) {
  // cot < 0 with positive pairing puts the angle in (pi/2, pi).
  const double th = theta_from_classes(kH, {2.0, 0.0}, kUnit);
  EXPECT_GT(th, std::numbers::pi / 2);
  EXPECT_LT(th, std::numbers::pi);
  EXPECT_NEAR(1.0 / std::tan(th), -0.75, 1e-15);
  EXPECT_NEAR(theta_from_classes(kH, {0.5, 0.0}, kUnit), std::atan2(1.0, 0.75), 1e-15);
  EXPECT_NEAR(theta_from_classes(kH, {-2.0, 0.0}, kUnit), -th, 1e-15);
  EXPECT_THROW(theta_from_classes(kE, {0.0, 0.0}, kUnit), BranchCutError);
}

TEST(GFunction, OriginAndPartials) {
  EXPECT_DOUBLE_EQ(g_function(0.0, 0.0, 2.0, 1.0), 0.0);
  for (const double m : {2.0, 3.0}) {
    for (const double L : {1.0, 2.0}) {
      const GPartials p = g_partials(0.0, 0.0, m, L);
      EXPECT_DOUBLE_EQ(p.ds, (1 - m * m) * L);
      EXPECT_DOUBLE_EQ(p.dt, 2 * m * L);
    }
  }
}

TEST(GFunction, PartialsMatchFiniteDifferences) {
  const double h = 1e-6;
  for (const auto& [s, t, m, L] : {std::array<double, 4>{0.1, 0.07, 2.0, 1.0},
                                   std::array<double, 4>{0.3, -0.2, 3.0, 2.0},
                                   std::array<double, 4>{-0.5, 0.4, 1.5, 0.7}}) {
    const GPartials p = g_partials(s, t, m, L);
    EXPECT_NEAR(p.ds, (g_function(s + h, t, m, L) - g_function(s - h, t, m, L)) / (2 * h), 1e-8);
    EXPECT_NEAR(p.dt, (g_function(s, t + h, m, L) - g_function(s, t - h, m, L)) / (2 * h), 1e-8);
  }
}

TEST(GFunction, NearRootAtTabulatedPoint) {
  EXPECT_NEAR(g_function(0.1, 0.0754, 2.0, 1.0), 0.0, 1e-4);
}

TEST(SolveT, AgainstBisectionOracle) {
  EXPECT_DOUBLE_EQ(solve_t_of_s(0.0, 2.0, 1.0), 0.0);
  const double t = solve_t_of_s(0.1, 2.0, 1.0);
  EXPECT_NEAR(t, oracle::bisect_t(0.1, 2.0, 1.0, 0.0, 0.2), 1e-14);
  EXPECT_NEAR(t, 0.0754, 1e-4);
  for (const auto& [s, m, L] : {std::array<double, 3>{0.01, 2.0, 1.0},
                                std::array<double, 3>{0.05, 3.0, 2.0},
                                std::array<double, 3>{0.2, 1.5, 0.5}}) {
    const double ts = solve_t_of_s(s, m, L);
    EXPECT_NEAR(ts, oracle::bisect_t(s, m, L, 0.0, s * (m * m - 1) / m), 1e-14);
    EXPECT_LT(std::abs(g_function(s, ts, m, L)), 1e-14);
  }
}

TEST(SolveT, SlopeAtOrigin) {
  const double h = 1e-6;
  for (const double m : {2.0, 3.0}) {
    const double slope = (solve_t_of_s(h, m, 1.0) - solve_t_of_s(0.0, m, 1.0)) / h;
    EXPECT_NEAR(slope, (m * m - 1) / (2 * m), 1e-5);
  }
}

TEST(SolveT, NoSignChange) {
  EXPECT_THROW(solve_t_of_s(5.0, 2.0, 1.0), NumericalError);
  EXPECT_THROW(solve_t_of_s(-0.1, 2.0, 1.0), Error);
}

TEST(RayCheck, Examples) {
  const RayCheck r0 = ray_check(0.0, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(r0.e_defect, 0.0);
  EXPECT_DOUBLE_EQ(r0.h_coeff, 1.25);
  for (const auto& [s, m, L] : {std::array<double, 3>{0.01, 2.0, 1.0},
                                std::array<double, 3>{0.05, 2.0, 1.0},
                                std::array<double, 3>{0.1, 2.0, 1.0},
                                std::array<double, 3>{0.05, 3.0, 2.0}}) {
    const RayCheck r = ray_check(s, m, L);
    EXPECT_LT(std::abs(r.e_defect), 1e-12);
    EXPECT_GT(r.h_coeff, 0.0);
    const BlowupFamily fam = blowup_family(s, r.t, m, {L});
    EXPECT_DOUBLE_EQ(r.cot_theta, cot_theta_from_classes(fam.upsilon, fam.gamma, {L}));
  }
}

TEST(RayCheck, CotContinuousAtOrigin) {
  EXPECT_DOUBLE_EQ(ray_check(0.0, 2.0, 1.0).cot_theta, -0.75);
  for (const double s : {1e-3, 1e-2, 5e-2}) {
    EXPECT_NEAR(ray_check(s, 2.0, 1.0).cot_theta, -0.75, 3 * s);
  }
}

TEST(Family, KahlerPositivity) {
  for (const double s : {0.0, 0.01, 0.05, 0.1}) {
    const double t = solve_t_of_s(s, 2.0, 1.0);
    const BlowupFamily fam = blowup_family(s, t, 2.0, kUnit);
    EXPECT_GT(fam.M, 0.0);
    EXPECT_GT(fam.N, 0.0);
    EXPECT_GT(fam.S, 0.0);
    EXPECT_GT(pairing(fam.upsilon, kH, kUnit), 0.0);
    EXPECT_GT(pairing(fam.gamma, kH, kUnit), 0.0);
    EXPECT_DOUBLE_EQ(fam.M, pairing(fam.upsilon, fam.upsilon, kUnit));
    EXPECT_DOUBLE_EQ(fam.N, pairing(fam.gamma, fam.gamma, kUnit));
    EXPECT_DOUBLE_EQ(fam.S, pairing(fam.upsilon, fam.gamma, kUnit));
  }
}

TEST(PerturbedCot, Examples) {
  EXPECT_DOUBLE_EQ(perturbed_cot(0.0, 1.0, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(perturbed_cot_slope(1.0, 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(perturbed_cot(0.0, 3.0, 1.0, 2.0), 0.5);
  EXPECT_THROW(perturbed_cot(1.0, 1.0, 1.0, 1.0), PreconditionError);
  EXPECT_THROW(perturbed_cot(1.5, 1.0, 1.0, 1.0), PreconditionError);
  EXPECT_THROW(perturbed_cot(0.0, 1.0, 1.0, 0.0), PreconditionError);
}

TEST(PerturbedCot, FamilySlopeAndInwardInequality) {
  const double t = solve_t_of_s(0.1, 2.0, 1.0);
  const BlowupFamily f = blowup_family(0.1, t, 2.0, kUnit);
  const double cot0 = perturbed_cot(0.0, f.M, f.N, f.S);
  const double slope = perturbed_cot_slope(f.M, f.N, f.S);
  EXPECT_DOUBLE_EQ(cot0, (f.M - f.N) / (2 * f.S));
  EXPECT_DOUBLE_EQ(slope, (f.M + f.N) / (2 * f.S));
  EXPECT_LT(cot0, 0.0);
  EXPECT_GT(slope, 0.0);
  EXPECT_LT(std::abs(cot0), std::abs(slope));
  // Central differences converge at second order.
  double prev_err = 0.0;
  for (const double d : {1e-2, 5e-3}) {
    const double fd = (perturbed_cot(d, f.M, f.N, f.S) - perturbed_cot(-d, f.M, f.N, f.S)) / (2 * d);
    const double err = std::abs(fd - slope);
    if (prev_err > 0.0) EXPECT_NEAR(std::log2(prev_err / err), 2.0, 0.1);
    prev_err = err;
  }
}

}  // namespace
