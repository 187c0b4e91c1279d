#include <cmath>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "riccap/errors.hpp"
#include "riccap/riccati.hpp"
#include "riccap/systests.hpp"

namespace riccap {
namespace {

Matrix S(double x) { return Matrix::Constant(1, 1, x); }

SystemQuadruple scalar_family(double a) { return {S(a), S(1), S(1), S(1), S(1)}; }

// Process noise q and measurement noise r on separate components, so B K Dᵀ = 0.
SystemQuadruple uncorrelated(double a, double q, double r) {
  Matrix B(1, 2), D(1, 2), K(2, 2);
  B << 1, 0;
  D << 0, 1;
  K << q, 0, 0, r;
  return {S(a), B, S(1), D, K};
}

TEST(DreStep, ScalarFamilyFromOne) {
  EXPECT_NEAR(dre_step(scalar_family(0.5), S(1))(0, 0), 0.125, 1e-15);
}

TEST(DreStep, MatchesClosedFormMap) {
  for (double a : {0.3, 0.9, 1.5}) {
    for (double p : {0.0, 0.2, 1.0, 7.0}) {
      EXPECT_NEAR(dre_step(scalar_family(a), S(p))(0, 0), oracle::scalar_family_step(a, p), 1e-13)
          << "a=" << a << " p=" << p;
    }
  }
}

TEST(DreStep, RejectsIndefiniteCovariance) {
  EXPECT_THROW(dre_step(scalar_family(0.5), S(-1)), NumericalError);
}

TEST(DreStep, OutputIsSymmetric) {
  gen::Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index m = rng.integer(1, 4), p = rng.integer(2, 3), q = rng.integer(1, 2);
    const SystemQuadruple quad{rng.matrix(m, m), rng.matrix(m, p), rng.matrix(q, m), rng.matrix(q, p),
                               rng.spd(p)};
    const Matrix P = dre_step(quad, rng.spd(m));
    EXPECT_EQ(P, P.transpose());
  }
}

TEST(DreRun, FirstElementIsInitialCondition) {
  const auto run = dre_run(scalar_family(0.5), S(1), 3);
  ASSERT_EQ(run.size(), 3u);
  EXPECT_DOUBLE_EQ(run[0](0, 0), 1.0);
  EXPECT_NEAR(run[1](0, 0), 0.125, 1e-15);
  EXPECT_NEAR(run[2](0, 0), oracle::scalar_family_step(0.5, 0.125), 1e-15);
}

TEST(AreSolve, ScalarFamilyHasZeroSolution) {
  for (double a : {0.3, 0.5, 0.9, 1.2, 1.5, 1.9}) {
    const RiccatiSolution s = are_solve(scalar_family(a), S(1));
    EXPECT_TRUE(s.converged) << a;
    EXPECT_LE(std::abs(s.P_star(0, 0)), 1e-9) << a;
    EXPECT_NEAR(s.closed_loop(0, 0), a - 1.0, 1e-9) << a;
    EXPECT_NEAR(s.spectral_radius, std::abs(a - 1.0), 1e-9) << a;
    EXPECT_TRUE(s.stabilizing());
  }
}

TEST(AreSolve, UncorrelatedScalarMatchesQuadraticRoot) {
  for (double a : {0.2, 0.95, 1.3, 2.0}) {
    for (double q : {0.1, 1.0, 4.0}) {
      for (double r : {0.5, 2.0}) {
        const RiccatiSolution s = are_solve(uncorrelated(a, q, r), S(0));
        ASSERT_TRUE(s.converged);
        EXPECT_NEAR(s.P_star(0, 0), oracle::scalar_dare_uncorrelated(a, q, r), 1e-9)
            << "a=" << a << " q=" << q << " r=" << r;
        EXPECT_LE(s.residual, 1e-10);
        EXPECT_LT(s.spectral_radius, 1.0);
      }
    }
  }
}

TEST(AreSolve, GainAndClosedLoopAreConsistent) {
  const RiccatiSolution s = are_solve(uncorrelated(1.3, 1.0, 1.0), S(0));
  const double P = s.P_star(0, 0);
  EXPECT_NEAR(s.gain(0, 0), 1.3 * P / (P + 1.0), 1e-12);
  EXPECT_NEAR(s.closed_loop(0, 0), 1.3 - s.gain(0, 0), 1e-15);
  const GainAndClosedLoop g = gain_and_closed_loop(uncorrelated(1.3, 1.0, 1.0), s.P_star);
  EXPECT_EQ(g.gain, s.gain);
}

TEST(AreSolve, ReportsNonConvergence) {
  const RiccatiSolution s = are_solve(uncorrelated(0.99, 1.0, 1.0), S(0), AreOptions{1e-14, 3});
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.iterations, 3u);
}

TEST(AreSolve, NonStabilizableUnitModeIsNotStabilizing) {
  // A = diag(1, 0.5) where the unit mode receives no noise: P stays at its
  // initial value in that coordinate and the closed loop keeps |λ| = 1.
  Matrix A(2, 2), B(2, 2), C(1, 2), D(1, 2), K = Matrix::Identity(2, 2);
  A << 1, 0, 0, 0.5;
  B << 0, 0, 1, 0;
  C << 0, 1;
  D << 0, 1;
  const RiccatiSolution s = are_solve({A, B, C, D, K}, Matrix::Zero(2, 2));
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.spectral_radius, 1.0, 1e-12);
  EXPECT_FALSE(s.stabilizing());
}

TEST(AreSolve, RandomDetectableStabilizableSystemsForgetInitialCondition) {
  gen::Rng rng(17);
  int checked = 0;
  while (checked < 25) {
    const Eigen::Index m = rng.integer(1, 3), p = rng.integer(2, 3), q = rng.integer(1, 2);
    const SystemQuadruple quad{rng.with_radius(m, rng.uniform(0.2, 1.5)), rng.matrix(m, p),
                               rng.matrix(q, m), rng.matrix(q, p), rng.spd(p)};
    const StarredSystem star = starred_system(quad);
    if (!pbh_test(quad.A, quad.C, PbhMode::kDetectable).flag ||
        !pbh_test(star.A_star, star.input_matrix(), PbhMode::kStabilizable).flag) {
      continue;
    }
    ++checked;
    const Matrix I = Matrix::Identity(m, m);
    const RiccatiSolution s0 = are_solve(quad, Matrix::Zero(m, m));
    const RiccatiSolution s1 = are_solve(quad, I);
    const RiccatiSolution s10 = are_solve(quad, 10.0 * I);
    ASSERT_TRUE(s0.converged && s1.converged && s10.converged);
    EXPECT_LE(sup_norm(s0.P_star - s1.P_star), 1e-8);
    EXPECT_LE(sup_norm(s0.P_star - s10.P_star), 1e-8);
    EXPECT_LT(s0.spectral_radius, 1.0);
    EXPECT_LE(are_residual(quad, s0.P_star), 1e-9);
    EXPECT_GE(min_symmetric_eigenvalue(s0.P_star), -1e-12);
  }
}

}  // namespace
}  // namespace riccap
