#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "riccap/capacity.hpp"
#include "riccap/errors.hpp"

namespace riccap {
namespace {

Matrix S(double x) { return Matrix::Constant(1, 1, x); }

NoiseModel scalar_noise(double a) { return NoiseModel::make(S(a), S(1), S(1), S(1), S(1)); }
NoiseModel white_noise(double r = 1.0) {
  return NoiseModel::make(Matrix(0, 0), Matrix(0, 1), Matrix(1, 0), S(1), S(r));
}
InputModel iid(double k) { return InputModel::iid(S(1), S(k)); }
InputModel zero_input() { return InputModel::make(S(0.5), S(1), S(0), S(0), S(1)); }

double sum_logdet_KI(const CapacityResult& r) {
  double s = 0.0;
  for (const TraceRow& row : r.trace) s += row.logdet_KI;
  return s;
}
double sum_logdet_KIhat(const CapacityResult& r) {
  double s = 0.0;
  for (const TraceRow& row : r.trace) s += row.logdet_KIhat;
  return s;
}

TEST(FiniteRate, ZeroInputGivesZeroRateAtEveryStep) {
  const CapacityResult r = finite_n_rate(scalar_noise(0.9), zero_input(), Channel{S(1), 1}, 50);
  EXPECT_EQ(r.rate_nats, 0.0);
  EXPECT_EQ(r.power, 0.0);
  for (const TraceRow& row : r.trace) EXPECT_NEAR(row.logdet_KI, row.logdet_KIhat, 1e-13);
}

TEST(FiniteRate, MemorylessSingleUse) {
  const CapacityResult r = finite_n_rate(white_noise(), iid(1.0), Channel{S(1), 1}, 1);
  EXPECT_NEAR(r.rate_nats, 0.5 * std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(r.power, 1.0);
  ASSERT_EQ(r.trace.size(), 1u);
}

TEST(FiniteRate, ScalarFamilyMatchesJointCovarianceOracle) {
  const std::size_t n = 100;
  const NoiseModel noise = scalar_noise(0.5);
  const CapacityResult r = finite_n_rate(noise, iid(1.0), Channel{S(1), 1}, n);
  // Y_t = X_t + V_t with X iid: joint state is S alone, driven by (Z, W).
  Matrix bB(1, 2), bD(1, 2);
  bB << 0, 1;
  bD << 1, 1;
  const Matrix KY = oracle::joint_output_covariance(S(0.5), bB, S(1), bD, Matrix::Identity(2, 2), S(0), n);
  const Matrix KV = oracle::joint_output_covariance(S(0.5), S(1), S(1), S(1), S(1), S(0), n);
  const double expected = (oracle::logdet_eig(KY) - oracle::logdet_eig(KV)) / (2.0 * n);
  EXPECT_NEAR(r.rate_nats, expected, 1e-10);
  EXPECT_NEAR(r.power, 1.0, 1e-15);
}

TEST(FiniteRate, ChainRuleOnRandomSystems) {
  gen::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    gen::System s = gen::random_feasible_system(rng);
    s.noise.K_S1 = rng.spd(s.noise.state_dim(), 0.0) * 0.5;
    s.input.K_Xi1 = rng.spd(s.input.state_dim(), 0.0) * 0.5;
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 20));
    const CapacityResult r = finite_n_rate(s.noise, s.input, s.channel, n);
    const AugmentedModel aug = build_augmented(s.noise, s.input, s.channel);
    const Matrix KY =
        oracle::joint_output_covariance(aug.bA, aug.bB, aug.bC, aug.bD, aug.K_Wbar, aug.K_Theta1, n);
    const Matrix KV = oracle::joint_output_covariance(s.noise.A, s.noise.B, s.noise.C, s.noise.N,
                                                      s.noise.K_W, s.noise.K_S1, n);
    const double ny = static_cast<double>(s.noise.output_dim());
    const double c = 0.5 * ny * std::log(2.0 * std::numbers::pi * std::numbers::e);
    const double hY = n * c + 0.5 * sum_logdet_KI(r);
    const double hV = n * c + 0.5 * sum_logdet_KIhat(r);
    EXPECT_NEAR(hY, oracle::gaussian_entropy(KY), 1e-8 * std::abs(oracle::gaussian_entropy(KY)))
        << "trial " << trial;
    EXPECT_NEAR(hV, oracle::gaussian_entropy(KV), 1e-8 * std::abs(oracle::gaussian_entropy(KV)))
        << "trial " << trial;
  }
}

TEST(FiniteRate, TraceHoldsRunningAverages) {
  const CapacityResult r = finite_n_rate(scalar_noise(0.5), iid(1.0), Channel{S(1), 1}, 10);
  ASSERT_EQ(r.trace.size(), 10u);
  double sum = 0.0;
  for (const TraceRow& row : r.trace) {
    sum += 0.5 * std::max(0.0, row.logdet_KI - row.logdet_KIhat);
    EXPECT_NEAR(row.rate_partial, sum / row.t, 1e-15);
  }
  EXPECT_NEAR(r.trace.back().rate_partial, r.rate_nats, 1e-15);
}

TEST(FiniteRate, RateIsNonnegativeOnRandomSystems) {
  gen::Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const gen::System s = gen::random_system(rng);
    if (!validate(s.noise, s.input, s.channel).ok()) continue;
    FiniteRateOptions opts;
    opts.skip_feasibility = true;
    const CapacityResult r = finite_n_rate(s.noise, s.input, s.channel, 15, opts);
    EXPECT_GE(r.rate_nats, 0.0);
    for (const TraceRow& row : r.trace) EXPECT_GE(row.rate_partial, 0.0);
  }
}

TEST(FiniteRate, ErrorsNameTheStep) {
  CoefficientSchedule sched = CoefficientSchedule::constant(scalar_noise(0.5), iid(1.0));
  sched.noise_at = [](std::size_t t) {
    NoiseModel m = scalar_noise(0.5);
    if (t == 3) m.K_W = S(0);
    return m;
  };
  try {
    finite_n_rate(sched, Channel{S(1), 1}, 5);
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("at t=3"), std::string::npos) << e.what();
  }
}

TEST(FiniteRate, InitialConditionIsForgotten) {
  const NoiseModel noise = scalar_noise(1.5);
  const InputModel in = InputModel::make(S(0.6), S(1), S(0.8), S(0.5), S(1));
  const Channel ch{S(1), 1};
  const double limit = asymptotic_rate(noise, in, ch).rate_nats;
  for (double scale : {0.0, 1.0, 10.0}) {
    FiniteRateOptions opts;
    opts.Sigma_1 = S(scale);
    opts.Pi_1 = scale * Matrix::Identity(2, 2);
    const double r2k = finite_n_rate(noise, in, ch, 2000, opts).rate_nats;
    const double r4k = finite_n_rate(noise, in, ch, 4000, opts).rate_nats;
    EXPECT_NEAR(r4k, limit, 2e-3) << scale;
    // The transient contributes O(1/n).
    EXPECT_LE(std::abs(r4k - limit), 0.51 * std::abs(r2k - limit) + 1e-12) << scale;
  }
}

TEST(AsymptoticRate, MemorylessAwgn) {
  for (double kappa : {0.5, 1.0, 3.0}) {
    const CapacityResult r = asymptotic_rate(white_noise(), iid(kappa), Channel{S(1), kappa});
    EXPECT_NEAR(r.rate_nats, 0.5 * std::log1p(kappa), 1e-14);
    EXPECT_NEAR(r.power, kappa, 1e-15);
  }
}

TEST(AsymptoticRate, ScalarColoredNoiseClosedForm) {
  const CapacityResult r = asymptotic_rate(scalar_noise(0.5), iid(1.0), Channel{S(1), 1});
  EXPECT_NEAR(r.rate_nats, 0.5 * std::log(2.5), 1e-10);
  EXPECT_NEAR(r.K_I(0, 0), 2.5, 1e-10);
  EXPECT_NEAR(r.K_Ihat(0, 0), 1.0, 1e-10);
  EXPECT_NEAR(r.Pi_star(0, 0), 0.5, 1e-10);  // root of π² + 1.5π − 1
  EXPECT_NEAR(r.power, 1.0, 1e-15);
  ASSERT_TRUE(r.feasibility.has_value());
  EXPECT_FALSE(r.initial_condition_dependent);
  EXPECT_TRUE(r.diagnostics.converged);
}

TEST(AsymptoticRate, ZeroInputGivesZero) {
  EXPECT_EQ(asymptotic_rate(scalar_noise(1.2), zero_input(), Channel{S(1), 1}).rate_nats, 0.0);
}

TEST(AsymptoticRate, UnstableInputStateIsAHardFailure) {
  const InputModel in = InputModel::make(S(1.0), S(1), S(1), S(0), S(1));
  EXPECT_THROW(asymptotic_rate(scalar_noise(0.5), in, Channel{S(1), 1}), NotStableError);
}

TEST(AsymptoticRate, OutsideAdmissibleSetIsFlagged) {
  Matrix A = Matrix::Zero(2, 2), B(2, 1), C(1, 2);
  A(0, 0) = 1.5;
  A(1, 1) = 0.5;
  B << 1, 1;
  C << 0, 1;
  const NoiseModel noise = NoiseModel::make(A, B, C, S(1), S(1));
  AsymptoticOptions opts;
  opts.are.max_iter = 2000;
  const CapacityResult r = asymptotic_rate(noise, iid(1.0), Channel{S(1), 1}, opts);
  EXPECT_TRUE(r.initial_condition_dependent);
}

TEST(AsymptoticRate, SimilarityInvariance) {
  gen::Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    gen::SystemLimits lim;
    lim.max_input_radius = 0.8;
    gen::System s = gen::random_feasible_system(rng, lim);
    if (s.input.state_dim() == 0) continue;
    const Matrix T = rng.invertible(s.input.state_dim());
    const Matrix Ti = T.inverse();
    InputModel t = s.input;
    t.F = T * s.input.F * Ti;
    t.G = T * s.input.G;
    t.Gamma = s.input.Gamma * Ti;
    const double a = asymptotic_rate(s.noise, s.input, s.channel).rate_nats;
    const double b = asymptotic_rate(s.noise, t, s.channel).rate_nats;
    EXPECT_NEAR(a, b, 1e-10);
    const double fa = finite_n_rate(s.noise, s.input, s.channel, 30).rate_nats;
    const double fb = finite_n_rate(s.noise, t, s.channel, 30).rate_nats;
    EXPECT_NEAR(fa, fb, 1e-10);
  }
}

TEST(AsymptoticPower, Examples) {
  EXPECT_NEAR(asymptotic_power(InputModel::make(S(0.5), S(1), S(1), S(0), S(3))), 4.0, 1e-12);
  EXPECT_DOUBLE_EQ(asymptotic_power(iid(2.5)), 2.5);
  EXPECT_EQ(asymptotic_power(InputModel::make(S(0.5), S(0), S(1), S(0), S(1))), 0.0);
}

TEST(Waterfilling, ScalarAndZeroBudget) {
  EXPECT_NEAR(waterfilling_oracle(S(1), S(1), 1.0).rate_nats, 0.5 * std::log(2.0), 1e-12);
  EXPECT_EQ(waterfilling_oracle(S(1), S(1), 0.0).rate_nats, 0.0);
}

TEST(Waterfilling, TwoActiveModes) {
  Matrix H = Matrix::Zero(2, 2);
  H(0, 0) = 1;
  H(1, 1) = 2;
  const WaterfillingResult w = waterfilling_oracle(H, Matrix::Identity(2, 2), 1.0);
  EXPECT_NEAR(w.rate_nats, 0.5 * std::log(4.5 * 1.125), 1e-10);
  EXPECT_NEAR(w.rate_nats, 0.81093, 1e-5);
  EXPECT_NEAR(w.water_level, 1.125, 1e-10);
  ASSERT_EQ(w.powers.size(), 2);
  EXPECT_NEAR(w.powers[0], 0.875, 1e-10);  // strongest mode first
  EXPECT_NEAR(w.powers[1], 0.125, 1e-10);
}

TEST(Waterfilling, MatchesEnumerationOnRandomChannels) {
  gen::Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = rng.integer(1, 4);
    const Matrix H = rng.matrix(n, n);
    const Matrix R = rng.spd(n);
    const double kappa = rng.uniform(0.0, 5.0);
    // Independent whitening through the inverse square root of R.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(R);
    const Matrix Rmh = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                       eig.eigenvectors().transpose();
    const Eigen::JacobiSVD<Matrix> svd(Rmh * H);
    const Vector gains = svd.singularValues().array().square();
    const double expected = oracle::waterfill_parallel(gains, kappa);
    EXPECT_NEAR(waterfilling_oracle(H, R, kappa).rate_nats, expected, 1e-9) << trial;
  }
}

CoefficientSchedule decaying_schedule() {
  CoefficientSchedule s = CoefficientSchedule::constant(scalar_noise(0.5), iid(1.0));
  s.noise_at = [](std::size_t t) { return scalar_noise(0.5 + std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(t, 1000)))); };
  return s;
}

TEST(Case2, ConstantScheduleDegeneratesToCaseOne) {
  const auto pts = case2_rate(CoefficientSchedule::constant(scalar_noise(0.5), iid(1.0)), Channel{S(1), 1}, 64);
  ASSERT_EQ(pts.size(), 7u);
  const double limit = 0.5 * std::log(2.5);
  for (const Case2Point& p : pts) EXPECT_NEAR(p.deviation, std::abs(p.average_rate - limit), 1e-15);
  EXPECT_LT(pts.back().deviation, pts.front().deviation);
}

TEST(Case2, DecayingScheduleConverges) {
  const auto pts = case2_rate(decaying_schedule(), Channel{S(1), 1}, 4096);
  ASSERT_GE(pts.size(), 4u);
  for (std::size_t i = pts.size() - 4; i + 1 < pts.size(); ++i) {
    EXPECT_LE(pts[i + 1].deviation, pts[i].deviation);
  }
  EXPECT_LE(pts.back().deviation, 1e-3);
  EXPECT_EQ(pts.back().n, 4096u);
}

TEST(Case2, LimitOutsideAdmissibleSetIsRejected) {
  CoefficientSchedule s = CoefficientSchedule::constant(scalar_noise(0.5), iid(1.0));
  s.input_limit = InputModel::make(S(1.0), S(1), S(1), S(1), S(1));
  s.input_at = [](std::size_t t) {
    return InputModel::make(S(1.0 - 1.0 / (t + 1.0)), S(1), S(1), S(1), S(1));
  };
  EXPECT_THROW(case2_rate(s, Channel{S(1), 1}, 16), ModelError);
}

}  // namespace
}  // namespace riccap
