#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "macrobell/invariants.hpp"
#include "macrobell/nelder_mead.hpp"
#include "macrobell/param_search.hpp"

using namespace macrobell;

TEST(NelderMead, MinimizesRosenbrock) {
  auto f = [](const Eigen::VectorXd& x) { return std::pow(1 - x(0), 2) + 100 * std::pow(x(1) - x(0) * x(0), 2); };
  std::vector<Eigen::VectorXd> start{Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(-1.0, 1.0),
                                     Eigen::Vector2d(-1.2, 1.2)};
  NelderMeadOptions opts;
  opts.max_evaluations = 2000;
  opts.value_tolerance = 1e-16;
  const auto r = nelder_mead(f, start, opts);
  EXPECT_NEAR(r.point(0), 1.0, 1e-4);
  EXPECT_NEAR(r.point(1), 1.0, 1e-4);
  EXPECT_LE(r.evaluations, 2000);
}

TEST(NelderMead, TreatsNonFiniteAsWorst) {
  auto f = [](const Eigen::VectorXd& x) { return x(0) < 0 ? std::nan("") : (x(0) - 2) * (x(0) - 2); };
  const auto r = nelder_mead(f, {Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 1.0)});
  EXPECT_NEAR(r.point(0), 2.0, 1e-4);
}

TEST(NbsQuality, OneBosonIsExactTwoLevel) {
  for (double kappa : {0.3, 1.0, 7.0}) {
    for (double g : {0.0, 2.0, 100.0}) {
      const NbsObjective q = nbs_quality({1, kappa, g});
      EXPECT_LT(q.score, 1e-10) << kappa << " " << g;
    }
  }
}

TEST(NbsQuality, ComponentsConsistent) {
  const NbsObjective q = nbs_quality({3, 2.0, 15.0});
  EXPECT_GE(q.max_leakage, 0.0);
  EXPECT_GE(q.profile_error, 0.0);
  EXPECT_EQ(q.score, std::max(q.max_leakage, q.profile_error));
  EXPECT_GT(q.omega_fitted, 0.0);
}

TEST(NbsQuality, RegressionThresholds) {
  for (const auto& t : nbs_regression_thresholds()) {
    const NbsObjective q = nbs_quality(t.params);
    EXPECT_LT(q.max_leakage, t.max_leakage) << t.params.N;
    EXPECT_LT(q.profile_error, t.profile_error) << t.params.N;
  }
}

TEST(NbsQuality, TwentyBosonsWorseThanSeven) {
  EXPECT_GT(nbs_quality({20, 165.0, 101.0}).score, nbs_quality({7, 18.23, 47.85}).score);
}

TEST(NbsQuality, ScaleCovariance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int N : {1, 2, 3}) {
    const NbsParams base{N, 1.5, 9.0};
    const NbsObjective q0 = nbs_quality(base);
    for (int k = 0; k < 3; ++k) {
      const double c = std::exp(u(rng));
      const NbsObjective q = nbs_quality({N, c * base.kappa, c * base.g});
      EXPECT_NEAR(q.score, q0.score, 1e-9) << N << " " << c;
      EXPECT_NEAR(q.omega_fitted / c, q0.omega_fitted, 1e-9 * q0.omega_fitted);
    }
  }
}

TEST(NbsQuality, RejectsBadInput) {
  EXPECT_THROW(nbs_quality({2, 1.0, 30.0}, 4), DomainError);
  EXPECT_THROW(nbs_quality({2, -1.0, 30.0}), DomainError);
}

TEST(OptimizeNbs, RejectsBadInput) {
  EXPECT_THROW(optimize_nbs(2, {0.1, 10}, {1, 100}, 10), DomainError);
  EXPECT_THROW(optimize_nbs(2, {0.0, 10}, {1, 100}, 100), DomainError);
  EXPECT_THROW(optimize_nbs(2, {1.0, 0.5}, {1, 100}, 100), DomainError);
  EXPECT_THROW(optimize_nbs(0, {0.1, 10}, {1, 100}, 100), DomainError);
}

TEST(OptimizeNbs, TwoBosonsBeatReference) {
  const OptimizeResult r = optimize_nbs(2, {0.1, 10}, {1, 100}, 200);
  EXPECT_LE(r.objective.score, nbs_quality({2, 1.0, 30.0}).score);
  EXPECT_LE(r.objective.score, r.grid_best_score);
  EXPECT_LE(r.evaluations, 200);
  EXPECT_GE(r.params.kappa, 0.1);
  EXPECT_LE(r.params.g, 100.0);
}

TEST(OptimizeNbs, OneBosonIsTrivial) {
  EXPECT_LT(optimize_nbs(1, {0.1, 10}, {1, 100}, 50).objective.score, 1e-10);
}

TEST(OptimizeNbs, FiveBosonsBeatReference) {
  const OptimizeResult r = optimize_nbs(5, {5, 50}, {100, 1000}, 120, 4);
  EXPECT_LE(r.objective.score, nbs_quality({5, 20.0, 333.333}).score);
}

TEST(OptimizeNbs, ReproducibleAcrossWorkerCounts) {
  const OptimizeResult a = optimize_nbs(2, {0.1, 10}, {1, 100}, 60, 1);
  const OptimizeResult b = optimize_nbs(2, {0.1, 10}, {1, 100}, 60, 3);
  EXPECT_EQ(a.objective.score, b.objective.score);
  EXPECT_EQ(a.params.kappa, b.params.kappa);
  EXPECT_EQ(a.params.g, b.params.g);
  EXPECT_EQ(a.evaluations, b.evaluations);
}
