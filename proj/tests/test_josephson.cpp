#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "macrobell/josephson.hpp"

using namespace macrobell;

TEST(SectorHamiltonian, SingleBosonHasNoInteraction) {
  const SectorHamiltonian h({1, 3.0, 7.0}, 1);
  EXPECT_EQ(h.matrix()(0, 0), 0.0);
  EXPECT_EQ(h.matrix()(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(h.matrix()(0, 1), 3.0);
  const Eigen::VectorXd e = h.eigenvalues();
  EXPECT_NEAR(e(0), -3.0, 1e-14);
  EXPECT_NEAR(e(1), 3.0, 1e-14);
}

TEST(SectorHamiltonian, TwoBosonMatrixByHand) {
  const SectorHamiltonian h({2, 1.0, 30.0}, 2);
  EXPECT_DOUBLE_EQ(h.matrix()(0, 0), 60.0);
  EXPECT_DOUBLE_EQ(h.matrix()(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(h.matrix()(2, 2), 60.0);
  EXPECT_NEAR(h.matrix()(1, 0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(h.matrix()(2, 1), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(h.matrix()(2, 0), 0.0);
}

TEST(SectorHamiltonian, RejectsInvalidInput) {
  EXPECT_THROW(SectorHamiltonian({1, 1.0, 1.0}, -1), DomainError);
  EXPECT_THROW(SectorHamiltonian({0, 1.0, 1.0}, 1), DomainError);
  EXPECT_THROW(SectorHamiltonian({1, 0.0, 1.0}, 1), DomainError);
  EXPECT_THROW(SectorHamiltonian({1, 1.0, -1.0}, 1), DomainError);
}

TEST(SectorHamiltonian, EigenvectorsOrthonormal) {
  const SectorHamiltonian h({10, 10.0, 49.433}, 10);
  const Eigen::MatrixXd& v = h.eigenvectors();
  EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(11, 11)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Evolve, ZeroTimeIsIdentity) {
  const SectorHamiltonian h({3, 2.0, 5.0}, 3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Eigen::VectorXcd v(4);
  for (auto& c : v) c = cplx(n(rng), n(rng));
  const FockVector psi(v / v.norm());
  const FockVector out = evolve(h, psi, precise_real(0));
  EXPECT_LT((out.amplitudes() - psi.amplitudes()).norm(), 1e-13);
}

TEST(Evolve, RabiOscillationForOneBoson) {
  const double kappa = 1.7;
  const SectorHamiltonian h({1, kappa, 123.0}, 1);
  const FockVector start = FockVector::number_state(1, 1);
  for (double t : {0.1, 0.5, 1.3, 7.9, 123.4}) {
    const FockVector out = evolve(h, start, precise_real(t));
    EXPECT_NEAR(std::norm(out[1]), std::pow(std::cos(kappa * t), 2), 1e-12) << t;
  }
}

TEST(Evolve, PreservesNormForRandomStates) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> ut(0.0, 1e4);
  const SectorHamiltonian h({5, 20.0, 333.333}, 5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXcd v(6);
    for (auto& c : v) c = cplx(n(rng), n(rng));
    const FockVector out = evolve(h, FockVector(v / v.norm()), precise_real(ut(rng)));
    EXPECT_NEAR(out.norm(), 1.0, 1e-10);
  }
}

TEST(Evolve, TimeReversalRoundTrip) {
  const SectorHamiltonian h({4, 3.0, 11.0}, 4);
  const FockVector start = FockVector::number_state(4, 4);
  const FockVector forward = evolve(h, start, precise_real(2.5));
  const FockVector back = evolve(h, forward, precise_real(-2.5));
  EXPECT_LT((back.amplitudes() - start.amplitudes()).norm(), 1e-12);
}

TEST(Evolve, ConservesEnergy) {
  const SectorHamiltonian h({4, 3.0, 11.0}, 4);
  Eigen::VectorXcd v = Eigen::VectorXcd::Constant(5, cplx(1.0, 0.5));
  const FockVector psi(v / v.norm());
  const double e0 = energy(h, psi);
  EXPECT_NEAR(energy(h, evolve(h, psi, precise_real(17.0))), e0, 1e-10 * std::abs(e0));
}

TEST(Evolve, RejectsDimensionMismatch) {
  const SectorHamiltonian h({2, 1.0, 1.0}, 2);
  EXPECT_THROW(evolve(h, FockVector::number_state(0, 1), precise_real(1)), DomainError);
}

TEST(NbsTrace, StartsInNoonComponent) {
  const std::vector<double> grid{0.0, 1.0};
  const NbsTrace trace = nbs_trace({3, 1.0, 10.0}, grid);
  EXPECT_NEAR(trace.p_N[0], 1.0, 1e-14);
  EXPECT_NEAR(trace.p_0[0], 0.0, 1e-14);
}

TEST(NbsTrace, LeakageIsComplement) {
  const auto grid = uniform_grid(100.0, 400);
  const NbsTrace trace = nbs_trace({2, 1.0, 30.0}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(trace.leakage[i], std::max(0.0, 1.0 - trace.p_N[i] - trace.p_0[i]), 1e-15);
  }
  ASSERT_TRUE(trace.omega_fitted.has_value());
  EXPECT_EQ(trace.scaled_times.size(), grid.size());
}

TEST(NbsTrace, RejectsBadGrid) {
  EXPECT_THROW(nbs_trace({2, 1.0, 30.0}, std::vector<double>{}), DomainError);
  EXPECT_THROW(uniform_grid(10.0, 0), DomainError);
  EXPECT_THROW(uniform_grid(-1.0, 10), DomainError);
}

TEST(ScaledFrequency, FormulaForTwoBosons) {
  EXPECT_NEAR(omega_formula({2, 1.0, 30.0}), 2.0 * 30.0 * 2.0 / 900.0, 1e-15);
  EXPECT_NEAR(omega_formula({2, 1.0, 30.0}), 0.13333, 1e-5);
}

TEST(ScaledFrequency, FittedRabiFrequency) {
  const NbsParams p{1, 2.0, 0.0};
  const ScaledFrequency f = scaled_frequency(p, nbs_trace(p, uniform_grid(3.0, 3000)));
  EXPECT_NEAR(f.fitted(), 2.0, 0.02);
  EXPECT_NEAR(static_cast<double>(fit_omega(SectorHamiltonian(p, 1))), 2.0, 1e-5);
}

TEST(ScaledFrequency, TraceTooShort) {
  const NbsParams p{2, 1.0, 30.0};
  EXPECT_THROW(scaled_frequency(p, nbs_trace(p, uniform_grid(1.0, 10))), NumericalError);
}

TEST(FitOmega, MatchesExtendedPrecisionOracle) {
  // tests/oracles/nbs_oracle.py, 60-digit arithmetic.
  struct Case {
    NbsParams p;
    double omega;
  };
  const Case cases[] = {
      {{2, 1.0, 30.0}, 0.0333364884466},
      {{5, 20.0, 333.333}, 3.37340515426e-6},
      {{7, 18.23, 47.85}, 8.4475038505e-6},
      {{10, 10.0, 49.433}, 3.05329313268e-13},
      {{20, 165.0, 101.0}, 6.05851619623e-16},
  };
  for (const auto& c : cases) {
    const double w = static_cast<double>(fit_omega(SectorHamiltonian(c.p, c.p.N)));
    EXPECT_GT(w, 0.0);
    EXPECT_NEAR(w / c.omega, 1.0, 1e-9) << c.p.N;
  }
}

TEST(FitOmega, NoBosonsDoNotOscillate) {
  EXPECT_THROW(fit_omega(SectorHamiltonian({1, 1.0, 1.0}, 0)), NumericalError);
  EXPECT_THROW(fit_omega(SectorHamiltonian({1, 1.0, 1.0}, 1), 1), DomainError);
}

TEST(NbsTrace, RapidRipplesAtTwentyBosons) {
  // Between the sampled points the slow cos^2 swing barely moves, so sample-to-sample
  // changes in p_N come from the fast small-amplitude ripples.
  const NbsParams p{20, 165.0, 101.0};
  const SectorHamiltonian h(p, 20);
  const precise_real omega = fit_omega(h);
  double max_jump = 0.0;
  double prev = noon_populations(h, precise_real(0.3) / omega).p_N;
  for (int k = 1; k <= 200; ++k) {
    const double now = noon_populations(h, (precise_real(0.3) + precise_real(k) * 1e-6) / omega).p_N;
    max_jump = std::max(max_jump, std::abs(now - prev));
    prev = now;
  }
  EXPECT_GT(max_jump, 1e-3);
}
