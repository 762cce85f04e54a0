#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "macrobell/fock.hpp"

using namespace macrobell;

TEST(FockVector, RejectsSuperNormalizedAmplitudes) {
  Eigen::VectorXcd v(2);
  v << 1.0, 0.1;
  EXPECT_THROW(FockVector{v}, DomainError);
}

TEST(FockVector, NumberStateIsNormalized) {
  const FockVector v = FockVector::number_state(3, 5);
  EXPECT_EQ(v.n_max(), 5);
  EXPECT_TRUE(v.is_normalized());
  EXPECT_EQ(v[3], cplx(1.0));
}

TEST(CoherentAmplitudes, VacuumIsExact) {
  const FockVector v = coherent_amplitudes(0.0, 4);
  EXPECT_EQ(v[0], cplx(1.0));
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(v[n], cplx(0.0));
  EXPECT_EQ(v.tail_mass(), 0.0);
}

TEST(CoherentAmplitudes, GroundCoefficient) {
  const FockVector v = coherent_amplitudes(2.0, 40);
  EXPECT_NEAR(v[0].real(), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(v[0].real(), 0.13534, 1e-5);
}

TEST(CoherentAmplitudes, OverlapMatchesClosedForm) {
  const cplx a = 2.0;
  const cplx b = 1.0;
  const double expected = std::exp(-(std::norm(a) + std::norm(b)) / 2 + (std::conj(a) * b).real());
  const cplx ov = inner(coherent_amplitudes(a, 40), coherent_amplitudes(b, 40));
  EXPECT_NEAR(ov.real(), expected, 1e-10);
  EXPECT_NEAR(ov.imag(), 0.0, 1e-10);
}

TEST(CoherentAmplitudes, ComplexOverlapMatchesClosedForm) {
  const cplx a(1.5, 0.5);
  const cplx b(-0.3, 1.1);
  const cplx expected = std::exp(-(std::norm(a) + std::norm(b)) / 2 + std::conj(a) * b);
  const cplx ov = inner(coherent_amplitudes(a, 60), coherent_amplitudes(b, 60));
  EXPECT_NEAR(std::abs(ov - expected), 0.0, 1e-10);
}

TEST(CoherentAmplitudes, TruncationErrorCarriesRequiredCutoff) {
  try {
    coherent_amplitudes(5.0, 20);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_GT(e.required_n_max(), 20);
    EXPECT_NO_THROW(coherent_amplitudes(5.0, e.required_n_max()));
  }
}

TEST(CoherentAmplitudes, DefaultTruncationHoldsTolerance) {
  for (double a : {0.5, 1.0, 3.0, 5.0, 8.0, 10.0}) {
    const FockVector v = coherent_amplitudes(a, default_truncation(a));
    EXPECT_LT(v.tail_mass(), kDefaultTailTolerance) << a;
    EXPECT_TRUE(v.is_normalized()) << a;
  }
}

TEST(CoherentAmplitudes, NormApproachesOneAndTailShrinks) {
  double prev_tail = 1.0;
  double prev_gap = 1.0;
  for (int n_max = 10; n_max <= 60; n_max += 10) {
    const FockVector v = coherent_amplitudes(3.0, n_max, 1.0);
    const double gap = std::abs(1.0 - v.norm());
    EXPECT_LT(v.tail_mass(), prev_tail);
    EXPECT_LE(gap, prev_gap + 1e-16);
    prev_tail = v.tail_mass();
    prev_gap = gap;
  }
}

TEST(CoherentAmplitudes, RejectsNegativeCutoff) { EXPECT_THROW(coherent_amplitudes(1.0, -1), DomainError); }

TEST(HermiteTable, ClosedFormValuesAtOrigin) {
  // 2000 nodes mirror around the origin, so evaluate psi directly on a tiny table.
  Eigen::VectorXd x(1);
  x << 0.0;
  Eigen::VectorXd w(1);
  w << 1.0;
  const QuadratureTable t(x, w, 3);
  EXPECT_NEAR(t.psi()(0, 0), std::pow(std::numbers::pi, -0.25), 1e-15);
  EXPECT_NEAR(t.psi()(0, 0), 0.75113, 1e-5);
  EXPECT_EQ(t.psi()(1, 0), 0.0);
}

TEST(HermiteTable, Orthonormality) {
  const int n_max = 100;
  const QuadratureTable t = hermite_table(n_max, default_grid(n_max, 6.0));
  const Eigen::MatrixXd gram = t.psi() * t.weights().asDiagonal() * t.psi().transpose();
  EXPECT_NEAR(gram(3, 5), 0.0, 1e-8);
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(n_max + 1, n_max + 1)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(HermiteTable, ParityOnSymmetricGrid) {
  const QuadratureTable t = hermite_table(30, default_grid(30, 2.0));
  ASSERT_TRUE(t.is_symmetric());
  const Eigen::Index m = t.nodes().size();
  for (int n = 0; n <= 30; ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    for (Eigen::Index i = 0; i < m / 2; ++i) {
      ASSERT_EQ(t.psi()(n, i), sign * t.psi()(n, m - 1 - i)) << n << " " << i;
    }
  }
}

TEST(HermiteTable, RejectsGridTooSmallForAmplitude) {
  EXPECT_THROW(hermite_table(20, GridSpec{5.0, 2000, 3.0}), DomainError);
  EXPECT_THROW(hermite_table(20, GridSpec{20.0, 1999, 0.0}), DomainError);
  EXPECT_THROW(hermite_table(-1, GridSpec{20.0, 2000, 0.0}), DomainError);
}

TEST(HalfLineOverlap, ClosedFormEntries) {
  const HalfLineOverlap o = halfline_overlap(hermite_table(20, default_grid(20, 0.0)));
  EXPECT_NEAR(o.iplus(0, 0), 0.5, 1e-9);
  EXPECT_NEAR(o.iplus(0, 1), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-8);
  EXPECT_NEAR(o.iplus(0, 1), 0.39894, 1e-5);
  EXPECT_NEAR(o.iplus(0, 2), 0.0, 1e-9);
  for (int n = 0; n <= 20; ++n) EXPECT_NEAR(o.iplus(n, n), 0.5, 1e-9);
  EXPECT_LT((o.iplus - o.iplus.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((o.iplus + o.iminus - Eigen::MatrixXd::Identity(21, 21)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(HalfLineOverlap, RejectsAsymmetricGrid) {
  Eigen::VectorXd x(3);
  x << -1.0, 0.0, 2.0;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(halfline_overlap(QuadratureTable(x, w, 2)), DomainError);
}

TEST(HalfLineOverlap, CoherentSignProbability) {
  // P(X > 0) for |alpha>, real alpha: X ~ N(sqrt2 alpha, 1/2), so P = (1 + erf(2 alpha / sqrt2)) / 2.
  const double a = 0.7;
  const int n_max = 40;
  const HalfLineOverlap o = halfline_overlap(hermite_table(n_max, default_grid(n_max, a)));
  const Eigen::VectorXcd c = coherent_amplitudes(a, n_max).amplitudes();
  const double p = c.dot(o.iplus.cast<cplx>() * c).real();
  EXPECT_NEAR(p, 0.5 * (1.0 + std::erf(std::sqrt(2.0) * a)), 1e-10);
}

TEST(QuadratureDensity, IntegratesToOne) {
  const cplx a(1.0, 2.0);
  const int n_max = default_truncation(std::abs(a));
  const FockVector c = coherent_amplitudes(a, n_max);
  const QuadratureTable t = hermite_table(n_max, default_grid(n_max, std::abs(a)));
  EXPECT_NEAR(t.weights().dot(quadrature_density(c, t)), 1.0, 1e-8);
}

TEST(QuadratureDensity, CoherentMeanIsSqrt2Alpha) {
  const double a = 2.0;
  const int n_max = default_truncation(a);
  const QuadratureTable t = hermite_table(n_max, default_grid(n_max, a));
  const Eigen::VectorXd d = quadrature_density(coherent_amplitudes(a, n_max), t);
  const double mean = t.weights().dot(d.cwiseProduct(t.nodes()));
  EXPECT_NEAR(mean, std::sqrt(2.0) * a, 1e-10);
}
