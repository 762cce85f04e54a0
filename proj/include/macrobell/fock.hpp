#pragma once

// Fock-space and quadrature primitives shared by the beam-splitter and the
// cat-state simulations.
//
// Quadrature convention: X = (a + a^dagger)/sqrt(2), so a real coherent
// amplitude alpha has mean X = sqrt(2) alpha.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "macrobell/errors.hpp"

namespace macrobell {

using cplx = std::complex<double>;

inline constexpr double kDefaultTailTolerance = 1e-12;

/// Complex amplitudes over boson numbers 0..n_max.
class FockVector {
 public:
  FockVector() = default;

  explicit FockVector(Eigen::VectorXcd amplitudes, double tail_mass = 0.0)
      : amplitudes_(std::move(amplitudes)), tail_mass_(tail_mass) {
    if (amplitudes_.size() == 0) throw DomainError("FockVector: needs at least one amplitude");
    if (amplitudes_.squaredNorm() > 1.0 + 1e-12) {
      throw DomainError("FockVector: squared norm exceeds 1");
    }
  }

  /// Number state |n> in a space truncated at n_max.
  static FockVector number_state(int n, int n_max) {
    if (n < 0 || n > n_max) throw DomainError("number_state: n outside [0, n_max]");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_max + 1);
    v(n) = 1.0;
    return FockVector(std::move(v));
  }

  int n_max() const noexcept { return static_cast<int>(amplitudes_.size()) - 1; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  cplx operator[](Eigen::Index n) const { return amplitudes_(n); }

  /// Probability dropped by truncation when the vector was produced.
  double tail_mass() const noexcept { return tail_mass_; }
  double norm() const { return amplitudes_.norm(); }
  bool is_normalized(double tol = 1e-10) const { return std::abs(norm() - 1.0) < tol; }

 private:
  Eigen::VectorXcd amplitudes_;
  double tail_mass_ = 0.0;
};

inline cplx inner(const FockVector& bra, const FockVector& ket) {
  if (bra.dim() != ket.dim()) throw DomainError("inner: dimension mismatch");
  return bra.amplitudes().dot(ket.amplitudes());
}

/// |<a|b>|^2 / (<a|a><b|b>).
inline double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) throw DomainError("fidelity: dimension mismatch");
  const double na = a.squaredNorm();
  const double nb = b.squaredNorm();
  if (na == 0.0 || nb == 0.0) throw DomainError("fidelity: zero vector");
  return std::norm(a.dot(b)) / (na * nb);
}

/// Default cutoff for a coherent amplitude of modulus `amplitude`.
inline int default_truncation(double amplitude) {
  const double a = std::abs(amplitude);
  return static_cast<int>(std::ceil(a * a + 8.0 * a + 20.0));
}

/// Coefficients e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n = 0..n_max, with the
/// discarded probability recorded as the vector's tail mass.
inline FockVector coherent_amplitudes(cplx alpha, int n_max,
                                      double tail_tolerance = kDefaultTailTolerance) {
  if (n_max < 0) throw DomainError("coherent_amplitudes: n_max must be >= 0");

  Eigen::VectorXcd c(n_max + 1);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= n_max; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));

  // Sum the tail directly; 1 - sum|c|^2 loses everything below 1e-16.
  double tail = 0.0;
  int required = n_max;
  {
    cplx term = c(n_max);
    double running = 0.0;
    std::vector<double> masses;
    const double mean = std::norm(alpha);
    for (int n = n_max + 1; n < n_max + 100000; ++n) {
      term *= alpha / std::sqrt(static_cast<double>(n));
      const double m = std::norm(term);
      masses.push_back(m);
      running += m;
      if (n > mean && m < 1e-30 * (running + 1e-300)) break;
      if (m == 0.0 && n > mean) break;
    }
    tail = running;
    if (tail > tail_tolerance) {
      double remaining = tail;
      for (std::size_t k = 0; k < masses.size(); ++k) {
        remaining -= masses[k];
        if (remaining <= tail_tolerance) {
          required = n_max + 1 + static_cast<int>(k);
          break;
        }
      }
      throw TruncationError("coherent_amplitudes: tail mass " + std::to_string(tail) +
                                " exceeds tolerance; need n_max >= " +
                                std::to_string(required),
                            required);
    }
  }
  // Drop the few-ulp overshoot rounding can produce.
  const double sq = c.squaredNorm();
  if (sq > 1.0) c /= std::sqrt(sq);
  return FockVector(std::move(c), tail);
}

// ---------------------------------------------------------------------------
// Quadrature tables

/// Symmetric interval [-half_width, half_width] tiled with 20-point
/// Gauss-Legendre panels.  `points` must be a positive multiple of 40 so that
/// the origin is a panel boundary and the half-line restriction is exact.
struct GridSpec {
  double half_width = 0.0;
  int points = 2000;
  double alpha_max = 0.0;  ///< largest coherent amplitude the grid must hold
};

inline constexpr int kPanelOrder = 20;

/// Grid wide enough for displaced states of amplitude alpha_max and for every
/// Hermite function up to n_max.
inline GridSpec default_grid(int n_max, double alpha_max, int points = 2000) {
  const double coherent = std::numbers::sqrt2 * alpha_max + 6.0;
  const double turning = std::sqrt(2.0 * n_max + 1.0) + 6.0;
  return GridSpec{std::max(coherent, turning), points, alpha_max};
}

class QuadratureTable {
 public:
  QuadratureTable(Eigen::VectorXd nodes, Eigen::VectorXd weights, int n_max)
      : x_(std::move(nodes)), w_(std::move(weights)), psi_(n_max + 1, x_.size()) {
    if (n_max < 0) throw DomainError("QuadratureTable: n_max must be >= 0");
    if (x_.size() == 0 || x_.size() != w_.size()) {
      throw DomainError("QuadratureTable: nodes and weights must be non-empty and equal length");
    }
    fill_hermite_functions();
  }

  int n_max() const noexcept { return static_cast<int>(psi_.rows()) - 1; }
  const Eigen::VectorXd& nodes() const noexcept { return x_; }
  const Eigen::VectorXd& weights() const noexcept { return w_; }
  /// psi(n, i) = psi_n(x_i).
  const Eigen::MatrixXd& psi() const noexcept { return psi_; }

  bool is_symmetric() const {
    const Eigen::Index m = x_.size();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (x_(i) != -x_(m - 1 - i) || w_(i) != w_(m - 1 - i)) return false;
    }
    return true;
  }

 private:
  void fill_hermite_functions() {
    const double c0 = std::pow(std::numbers::pi, -0.25);
    for (Eigen::Index i = 0; i < x_.size(); ++i) {
      const double x = x_(i);
      psi_(0, i) = c0 * std::exp(-0.5 * x * x);
      if (psi_.rows() > 1) psi_(1, i) = std::numbers::sqrt2 * x * psi_(0, i);
      for (Eigen::Index n = 1; n + 1 < psi_.rows(); ++n) {
        const double dn = static_cast<double>(n);
        psi_(n + 1, i) = x * std::sqrt(2.0 / (dn + 1.0)) * psi_(n, i) -
                         std::sqrt(dn / (dn + 1.0)) * psi_(n - 1, i);
      }
    }
  }

  Eigen::VectorXd x_;
  Eigen::VectorXd w_;
  Eigen::MatrixXd psi_;
};

inline QuadratureTable hermite_table(int n_max, const GridSpec& spec) {
  if (n_max < 0) throw DomainError("hermite_table: n_max must be >= 0");
  if (spec.points <= 0 || spec.points % (2 * kPanelOrder) != 0) {
    throw DomainError("hermite_table: points must be a positive multiple of " +
                      std::to_string(2 * kPanelOrder));
  }
  const double needed = std::numbers::sqrt2 * spec.alpha_max + 6.0;
  if (!(spec.half_width >= needed)) {
    throw DomainError("hermite_table: half-width " + std::to_string(spec.half_width) +
                      " too small for alpha_max; need >= " + std::to_string(needed));
  }

  using rule = boost::math::quadrature::gauss<double, kPanelOrder>;
  const auto& abscissa = rule::abscissa();
  const auto& weight = rule::weights();

  const int half_panels = spec.points / (2 * kPanelOrder);
  const double h = spec.half_width / half_panels;

  // Positive half first, mirrored afterwards so the grid is exactly symmetric.
  std::vector<std::pair<double, double>> positive;
  positive.reserve(spec.points / 2);
  for (int p = 0; p < half_panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (std::size_t k = abscissa.size(); k-- > 0;) {
      positive.emplace_back(mid - 0.5 * h * abscissa[k], 0.5 * h * weight[k]);
    }
    for (std::size_t k = 0; k < abscissa.size(); ++k) {
      positive.emplace_back(mid + 0.5 * h * abscissa[k], 0.5 * h * weight[k]);
    }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(positive.size());
  Eigen::VectorXd x(2 * m);
  Eigen::VectorXd w(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(m + i) = positive[i].first;
    w(m + i) = positive[i].second;
    x(m - 1 - i) = -positive[i].first;
    w(m - 1 - i) = positive[i].second;
  }
  return QuadratureTable(std::move(x), std::move(w), n_max);
}

/// Half-line overlap I+_{nm} = int_0^inf psi_n psi_m dx and the matrices
/// derived from it for sign-binned quadrature measurements.
struct HalfLineOverlap {
  Eigen::MatrixXd iplus;
  Eigen::MatrixXd iminus;  ///< int_{-inf}^0 psi_n psi_m, equal to (-1)^{n+m} I+

  int n_max() const noexcept { return static_cast<int>(iplus.rows()) - 1; }
  /// Matrix of the sign observable, 2 I+ - 1.
  Eigen::MatrixXd sign() const {
    return 2.0 * iplus - Eigen::MatrixXd::Identity(iplus.rows(), iplus.cols());
  }
};

inline HalfLineOverlap halfline_overlap(const QuadratureTable& table) {
  if (!table.is_symmetric()) {
    throw DomainError("halfline_overlap: quadrature grid is not symmetric about 0");
  }
  const Eigen::Index m = table.nodes().size();
  const Eigen::Index half = m / 2;
  // Odd node counts put a node at 0; it contributes half its weight to each side.
  Eigen::MatrixXd psi_pos = table.psi().rightCols(half);
  Eigen::VectorXd w_pos = table.weights().tail(half);
  Eigen::MatrixXd iplus = psi_pos * w_pos.asDiagonal() * psi_pos.transpose();
  if (m % 2 == 1) {
    const Eigen::VectorXd mid = table.psi().col(half);
    iplus += 0.5 * table.weights()(half) * mid * mid.transpose();
  }
  iplus = 0.5 * (iplus + iplus.transpose()).eval();

  HalfLineOverlap out;
  out.iminus = iplus;
  for (Eigen::Index n = 0; n < iplus.rows(); ++n) {
    for (Eigen::Index k = 0; k < iplus.cols(); ++k) {
      if ((n + k) % 2 == 1) out.iminus(n, k) = -iplus(n, k);
    }
  }
  out.iplus = std::move(iplus);
  return out;
}

/// Quadrature density |sum_n c_n psi_n(x_i)|^2 at the table nodes.
inline Eigen::VectorXd quadrature_density(const FockVector& state, const QuadratureTable& table) {
  if (state.n_max() > table.n_max()) throw DomainError("quadrature_density: table n_max too small");
  const Eigen::VectorXcd amp =
      table.psi().topRows(state.dim()).transpose().cast<cplx>() * state.amplitudes();
  return amp.cwiseAbs2();
}

}  // namespace macrobell
