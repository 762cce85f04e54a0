#pragma once

// Bell test with entangled cat states and local Kerr evolution H = Omega n^2.
// Outcomes are the signs of the quadratures X_A, X_B.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "macrobell/errors.hpp"
#include "macrobell/fock.hpp"
#include "macrobell/parallel.hpp"

namespace macrobell {

enum class Site { A, B };

inline std::string to_string(Site s) { return s == Site::A ? "A" : "B"; }

struct KerrParams {
  double Omega = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  int n_max = 0;  ///< 0 selects the default truncation for max(alpha, beta)

  int resolved_n_max() const { return n_max > 0 ? n_max : default_truncation(std::max(alpha, beta)); }

  void validate() const {
    if (!(Omega > 0.0) || !std::isfinite(Omega)) throw DomainError("KerrParams: Omega must be > 0");
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
      throw DomainError("KerrParams: alpha and beta must be real and >= 0");
    }
    if (n_max < 0) throw DomainError("KerrParams: n_max must be >= 0");
  }
};

/// Amplitudes below this make |+> and |-> overlap strongly.
inline constexpr double kNearDegenerateAmplitude = 0.5;

/// The two cat states of one site, as printed:
///   A:  |+> = -e^{i pi/6}(|e^{i pi/3} a> + |e^{-i pi/3} a>)/sqrt2,  |-> = |-a>
///   B:  |+> = -i|b>,  |-> = i e^{-i pi/6}(|-e^{i pi/3} b> + |-e^{-i pi/3} b>)/sqrt2
/// `plus`/`minus` are normalized after truncation; the *_raw vectors keep the
/// printed coefficients (the cat components are not orthogonal at finite amplitude).
struct CatBasis {
  Site site;
  double amplitude;
  FockVector plus;
  FockVector minus;
  Eigen::VectorXcd plus_raw;
  Eigen::VectorXcd minus_raw;
  cplx overlap;  ///< <+|-> of the normalized states
  bool near_degenerate;

  int n_max() const { return plus.n_max(); }
};

namespace detail {

inline Eigen::VectorXcd coherent_vector(cplx alpha, int n_max) {
  return coherent_amplitudes(alpha, n_max).amplitudes();
}

inline FockVector normalized(const Eigen::VectorXcd& v) {
  const double n = v.norm();
  if (n == 0.0) throw DegenerateBasisError("cat basis: zero vector");
  return FockVector(v / n);
}

}  // namespace detail

inline CatBasis build_cat_basis(double amplitude, Site site, int n_max = 0) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("build_cat_basis: amplitude must be real and >= 0");
  }
  if (amplitude == 0.0) {
    throw DegenerateBasisError("build_cat_basis: amplitude 0 makes |+> and |-> the same state");
  }
  if (n_max <= 0) n_max = default_truncation(amplitude);

  const cplx i(0.0, 1.0);
  const cplx up = std::polar(1.0, std::numbers::pi / 3);
  const cplx down = std::conj(up);
  const double r2 = std::numbers::sqrt2;
  Eigen::VectorXcd plus;
  Eigen::VectorXcd minus;
  if (site == Site::A) {
    plus = -std::polar(1.0, std::numbers::pi / 6) *
           (detail::coherent_vector(up * amplitude, n_max) + detail::coherent_vector(down * amplitude, n_max)) / r2;
    minus = detail::coherent_vector(-amplitude, n_max);
  } else {
    plus = -i * detail::coherent_vector(amplitude, n_max);
    minus = i * std::polar(1.0, -std::numbers::pi / 6) *
            (detail::coherent_vector(-up * amplitude, n_max) + detail::coherent_vector(-down * amplitude, n_max)) /
            r2;
  }
  FockVector p = detail::normalized(plus);
  FockVector m = detail::normalized(minus);
  const cplx ov = inner(p, m);
  return CatBasis{site, amplitude, std::move(p), std::move(m), std::move(plus), std::move(minus), ov,
                  amplitude < kNearDegenerateAmplitude};
}

/// Single-mode Kerr evolution e^{-i Omega n^2 t}.
inline Eigen::VectorXcd kerr_phases(int n_max, double omega_t) {
  Eigen::VectorXcd out(n_max + 1);
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  for (int n = 0; n <= n_max; ++n) {
    const long double theta = std::fmod(static_cast<long double>(n) * n * static_cast<long double>(omega_t), two_pi);
    out(n) = std::polar(1.0, -static_cast<double>(theta));
  }
  return out;
}

inline FockVector kerr_evolve(const FockVector& psi, double Omega, double t) {
  return FockVector(psi.amplitudes().cwiseProduct(kerr_phases(psi.n_max(), Omega * t)), psi.tail_mass());
}

/// The superposition the Kerr map is stated to produce from |alpha> at
/// t = pi/(3 Omega): -i sqrt(1/3)|->_a + sqrt(2/3)|+>_a, built from the
/// printed (unnormalized) cat vectors.
inline Eigen::VectorXcd third_period_superposition(const CatBasis& a) {
  if (a.site != Site::A) throw DomainError("third_period_superposition: needs the site-A basis");
  return cplx(0.0, -std::sqrt(1.0 / 3.0)) * a.minus_raw + std::sqrt(2.0 / 3.0) * a.plus_raw;
}

/// From |beta> at t = 2 pi/(3 Omega): sqrt(1/3)|+>_b - i sqrt(2/3)|->_b.
inline Eigen::VectorXcd two_thirds_period_superposition(const CatBasis& b) {
  if (b.site != Site::B) throw DomainError("two_thirds_period_superposition: needs the site-B basis");
  return std::sqrt(1.0 / 3.0) * b.plus_raw + cplx(0.0, -std::sqrt(2.0 / 3.0)) * b.minus_raw;
}

/// |<target|e^{-i n^2 Omega t}|amp>|^2 with t = pi/3 at site A and 2 pi/3 at
/// site B, the target being the stated superposition normalized after truncation.
inline double kerr_decomposition_fidelity(double amplitude, Site site, int n_max = 0) {
  const CatBasis basis = build_cat_basis(amplitude, site, n_max);
  const int n = basis.n_max();
  const double omega_t = site == Site::A ? std::numbers::pi / 3 : 2 * std::numbers::pi / 3;
  const Eigen::VectorXcd evolved = detail::coherent_vector(amplitude, n).cwiseProduct(kerr_phases(n, omega_t));
  const Eigen::VectorXcd target =
      site == Site::A ? third_period_superposition(basis) : two_thirds_period_superposition(basis);
  return std::norm(target.normalized().dot(evolved));
}

// ---------------------------------------------------------------------------

/// Two-mode amplitudes c(n_A, n_B).
class TwoModeState {
 public:
  explicit TwoModeState(Eigen::MatrixXcd amplitudes, double tail_mass = 0.0)
      : c_(std::move(amplitudes)), tail_(tail_mass) {
    if (c_.size() == 0) throw DomainError("TwoModeState: empty amplitude matrix");
    if (std::abs(c_.norm() - 1.0) > 1e-10) throw DomainError("TwoModeState: state is not normalized");
  }

  /// Skips the normalization check; used to build deliberately faulty states.
  static TwoModeState unchecked(Eigen::MatrixXcd amplitudes, double tail_mass = 0.0) {
    TwoModeState s;
    s.c_ = std::move(amplitudes);
    s.tail_ = tail_mass;
    return s;
  }

  const Eigen::MatrixXcd& amplitudes() const noexcept { return c_; }
  int n_max_a() const noexcept { return static_cast<int>(c_.rows()) - 1; }
  int n_max_b() const noexcept { return static_cast<int>(c_.cols()) - 1; }
  double norm() const { return c_.norm(); }
  double tail_mass() const noexcept { return tail_; }

  /// Tr(rho_A^2) of the normalized state.
  double reduced_purity_a() const {
    const Eigen::MatrixXcd rho = c_ * c_.adjoint() / c_.squaredNorm();
    return (rho * rho).trace().real();
  }

  Eigen::VectorXd number_distribution_a() const { return c_.cwiseAbs2().rowwise().sum(); }
  Eigen::VectorXd number_distribution_b() const { return c_.cwiseAbs2().colwise().sum().transpose(); }

 private:
  TwoModeState() = default;
  Eigen::MatrixXcd c_;
  double tail_ = 0.0;
};

struct PrepareOptions {
  bool renormalize = true;
};

struct BellCatState {
  TwoModeState state;
  double normalization;  ///< the constant multiplying (|+>|+> - |->|->)
  CatBasis a;
  CatBasis b;
};

/// N(|+>_a|+>_b - |->_a|->_b) with N^{-2} = 2 - 2 Re(<+|->_a <+|->_b).
inline BellCatState prepare_bell_cat(const KerrParams& params, PrepareOptions options = {}) {
  params.validate();
  const int n_max = params.resolved_n_max();
  CatBasis a = build_cat_basis(params.alpha, Site::A, n_max);
  CatBasis b = build_cat_basis(params.beta, Site::B, n_max);

  const double inv_sq = 2.0 - 2.0 * (a.overlap * b.overlap).real();
  if (!(inv_sq > 1e-300)) throw DegenerateBasisError("prepare_bell_cat: state vanishes");
  const double norm_const = 1.0 / std::sqrt(inv_sq);

  Eigen::MatrixXcd c = a.plus.amplitudes() * b.plus.amplitudes().transpose() -
                       a.minus.amplitudes() * b.minus.amplitudes().transpose();
  const double tail = std::max(a.plus.tail_mass(), b.plus.tail_mass());
  if (!options.renormalize) {
    return {TwoModeState::unchecked(std::move(c), tail), norm_const, std::move(a), std::move(b)};
  }
  c *= norm_const;
  // Cat components are truncated independently; fold the residual into N.
  c /= c.norm();
  return {TwoModeState(std::move(c), tail), norm_const, std::move(a), std::move(b)};
}

inline TwoModeState kerr_evolve(const TwoModeState& state, double Omega, double t_a, double t_b) {
  const Eigen::VectorXcd pa = kerr_phases(state.n_max_a(), Omega * t_a);
  const Eigen::VectorXcd pb = kerr_phases(state.n_max_b(), Omega * t_b);
  Eigen::MatrixXcd c = pa.asDiagonal() * state.amplitudes() * pb.asDiagonal();
  return TwoModeState::unchecked(std::move(c), state.tail_mass());
}

// ---------------------------------------------------------------------------
// Sign-binned quadrature statistics

struct SignStatistics {
  double p_pp = 0.0, p_pm = 0.0, p_mp = 0.0, p_mm = 0.0;

  double E() const { return p_pp + p_mm - p_pm - p_mp; }
  double total() const { return p_pp + p_pm + p_mp + p_mm; }
  double marginal_a_plus() const { return p_pp + p_pm; }
  double marginal_b_plus() const { return p_pp + p_mp; }
};

/// P(s_A, s_B) = sum conj(c_{n'm'}) c_{nm} I^{s_A}_{n'n} I^{s_B}_{m'm}.
inline SignStatistics sign_correlation(const TwoModeState& state, const HalfLineOverlap& overlap) {
  if (overlap.n_max() < state.n_max_a() || overlap.n_max() < state.n_max_b()) {
    throw DomainError("sign_correlation: overlap matrix smaller than the state's truncation");
  }
  const Eigen::MatrixXcd& c = state.amplitudes();
  const Eigen::Index ra = c.rows();
  const Eigen::Index rb = c.cols();
  const Eigen::MatrixXcd pa = overlap.iplus.topLeftCorner(ra, ra).cast<cplx>();
  const Eigen::MatrixXcd ma = overlap.iminus.topLeftCorner(ra, ra).cast<cplx>();
  const Eigen::MatrixXcd pb = overlap.iplus.topLeftCorner(rb, rb).cast<cplx>();
  const Eigen::MatrixXcd mb = overlap.iminus.topLeftCorner(rb, rb).cast<cplx>();

  const Eigen::MatrixXcd pa_c = pa * c;
  const Eigen::MatrixXcd ma_c = ma * c;
  auto contract = [&](const Eigen::MatrixXcd& left, const Eigen::MatrixXcd& right) {
    return c.conjugate().cwiseProduct(left * right).sum().real();
  };
  SignStatistics s;
  s.p_pp = contract(pa_c, pb);
  s.p_pm = contract(pa_c, mb);
  s.p_mp = contract(ma_c, pb);
  s.p_mm = contract(ma_c, mb);
  return s;
}

/// Same quadrant probabilities from the 2-D quadrature of the joint density
/// on the table's Gauss-Legendre nodes.
inline SignStatistics quadrant_probabilities_by_quadrature(const TwoModeState& state,
                                                           const QuadratureTable& table) {
  if (table.n_max() < state.n_max_a() || table.n_max() < state.n_max_b()) {
    throw DomainError("quadrant_probabilities_by_quadrature: table n_max too small");
  }
  if (!table.is_symmetric()) throw DomainError("quadrant_probabilities_by_quadrature: grid not symmetric");
  const Eigen::MatrixXcd psi_a = table.psi().topRows(state.n_max_a() + 1).cast<cplx>();
  const Eigen::MatrixXcd psi_b = table.psi().topRows(state.n_max_b() + 1).cast<cplx>();
  const Eigen::MatrixXd density = (psi_a.transpose() * state.amplitudes() * psi_b).cwiseAbs2();
  const Eigen::VectorXd& x = table.nodes();
  const Eigen::VectorXd& w = table.weights();
  SignStatistics s;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double p = w(i) * w(j) * density(i, j);
      const bool a_plus = x(i) > 0.0;
      const bool b_plus = x(j) > 0.0;
      (a_plus ? (b_plus ? s.p_pp : s.p_pm) : (b_plus ? s.p_mp : s.p_mm)) += p;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// CHSH with time settings

/// Kerr time settings in units of 1/Omega.
struct KerrSettings {
  double t_a = 0.0;
  double t_a_prime = std::numbers::pi / 3;
  double t_b = 0.0;
  double t_b_prime = 2 * std::numbers::pi / 3;
};

struct ChshReport {
  double alpha;
  double beta;
  int n_max;
  KerrSettings settings;
  /// E at (t_A,t_B), (t_A,t'_B), (t'_A,t_B), (t'_A,t'_B).
  std::array<double, 4> E{};
  std::array<SignStatistics, 4> quadrants{};
  double B = 0.0;
};

/// Overlap table covering truncation n_max and amplitude alpha_max.
inline HalfLineOverlap make_sign_overlap(int n_max, double alpha_max) {
  return halfline_overlap(hermite_table(n_max, default_grid(n_max, alpha_max)));
}

inline ChshReport chsh_kerr(const KerrParams& params, const KerrSettings& settings,
                            const HalfLineOverlap& overlap) {
  const BellCatState bell = prepare_bell_cat(params);
  const std::array<std::pair<double, double>, 4> pairs{{{settings.t_a, settings.t_b},
                                                        {settings.t_a, settings.t_b_prime},
                                                        {settings.t_a_prime, settings.t_b},
                                                        {settings.t_a_prime, settings.t_b_prime}}};
  ChshReport r{params.alpha, params.beta, params.resolved_n_max(), settings, {}, {}, 0.0};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const TwoModeState evolved = kerr_evolve(bell.state, params.Omega, pairs[k].first / params.Omega,
                                             pairs[k].second / params.Omega);
    r.quadrants[k] = sign_correlation(evolved, overlap);
    r.E[k] = r.quadrants[k].E();
  }
  r.B = r.E[0] - r.E[1] + r.E[3] + r.E[2];
  return r;
}

inline ChshReport chsh_kerr(const KerrParams& params, const KerrSettings& settings = {}) {
  params.validate();
  const int n_max = params.resolved_n_max();
  return chsh_kerr(params, settings, make_sign_overlap(n_max, std::max(params.alpha, params.beta)));
}

/// B along alpha = beta, sharing one overlap table sized for the largest amplitude.
inline std::vector<ChshReport> chsh_sweep(const std::vector<double>& amplitudes, double Omega = 1.0,
                                          unsigned workers = 1) {
  double amp_max = 0.0;
  for (double a : amplitudes) amp_max = std::max(amp_max, a);
  const int n_max = default_truncation(amp_max);
  const HalfLineOverlap overlap = make_sign_overlap(n_max, amp_max);
  return parallel_map(amplitudes.size(), workers, [&](std::size_t i) {
    KerrParams p{Omega, amplitudes[i], amplitudes[i], 0};
    return chsh_kerr(p, KerrSettings{}, overlap);
  });
}

// ---------------------------------------------------------------------------
// Joint quadrature density

struct DensityGrid {
  double half_width = 0.0;
  int points = 201;  ///< per axis; odd so that the origin is a node
};

struct QuadratureDensity {
  Eigen::VectorXd x;        ///< shared abscissae for X_A and X_B
  Eigen::MatrixXd density;  ///< density(i, j) = P(x_A = x_i, x_B = x_j)
  double mass = 0.0;        ///< trapezoidal integral over the grid
};

/// Half-width needed to hold coherent components of amplitude `amplitude`.
inline double density_half_width(double amplitude) { return std::numbers::sqrt2 * amplitude + 6.0; }

inline QuadratureDensity joint_quadrature_density(const TwoModeState& state, const DensityGrid& grid,
                                                  double amplitude_max = 0.0) {
  if (grid.points < 3) throw DomainError("joint_quadrature_density: need at least 3 points per axis");
  if (!(grid.half_width >= density_half_width(amplitude_max))) {
    throw DomainError("joint_quadrature_density: grid half-width below sqrt2*amplitude + 6");
  }
  const int n_max = std::max(state.n_max_a(), state.n_max_b());
  Eigen::VectorXd x(grid.points);
  Eigen::VectorXd w(grid.points);
  const double h = 2.0 * grid.half_width / (grid.points - 1);
  for (int i = 0; i < grid.points; ++i) {
    x(i) = -grid.half_width + h * i;
    w(i) = (i == 0 || i == grid.points - 1) ? 0.5 * h : h;
  }
  if (grid.points % 2 == 1) x(grid.points / 2) = 0.0;
  const QuadratureTable table(x, w, n_max);
  const Eigen::MatrixXcd psi_a = table.psi().topRows(state.n_max_a() + 1).cast<cplx>();
  const Eigen::MatrixXcd psi_b = table.psi().topRows(state.n_max_b() + 1).cast<cplx>();

  QuadratureDensity out;
  out.x = x;
  out.density = (psi_a.transpose() * state.amplitudes() * psi_b).cwiseAbs2();
  out.mass = w.transpose() * out.density * w;
  if (std::abs(out.mass - state.amplitudes().squaredNorm()) > 1e-6) {
    throw NumericalError("joint_quadrature_density: grid misses " + std::to_string(1.0 - out.mass) +
                         " of the probability; widen or refine the grid");
  }
  return out;
}

/// Sign-quadrant probabilities by integrating a density grid over each
/// half-line.  With the origin on a node and an even number of intervals per
/// half-line the composite Simpson rule is used; otherwise the trapezoidal
/// rule with axis nodes split evenly between the half-planes.
inline SignStatistics quadrant_probabilities(const QuadratureDensity& d) {
  const Eigen::Index m = d.x.size();
  if (m < 3) throw DomainError("quadrant_probabilities: grid too small");
  const double h = d.x(1) - d.x(0);
  Eigen::VectorXd plus = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd minus = Eigen::VectorXd::Zero(m);
  const Eigen::Index mid = m / 2;
  const bool simpson = m % 2 == 1 && d.x(mid) == 0.0 && mid % 2 == 0;
  if (simpson) {
    for (Eigen::Index j = 0; j <= mid; ++j) {
      const double w = (j == 0 || j == mid) ? h / 3 : (j % 2 == 1 ? 4 * h / 3 : 2 * h / 3);
      plus(mid + j) = w;
      minus(mid - j) = w;
    }
  } else {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double w = (i == 0 || i == m - 1) ? 0.5 * h : h;
      const double share = d.x(i) > 0.0 ? 1.0 : (d.x(i) < 0.0 ? 0.0 : 0.5);
      plus(i) = w * share;
      minus(i) = w * (1.0 - share);
    }
  }
  SignStatistics s;
  s.p_pp = plus.dot(d.density * plus);
  s.p_pm = plus.dot(d.density * minus);
  s.p_mp = minus.dot(d.density * plus);
  s.p_mm = minus.dot(d.density * minus);
  return s;
}

}  // namespace macrobell
