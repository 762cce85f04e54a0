#pragma once

// Property suite behind `macrobell verify`.  Each check computes a residual and
// compares it with a fixed tolerance; modules can be filtered by name.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "macrobell/errors.hpp"
#include "macrobell/fock.hpp"
#include "macrobell/josephson.hpp"
#include "macrobell/kerr_cat.hpp"
#include "macrobell/noon_bell.hpp"
#include "macrobell/param_search.hpp"

namespace macrobell {

struct InvariantResult {
  std::string module;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::string filter;         ///< substring of the module name; empty runs everything
  bool inject_fault = false;  ///< prepare cat states without renormalization
};

/// Regression thresholds for the reference parameter sets, from the 60-digit
/// oracle in tests/oracles/nbs_oracle.py with a 1.25x margin.
struct NbsThreshold {
  NbsParams params;
  double max_leakage;
  double profile_error;
};

inline const std::vector<NbsThreshold>& nbs_regression_thresholds() {
  static const std::vector<NbsThreshold> table{
      {{2, 1.0, 30.0}, 2.8e-3, 5.7e-3},
      {{5, 20.0, 333.333}, 1.4e-3, 1.35e-3},
      {{7, 18.23, 47.85}, 3.5e-2, 4.6e-2},
      {{10, 10.0, 49.433}, 6.3e-3, 8.8e-3},
  };
  return table;
}

namespace detail {

struct Check {
  std::string module;
  std::string name;
  double tolerance;
  std::function<std::pair<double, std::string>()> run;
};

inline constexpr std::uint64_t kVerifySeed = 20240611;

/// Tolerance for "strictly decreasing": the largest successive ratio must stay below 1.
inline constexpr double kStrictDecrease = 1.0 - 1e-12;

/// Largest ratio v[i] / v[i-1].  Once a value is at or below `floor` the
/// sequence counts as converged and later values only have to stay there.
inline double worst_ratio(const std::vector<double>& v, double floor = 0.0) {
  double worst = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i - 1] <= floor) {
      if (v[i] > floor) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, v[i] / v[i - 1]);
  }
  return worst;
}

inline FockVector random_state(int n_max, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(n_max + 1);
  for (auto& c : v) c = cplx(normal(rng), normal(rng));
  return FockVector(v / v.norm());
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Site-A marginal over (T_A, n_a) of a two-site state.
inline std::map<std::pair<int, int>, double> site_a_marginal(const TwoSiteState& s) {
  std::map<std::pair<int, int>, double> out;
  for (const auto& [key, block] : s.blocks()) {
    const Eigen::VectorXd rows = block.cwiseAbs2().rowwise().sum();
    for (Eigen::Index n = 0; n < rows.size(); ++n) out[{key.first, static_cast<int>(n)}] += rows(n);
  }
  return out;
}

inline double marginal_distance(const std::map<std::pair<int, int>, double>& a,
                                const std::map<std::pair<int, int>, double>& b) {
  double worst = 0.0;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    worst = std::max(worst, std::abs(v - (it == b.end() ? 0.0 : it->second)));
  }
  return worst;
}

inline std::vector<Check> fock_checks() {
  std::vector<Check> out;
  out.push_back({"fock-core", "quadrature orthonormality", 1e-8, [] {
                   const int n_max = 120;
                   const QuadratureTable t = hermite_table(n_max, default_grid(n_max, 8.0));
                   const Eigen::MatrixXd gram = t.psi() * t.weights().asDiagonal() * t.psi().transpose();
                   return std::pair{max_abs_diff(gram, Eigen::MatrixXd::Identity(n_max + 1, n_max + 1)),
                                    std::string("n_max=120, 2000 nodes")};
                 }});
  out.push_back({"fock-core", "half-line overlap parity", 1e-9, [] {
                   const int n_max = 60;
                   const HalfLineOverlap o = halfline_overlap(hermite_table(n_max, default_grid(n_max, 5.0)));
                   double worst = 0.0;
                   for (int n = 0; n <= n_max; ++n) {
                     worst = std::max(worst, std::abs(o.iplus(n, n) - 0.5));
                     for (int m = 0; m <= n_max; ++m) {
                       if (m != n && (n + m) % 2 == 0) worst = std::max(worst, std::abs(o.iplus(n, m)));
                       worst = std::max(worst, std::abs(o.iplus(n, m) - o.iplus(m, n)));
                     }
                   }
                   return std::pair{worst, std::string("I+_nn = 1/2, even off-diagonal = 0, symmetric")};
                 }});
  out.push_back({"fock-core", "quadrature density normalization", 1e-8, [] {
                   const cplx alpha(2.5, -1.0);
                   const int n_max = default_truncation(std::abs(alpha));
                   const FockVector c = coherent_amplitudes(alpha, n_max);
                   const QuadratureTable t = hermite_table(n_max, default_grid(n_max, std::abs(alpha)));
                   const double mass = t.weights().dot(quadrature_density(c, t));
                   return std::pair{std::abs(mass - c.norm() * c.norm()), std::string("coherent alpha=2.5-1i")};
                 }});
  out.push_back({"fock-core", "sign matrix squares to identity under refinement", kStrictDecrease, [] {
                   // Residual of (S^2 - 1) on the n <= 10 block; reported value is the
                   // largest ratio between successive refinements.
                   std::vector<double> residuals;
                   for (int n_max : {40, 80, 160}) {
                     const QuadratureTable t =
                         hermite_table(n_max, GridSpec{std::sqrt(2.0 * n_max + 1) + 6, 10 * n_max, 0.0});
                     const Eigen::MatrixXd s = halfline_overlap(t).sign();
                     const Eigen::MatrixXd r = (s * s).topLeftCorner(11, 11) - Eigen::MatrixXd::Identity(11, 11);
                     residuals.push_back(r.cwiseAbs().maxCoeff());
                   }
                   char buf[96];
                   std::snprintf(buf, sizeof buf, "residuals %.3e, %.3e, %.3e", residuals[0], residuals[1],
                                 residuals[2]);
                   return std::pair{worst_ratio(residuals), std::string(buf)};
                 }});
  out.push_back({"fock-core", "coherent tail decreases with n_max", kStrictDecrease, [] {
                   std::vector<double> tails;
                   for (int n_max = 20; n_max <= 60; n_max += 5) {
                     tails.push_back(coherent_amplitudes(4.0, n_max, 1.0).tail_mass());
                   }
                   return std::pair{worst_ratio(tails), std::string("alpha=4, n_max 20..60, ratio of successive tails")};
                 }});
  return out;
}

inline std::vector<Check> josephson_checks() {
  std::vector<Check> out;
  out.push_back({"josephson-nbs", "eigenvector orthogonality", 1e-10, [] {
                   double worst = 0.0;
                   for (const auto& ref : nbs_regression_thresholds()) {
                     for (int total : {ref.params.N, 2 * ref.params.N}) {
                       const SectorHamiltonian h(ref.params, total);
                       const Eigen::MatrixXd& v = h.eigenvectors();
                       worst = std::max(worst, max_abs_diff(v.transpose() * v, Eigen::MatrixXd::Identity(h.dim(), h.dim())));
                     }
                   }
                   return std::pair{worst, std::string("reference sets, sectors N and 2N")};
                 }});
  out.push_back({"josephson-nbs", "norm conservation", 1e-10, [] {
                   std::mt19937_64 rng(kVerifySeed);
                   std::uniform_real_distribution<double> time(0.0, 1e4);
                   double worst = 0.0;
                   for (const auto& ref : nbs_regression_thresholds()) {
                     const SectorHamiltonian h(ref.params, ref.params.N);
                     for (int k = 0; k < 8; ++k) {
                       const FockVector psi = evolve(h, random_state(ref.params.N, rng), precise_real(time(rng)));
                       worst = std::max(worst, std::abs(psi.norm() - 1.0));
                     }
                   }
                   return std::pair{worst, std::string("random states, random times")};
                 }});
  out.push_back({"josephson-nbs", "time-reversal round trip", 1e-9, [] {
                   std::mt19937_64 rng(kVerifySeed + 1);
                   std::uniform_real_distribution<double> time(0.0, 1e4);
                   double worst = 0.0;
                   for (const auto& ref : nbs_regression_thresholds()) {
                     const SectorHamiltonian h(ref.params, ref.params.N);
                     for (int k = 0; k < 8; ++k) {
                       const FockVector psi = random_state(ref.params.N, rng);
                       const precise_real t(time(rng));
                       const FockVector back = evolve(h, evolve(h, psi, t), -t);
                       worst = std::max(worst, (back.amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff());
                     }
                   }
                   return std::pair{worst, std::string("evolve(evolve(psi, t), -t)")};
                 }});
  out.push_back({"josephson-nbs", "energy conservation", 1e-8, [] {
                   double worst = 0.0;
                   for (const auto& ref : nbs_regression_thresholds()) {
                     const SectorHamiltonian h(ref.params, ref.params.N);
                     const FockVector psi0 = FockVector::number_state(ref.params.N, ref.params.N);
                     const double e0 = energy(h, psi0);
                     const precise_real period = boost::math::constants::pi<precise_real>() / fit_omega(h);
                     for (int k = 1; k <= 16; ++k) {
                       worst = std::max(worst, std::abs(energy(h, evolve(h, psi0, period * k / 16)) - e0));
                     }
                   }
                   return std::pair{worst, std::string("|N,0> over one period, reference sets")};
                 }});
  out.push_back({"josephson-nbs", "sector structure", 1e-14, [] {
                   double worst = 0.0;
                   const NbsParams p{7, 18.23, 47.85};
                   const SectorHamiltonian h(p, 9);
                   const Eigen::MatrixXd& m = h.matrix();
                   for (int r = 0; r <= 9; ++r) {
                     for (int c = 0; c <= 9; ++c) {
                       double expected = 0.0;
                       if (r == c) expected = p.g * (r * (r - 1) + (9 - r) * (9 - r - 1));
                       if (r == c + 1) expected = p.kappa * std::sqrt(r * (9 - r + 1.0));
                       if (c == r + 1) expected = p.kappa * std::sqrt(c * (9 - c + 1.0));
                       worst = std::max(worst, std::abs(m(r, c) - expected) / std::max(1.0, std::abs(expected)));
                     }
                   }
                   return std::pair{worst, std::string("tridiagonal entries, total=9")};
                 }});
  out.push_back({"josephson-nbs", "two-state fidelity (reference sets)", 0.0, [] {
                   double worst = 0.0;
                   std::string detail;
                   for (const auto& ref : nbs_regression_thresholds()) {
                     const NbsObjective q = nbs_quality(ref.params);
                     const double excess = std::max(q.max_leakage - ref.max_leakage, q.profile_error - ref.profile_error);
                     worst = std::max(worst, std::max(excess, 0.0));
                     char buf[96];
                     std::snprintf(buf, sizeof buf, "N=%d leak %.2e prof %.2e; ", ref.params.N, q.max_leakage,
                                   q.profile_error);
                     detail += buf;
                   }
                   return std::pair{worst, detail};
                 }});
  return out;
}

inline std::vector<Check> noon_checks() {
  std::vector<Check> out;
  const NbsParams params{3, 4.0, 20.0};
  out.push_back({"noon-bell", "no-signalling (site-A marginal vs t_b)", 1e-10, [params] {
                   double worst = 0.0;
                   for (NbsMode mode : {NbsMode::ideal, NbsMode::hamiltonian}) {
                     const LocalNbs nbs = LocalNbs::make(params, mode);
                     const TwoSiteState s = prepare_two_noon(params.N);
                     for (double ta : {0.0, 0.4, 1.3}) {
                       const auto ref = site_a_marginal(nbs.apply(s, ta, 0.0));
                       for (double tb : {0.3, 0.9, 2.2}) {
                         worst = std::max(worst, marginal_distance(ref, site_a_marginal(nbs.apply(s, ta, tb))));
                       }
                     }
                   }
                   return std::pair{worst, std::string("N=3, both modes")};
                 }});
  out.push_back({"noon-bell", "two-site norm conservation", 1e-10, [params] {
                   double worst = 0.0;
                   for (NbsMode mode : {NbsMode::ideal, NbsMode::hamiltonian}) {
                     const LocalNbs nbs = LocalNbs::make(params, mode);
                     const TwoSiteState s = prepare_two_noon(params.N);
                     for (double t : {0.2, 0.7, 1.9}) worst = std::max(worst, std::abs(nbs.apply(s, t, 2 * t).norm() - 1.0));
                   }
                   return std::pair{worst, std::string("N=3, both modes")};
                 }});
  out.push_back({"noon-bell", "block conservation", 1e-12, [params] {
                   const LocalNbs nbs = LocalNbs::hamiltonian(params);
                   const TwoSiteState s = prepare_two_noon(params.N);
                   double worst = 0.0;
                   for (double t : {0.3, 1.1}) {
                     const TwoSiteState e = nbs.apply(s, t, 0.5 * t);
                     for (const auto& [key, block] : s.blocks()) {
                       worst = std::max(worst, std::abs(e.block_weight(key.first, key.second) - block.squaredNorm()));
                     }
                     if (e.blocks().size() != s.blocks().size()) worst = 1.0;
                   }
                   return std::pair{worst, std::string("(N,N), (2N,0), (0,2N) weights")};
                 }});
  out.push_back({"noon-bell", "2N blocks never give ++", 1e-15, [params] {
                   const LocalNbs nbs = LocalNbs::hamiltonian(params);
                   const TwoSiteState e = nbs.apply(prepare_two_noon(params.N), 0.6, 0.2);
                   const auto dist = joint_number_distribution(e);
                   double pp = 0.0;
                   for (const auto& o : dist.outcomes) {
                     if (o.n_a == params.N && o.n_a2 == 0 && o.n_b == params.N && o.n_b2 == 0) pp += o.probability;
                   }
                   return std::pair{std::abs(pp - prob_plus_plus(e)), std::string("full distribution vs (N,N) entry")};
                 }});
  out.push_back({"noon-bell", "ideal S matches closed form", 1e-12, [] {
                   const LocalNbs nbs = LocalNbs::ideal(4);
                   double worst = 0.0;
                   for (int k = 1; k < 40; ++k) {
                     const double phi = std::numbers::pi * k / 80;
                     worst = std::max(worst, std::abs(ch_statistic(nbs, TimeSettings::ch_family(phi)).S -
                                                      ideal_ch_closed_form(phi)));
                   }
                   return std::pair{worst, std::string("phi in (0, pi/2)")};
                 }});
  out.push_back({"noon-bell", "N=1 hamiltonian equals ideal", 1e-8, [] {
                   double worst = 0.0;
                   for (const NbsParams p : {NbsParams{1, 1.0, 0.0}, NbsParams{1, 2.5, 30.0}, NbsParams{1, 0.3, 7.0}}) {
                     const LocalNbs ham = LocalNbs::hamiltonian(p);
                     const LocalNbs ideal = LocalNbs::ideal(1);
                     for (int k = 1; k < 24; ++k) {
                       const TimeSettings s = TimeSettings::ch_family(std::numbers::pi * k / 48);
                       worst = std::max(worst, std::abs(ch_statistic(ham, s).S - ch_statistic(ideal, s).S));
                     }
                   }
                   return std::pair{worst, std::string("three (kappa, g) pairs, 23 phi values")};
                 }});
  return out;
}

inline std::vector<Check> kerr_checks(const VerifyOptions& options) {
  std::vector<Check> out;
  const PrepareOptions prep{!options.inject_fault};
  out.push_back({"kerr-cat", "prepared state norm", 1e-10, [prep] {
                   double worst = 0.0;
                   for (double a : {1.0, 3.0, 8.0}) {
                     const BellCatState s = prepare_bell_cat(KerrParams{1.0, a, a, 0}, prep);
                     worst = std::max(worst, std::abs(s.state.norm() - 1.0));
                   }
                   return std::pair{worst, std::string("alpha=beta in {1,3,8}")};
                 }});
  out.push_back({"kerr-cat", "evolution norm conservation", 1e-10, [prep] {
                   const BellCatState s = prepare_bell_cat(KerrParams{1.0, 4.0, 4.0, 0}, prep);
                   double worst = 0.0;
                   for (double t : {0.3, 1.7, 5.0}) {
                     worst = std::max(worst, std::abs(kerr_evolve(s.state, 1.0, t, 0.5 * t).norm() - 1.0));
                   }
                   return std::pair{worst, std::string("alpha=beta=4")};
                 }});
  out.push_back({"kerr-cat", "revival after 2 pi / Omega", 1e-12, [prep] {
                   double worst = 0.0;
                   for (double omega : {1.0, 2.5}) {
                     const BellCatState s = prepare_bell_cat(KerrParams{omega, 5.0, 5.0, 0}, prep);
                     const double period = 2 * std::numbers::pi / omega;
                     const TwoModeState a = kerr_evolve(s.state, omega, 0.7, 0.3);
                     const TwoModeState b = kerr_evolve(s.state, omega, 0.7 + period, 0.3 + period);
                     worst = std::max(worst, (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff());
                   }
                   return std::pair{worst, std::string("componentwise, alpha=beta=5")};
                 }});
  out.push_back({"kerr-cat", "photon-number distribution preserved", 1e-12, [prep] {
                   const BellCatState s = prepare_bell_cat(KerrParams{1.0, 3.0, 3.0, 0}, prep);
                   const TwoModeState e = kerr_evolve(s.state, 1.0, 1.234, 0.456);
                   const double worst =
                       std::max((e.number_distribution_a() - s.state.number_distribution_a()).cwiseAbs().maxCoeff(),
                                (e.number_distribution_b() - s.state.number_distribution_b()).cwiseAbs().maxCoeff());
                   return std::pair{worst, std::string("both modes")};
                 }});
  out.push_back({"kerr-cat", "no-signalling (P(s_A) vs t_B)", 1e-9, [prep] {
                   const double a = 3.0;
                   const KerrParams p{1.0, a, a, 0};
                   const BellCatState s = prepare_bell_cat(p, prep);
                   const HalfLineOverlap ov = make_sign_overlap(p.resolved_n_max(), a);
                   double worst = 0.0;
                   for (double ta : {0.0, std::numbers::pi / 3, 1.0}) {
                     const double ref = sign_correlation(kerr_evolve(s.state, 1.0, ta, 0.0), ov).marginal_a_plus();
                     for (double tb : {2 * std::numbers::pi / 3, 0.4, 2.9}) {
                       const double m = sign_correlation(kerr_evolve(s.state, 1.0, ta, tb), ov).marginal_a_plus();
                       worst = std::max(worst, std::abs(m - ref));
                     }
                   }
                   return std::pair{worst, std::string("alpha=beta=3")};
                 }});
  out.push_back({"kerr-cat", "quadrant probabilities: overlap vs 2-D quadrature", 1e-5, [prep] {
                   double worst = 0.0;
                   for (double a : {2.0, 3.0}) {
                     const KerrParams p{1.0, a, a, 0};
                     const BellCatState s = prepare_bell_cat(p, prep);
                     const HalfLineOverlap ov = make_sign_overlap(p.resolved_n_max(), a);
                     const KerrSettings st;
                     for (auto [ta, tb] : {std::pair{st.t_a, st.t_b}, std::pair{st.t_a, st.t_b_prime},
                                           std::pair{st.t_a_prime, st.t_b}, std::pair{st.t_a_prime, st.t_b_prime}}) {
                       const TwoModeState e = kerr_evolve(s.state, 1.0, ta, tb);
                       const SignStatistics x = sign_correlation(e, ov);
                       const SignStatistics y =
                           quadrant_probabilities(joint_quadrature_density(e, DensityGrid{density_half_width(a), 401}, a));
                       worst = std::max({worst, std::abs(x.p_pp - y.p_pp), std::abs(x.p_pm - y.p_pm),
                                         std::abs(x.p_mp - y.p_mp), std::abs(x.p_mm - y.p_mm)});
                     }
                   }
                   return std::pair{worst, std::string("alpha=beta in {2,3}, four setting pairs")};
                 }});
  out.push_back({"kerr-cat", "correlator bounds and quadrant sums", 1e-8, [prep] {
                   double worst = 0.0;
                   for (double a : {1.0, 2.5, 5.0}) {
                     const KerrParams p{1.0, a, a, 0};
                     const BellCatState s = prepare_bell_cat(p, prep);
                     const HalfLineOverlap ov = make_sign_overlap(p.resolved_n_max(), a);
                     for (double ta : {0.0, 1.0}) {
                       for (double tb : {0.0, 2.0}) {
                         const SignStatistics q = sign_correlation(kerr_evolve(s.state, 1.0, ta, tb), ov);
                         worst = std::max({worst, std::abs(q.total() - 1.0), std::max(0.0, std::abs(q.E()) - 1.0)});
                       }
                     }
                   }
                   return std::pair{worst, std::string("alpha in {1, 2.5, 5}")};
                 }});
  out.push_back({"kerr-cat", "B approaches 22/9 monotonically", kStrictDecrease, [] {
                   // Gaps below 1e-10 are at rounding level and count as converged.
                   std::vector<double> gaps;
                   for (double a : {4.0, 6.0, 8.0, 10.0}) {
                     gaps.push_back(std::abs(chsh_kerr(KerrParams{1.0, a, a, 0}).B - 22.0 / 9.0));
                   }
                   const double violation = worst_ratio(gaps, 1e-10);
                   char buf[128];
                   std::snprintf(buf, sizeof buf, "gaps %.2e %.2e %.2e %.2e", gaps[0], gaps[1], gaps[2], gaps[3]);
                   return std::pair{violation, std::string(buf)};
                 }});
  return out;
}

inline std::vector<Check> param_search_checks() {
  std::vector<Check> out;
  out.push_back({"param-search", "scale covariance", 1e-9, [] {
                   std::mt19937_64 rng(kVerifySeed + 2);
                   std::uniform_real_distribution<double> log_c(-3.0, 3.0);
                   double worst = 0.0;
                   for (const NbsParams p : {NbsParams{1, 2.0, 5.0}, NbsParams{2, 1.0, 30.0}, NbsParams{3, 2.0, 15.0}}) {
                     const NbsObjective base = nbs_quality(p);
                     for (int k = 0; k < 3; ++k) {
                       const double c = std::exp(log_c(rng));
                       const NbsObjective q = nbs_quality(NbsParams{p.N, c * p.kappa, c * p.g});
                       worst = std::max({worst, std::abs(q.max_leakage - base.max_leakage),
                                         std::abs(q.profile_error - base.profile_error),
                                         std::abs(q.omega_fitted / (c * base.omega_fitted) - 1.0)});
                     }
                   }
                   return std::pair{worst, std::string("N in {1,2,3}, c = exp(U(-3,3))")};
                 }});
  out.push_back({"param-search", "optimizer never worse than grid and reproducible", 0.0, [] {
                   const SearchRange kr{0.1, 10.0};
                   const SearchRange gr{1.0, 100.0};
                   const OptimizeResult a = optimize_nbs(2, kr, gr, 60);
                   const OptimizeResult b = optimize_nbs(2, kr, gr, 60);
                   const bool same = a.objective.score == b.objective.score && a.params.kappa == b.params.kappa &&
                                     a.params.g == b.params.g;
                   const double worse = std::max(0.0, a.objective.score - a.grid_best_score);
                   return std::pair{same ? worse : std::numeric_limits<double>::infinity(),
                                    std::string("N=2, budget 60, two runs")};
                 }});
  return out;
}

inline std::vector<Check> all_checks(const VerifyOptions& options) {
  std::vector<Check> out;
  for (auto&& group : {fock_checks(), josephson_checks(), noon_checks(), kerr_checks(options), param_search_checks()}) {
    out.insert(out.end(), group.begin(), group.end());
  }
  return out;
}

}  // namespace detail

/// Module names accepted by the filter.
inline std::vector<std::string> invariant_modules() {
  return {"fock-core", "josephson-nbs", "noon-bell", "kerr-cat", "param-search"};
}

/// Runs every check whose module name contains `options.filter`.  A check that
/// throws is reported as failed with the exception text.
inline std::vector<InvariantResult> run_invariants(const VerifyOptions& options = {}) {
  std::vector<InvariantResult> results;
  for (const auto& check : detail::all_checks(options)) {
    if (!options.filter.empty() && check.module.find(options.filter) == std::string::npos) continue;
    InvariantResult r{check.module, check.name, 0.0, check.tolerance, false, {}, 0.0};
    const auto start = std::chrono::steady_clock::now();
    try {
      auto [residual, detail] = check.run();
      r.residual = residual;
      r.detail = std::move(detail);
      r.passed = std::isfinite(residual) && residual <= check.tolerance;
    } catch (const std::exception& e) {
      r.residual = std::numeric_limits<double>::infinity();
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace macrobell
