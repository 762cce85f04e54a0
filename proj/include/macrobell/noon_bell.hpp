#pragma once

// Two-site Bell test with N-boson nonlinear beam splitters.
//
// Modes a, a2 sit at site A and b, b2 at site B.  Two NOON states, one on
// (a, b) and one on (a2, b2), are interfered; each site then runs its own
// beam-splitter evolution for a locally chosen time and counts bosons.  The
// outcome "+" at A is exactly N bosons in a and none in a2 (likewise at B).

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "macrobell/errors.hpp"
#include "macrobell/fock.hpp"
#include "macrobell/josephson.hpp"
#include "macrobell/parallel.hpp"

namespace macrobell {

inline constexpr double kDefaultNoonPhase = -std::numbers::pi / 2;

/// Joint amplitudes grouped by the boson totals (T_A, T_B) at the two sites.
/// Block (T_A, T_B) is a (T_A+1) x (T_B+1) matrix indexed by (n_a, n_b), with
/// n_a2 = T_A - n_a and n_b2 = T_B - n_b.
class TwoSiteState {
 public:
  using Key = std::pair<int, int>;

  TwoSiteState(int N, double theta, std::map<Key, Eigen::MatrixXcd> blocks)
      : N_(N), theta_(theta), blocks_(std::move(blocks)) {
    if (N_ < 1) throw DomainError("TwoSiteState: N must be >= 1");
    for (const auto& [key, block] : blocks_) {
      if (key.first < 0 || key.second < 0 || key.first + key.second != 2 * N_) {
        throw DomainError("TwoSiteState: block totals must sum to 2N");
      }
      if (block.rows() != key.first + 1 || block.cols() != key.second + 1) {
        throw DomainError("TwoSiteState: block shape does not match its totals");
      }
    }
    if (std::abs(norm() - 1.0) > 1e-10) throw DomainError("TwoSiteState: state is not normalized");
  }

  int N() const noexcept { return N_; }
  double theta() const noexcept { return theta_; }
  const std::map<Key, Eigen::MatrixXcd>& blocks() const noexcept { return blocks_; }

  const Eigen::MatrixXcd* block(int total_a, int total_b) const {
    auto it = blocks_.find({total_a, total_b});
    return it == blocks_.end() ? nullptr : &it->second;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& [key, block] : blocks_) s += block.squaredNorm();
    return std::sqrt(s);
  }

  double block_weight(int total_a, int total_b) const {
    const auto* b = block(total_a, total_b);
    return b ? b->squaredNorm() : 0.0;
  }

 private:
  int N_;
  double theta_;
  std::map<Key, Eigen::MatrixXcd> blocks_;
};

/// (|N>_a|0>_b + e^{i theta}|0>_a|N>_b)/sqrt2  x  (|0>_a2|N>_b2 - i|N>_a2|0>_b2)/sqrt2.
inline TwoSiteState prepare_two_noon(int N, double theta = kDefaultNoonPhase) {
  if (N < 1) throw DomainError("prepare_two_noon: N must be >= 1");
  if (!std::isfinite(theta)) throw DomainError("prepare_two_noon: theta must be finite");
  const cplx i(0.0, 1.0);
  const cplx phase = std::polar(1.0, theta);

  std::map<TwoSiteState::Key, Eigen::MatrixXcd> blocks;
  Eigen::MatrixXcd nn = Eigen::MatrixXcd::Zero(N + 1, N + 1);
  nn(N, 0) = 0.5;                // a=N, a2=0 | b=0, b2=N
  nn(0, N) = -i * phase * 0.5;   // a=0, a2=N | b=N, b2=0
  Eigen::MatrixXcd a_heavy = Eigen::MatrixXcd::Zero(2 * N + 1, 1);
  a_heavy(N, 0) = -i * 0.5;      // a=N, a2=N | vacuum
  Eigen::MatrixXcd b_heavy = Eigen::MatrixXcd::Zero(1, 2 * N + 1);
  b_heavy(0, N) = phase * 0.5;   // vacuum | b=N, b2=N
  blocks.emplace(TwoSiteState::Key{N, N}, std::move(nn));
  blocks.emplace(TwoSiteState::Key{2 * N, 0}, std::move(a_heavy));
  blocks.emplace(TwoSiteState::Key{0, 2 * N}, std::move(b_heavy));
  return TwoSiteState(N, theta, std::move(blocks));
}

/// Measurement-time settings (scaled units).
struct TimeSettings {
  double t_a = 0.0;
  double t_a_prime = 0.0;
  double t_b = 0.0;
  double t_b_prime = 0.0;

  /// The one-parameter family (0, 2 phi, phi, 3 phi).
  static TimeSettings ch_family(double phi) { return {0.0, 2.0 * phi, phi, 3.0 * phi}; }

  void validate() const {
    if (!std::isfinite(t_a) || !std::isfinite(t_a_prime) || !std::isfinite(t_b) ||
        !std::isfinite(t_b_prime)) {
      throw DomainError("TimeSettings: all settings must be finite");
    }
  }
};

enum class NbsMode { ideal, hamiltonian };

inline std::string to_string(NbsMode mode) { return mode == NbsMode::ideal ? "ideal" : "hamiltonian"; }

/// Local beam splitters at both sites.  Ideal mode rotates |N,0> <-> |0,N>
/// exactly: U|N,0> = cos t |N,0> - i sin t |0,N>.  Hamiltonian mode runs the
/// Josephson dynamics for physical time t / omega_fitted.
class LocalNbs {
 public:
  static LocalNbs ideal(int N) {
    if (N < 1) throw DomainError("LocalNbs: N must be >= 1");
    return LocalNbs(N);
  }

  static LocalNbs hamiltonian(const NbsParams& params) { return LocalNbs(JosephsonSite(params)); }

  static LocalNbs make(const NbsParams& params, NbsMode mode) {
    return mode == NbsMode::ideal ? ideal(params.N) : hamiltonian(params);
  }

  NbsMode mode() const noexcept { return site_ ? NbsMode::hamiltonian : NbsMode::ideal; }
  int N() const noexcept { return N_; }
  const JosephsonSite* site() const noexcept { return site_ ? &*site_ : nullptr; }

  /// Scaled-to-physical conversion factor; 1 in ideal mode.
  double omega() const { return site_ ? static_cast<double>(site_->omega_fitted()) : 1.0; }

  /// Site unitary acting on sector `total` after scaled time t.
  Eigen::MatrixXcd site_unitary(int total, double t) const {
    if (site_) return site_->sector(total).propagator(site_->physical_time(t));
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(total + 1, total + 1);
    if (total == N_) {
      const cplx c = std::cos(t);
      const cplx s = cplx(0.0, -std::sin(t));
      u(N_, N_) = c;
      u(0, 0) = c;
      u(0, N_) = s;
      u(N_, 0) = s;
    }
    return u;
  }

  TwoSiteState apply(const TwoSiteState& state, double t_a, double t_b) const {
    if (state.N() != N_) throw DomainError("LocalNbs::apply: state N does not match beam splitter N");
    if (!std::isfinite(t_a) || !std::isfinite(t_b)) throw DomainError("LocalNbs::apply: non-finite time");
    if (!site_) check_ideal_support(state);

    std::map<int, Eigen::MatrixXcd> ua;
    std::map<int, Eigen::MatrixXcd> ub;
    std::map<TwoSiteState::Key, Eigen::MatrixXcd> out;
    for (const auto& [key, block] : state.blocks()) {
      const auto [ta_total, tb_total] = key;
      if (!ua.contains(ta_total)) ua.emplace(ta_total, site_unitary(ta_total, t_a));
      if (!ub.contains(tb_total)) ub.emplace(tb_total, site_unitary(tb_total, t_b));
      out.emplace(key, ua.at(ta_total) * block * ub.at(tb_total).transpose());
    }
    return TwoSiteState(state.N(), state.theta(), std::move(out));
  }

 private:
  explicit LocalNbs(int N) : N_(N) {}
  explicit LocalNbs(JosephsonSite site) : N_(site.params().N), site_(std::move(site)) {}

  // The ideal splitter is only defined on span{|N,0>, |0,N>} of the N-boson
  // sector; other sectors (vacuum, 2N) pass through unchanged.
  void check_ideal_support(const TwoSiteState& state) const {
    constexpr double tol = 1e-14;
    for (const auto& [key, block] : state.blocks()) {
      if (key.first == N_) {
        for (int n = 1; n < N_; ++n) {
          if (block.row(n).norm() > tol) {
            throw DomainError("ideal beam splitter: site A has support outside {|N,0>, |0,N>}");
          }
        }
      }
      if (key.second == N_) {
        for (int n = 1; n < N_; ++n) {
          if (block.col(n).norm() > tol) {
            throw DomainError("ideal beam splitter: site B has support outside {|N,0>, |0,N>}");
          }
        }
      }
    }
  }

  int N_;
  std::optional<JosephsonSite> site_;
};

inline TwoSiteState apply_local_nbs(const TwoSiteState& state, const NbsParams& params, double t_a,
                                    double t_b, NbsMode mode) {
  if (params.N != state.N()) throw DomainError("apply_local_nbs: params.N does not match state");
  return LocalNbs::make(params, mode).apply(state, t_a, t_b);
}

// ---------------------------------------------------------------------------
// Number statistics

struct NumberOutcome {
  int n_a, n_a2, n_b, n_b2;
  double probability;
};

struct JointNumberDistribution {
  std::map<TwoSiteState::Key, double> site_totals;  ///< P(T_A, T_B)
  std::vector<NumberOutcome> outcomes;             ///< P(n_a, n_a2, n_b, n_b2)
  /// P(n_a = n, n_b = m, T_A = N), joint with the event T_A = N (not renormalized).
  Eigen::MatrixXd restricted;

  double total() const {
    double s = 0.0;
    for (const auto& [k, p] : site_totals) s += p;
    return s;
  }
};

inline JointNumberDistribution joint_number_distribution(const TwoSiteState& state) {
  const int N = state.N();
  JointNumberDistribution out;
  out.restricted = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (const auto& [key, block] : state.blocks()) {
    const auto [ta, tb] = key;
    const Eigen::MatrixXd p = block.cwiseAbs2();
    out.site_totals[key] = p.sum();
    for (int na = 0; na <= ta; ++na) {
      for (int nb = 0; nb <= tb; ++nb) out.outcomes.push_back({na, ta - na, nb, tb - nb, p(na, nb)});
    }
    if (ta == N) out.restricted += p;
  }
  return out;
}

/// P(+ at A, + at B): n_a = N, n_a2 = 0, n_b = N, n_b2 = 0.
inline double prob_plus_plus(const TwoSiteState& state) {
  const auto* b = state.block(state.N(), state.N());
  return b ? std::norm((*b)(state.N(), state.N())) : 0.0;
}

inline double prob_plus_a(const TwoSiteState& state) {
  double s = 0.0;
  for (const auto& [key, block] : state.blocks()) {
    if (key.first == state.N()) s += block.row(state.N()).squaredNorm();
  }
  return s;
}

inline double prob_plus_b(const TwoSiteState& state) {
  double s = 0.0;
  for (const auto& [key, block] : state.blocks()) {
    if (key.second == state.N()) s += block.col(state.N()).squaredNorm();
  }
  return s;
}

/// Probability outside the ideal outcome set: site totals other than {0, N, 2N},
/// plus, inside the (N,N) block, mode numbers other than 0 or N.
inline double off_support_mass(const TwoSiteState& state) {
  const int N = state.N();
  double mass = 0.0;
  for (const auto& [key, block] : state.blocks()) {
    const auto [ta, tb] = key;
    const auto allowed = [N](int t) { return t == 0 || t == N || t == 2 * N; };
    if (!allowed(ta) || !allowed(tb)) {
      mass += block.squaredNorm();
      continue;
    }
    if (ta == N && tb == N) {
      const Eigen::MatrixXd p = block.cwiseAbs2();
      mass += p.sum() - p(0, 0) - p(0, N) - p(N, 0) - p(N, N);
    }
  }
  return mass;
}

// ---------------------------------------------------------------------------
// Clauser-Horne statistic

struct SettingDistribution {
  double t_a;
  double t_b;
  std::map<TwoSiteState::Key, double> site_totals;
  Eigen::MatrixXd restricted;
};

struct ChReport {
  NbsMode mode;
  TimeSettings settings;
  double theta;
  double omega;  ///< scaled-to-physical conversion (1 in ideal mode)
  /// P_++ at (t_a,t_b), (t_a,t'_b), (t'_a,t_b), (t'_a,t'_b).
  std::array<double, 4> p_pp{};
  double p_A_plus;  ///< P_+^A(t'_a)
  double p_B_plus;  ///< P_+^B(t_b)
  double S;
  std::vector<SettingDistribution> distributions;

  bool violation() const { return S > 1.0; }
};

inline ChReport ch_statistic(const LocalNbs& nbs, const TimeSettings& settings,
                             double theta = kDefaultNoonPhase, bool keep_distributions = false) {
  settings.validate();
  const TwoSiteState initial = prepare_two_noon(nbs.N(), theta);
  const std::array<std::pair<double, double>, 4> pairs{{{settings.t_a, settings.t_b},
                                                        {settings.t_a, settings.t_b_prime},
                                                        {settings.t_a_prime, settings.t_b},
                                                        {settings.t_a_prime, settings.t_b_prime}}};
  ChReport report{nbs.mode(), settings, theta, nbs.omega(), {}, 0.0, 0.0, 0.0, {}};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const TwoSiteState evolved = nbs.apply(initial, pairs[k].first, pairs[k].second);
    report.p_pp[k] = prob_plus_plus(evolved);
    if (k == 2) {
      report.p_A_plus = prob_plus_a(evolved);
      report.p_B_plus = prob_plus_b(evolved);
    }
    if (keep_distributions) {
      auto dist = joint_number_distribution(evolved);
      report.distributions.push_back(
          {pairs[k].first, pairs[k].second, std::move(dist.site_totals), std::move(dist.restricted)});
    }
  }
  const double denominator = report.p_A_plus + report.p_B_plus;
  if (!(denominator > 0.0)) throw NumericalError("ch_statistic: zero marginal denominator");
  report.S = (report.p_pp[0] - report.p_pp[1] + report.p_pp[2] + report.p_pp[3]) / denominator;
  return report;
}

inline ChReport ch_statistic(const NbsParams& params, const TimeSettings& settings, double theta,
                             NbsMode mode) {
  return ch_statistic(LocalNbs::make(params, mode), settings, theta, true);
}

/// S(phi) along the (0, 2phi, phi, 3phi) family.
inline std::vector<ChReport> ch_sweep(const LocalNbs& nbs, const std::vector<double>& phis,
                                      double theta = kDefaultNoonPhase, unsigned workers = 1) {
  return parallel_map(phis.size(), workers, [&](std::size_t i) {
    return ch_statistic(nbs, TimeSettings::ch_family(phis[i]), theta);
  });
}

/// Largest deviation of S from the midpoint of its two neighbours along a
/// uniform sweep; measures ripples that a smooth curve does not have.
inline double sweep_roughness(const std::vector<ChReport>& reports) {
  double out = 0.0;
  for (std::size_t i = 1; i + 1 < reports.size(); ++i) {
    out = std::max(out, std::abs(reports[i].S - 0.5 * (reports[i - 1].S + reports[i + 1].S)));
  }
  return out;
}

/// Closed form of the ideal-splitter S along the (0, 2phi, phi, 3phi) family.
inline double ideal_ch_closed_form(double phi) {
  const double s1 = std::sin(phi);
  const double s3 = std::sin(3.0 * phi);
  return 0.5 * (3.0 * s1 * s1 - s3 * s3);
}

struct Maximum {
  double argmax;
  double value;
};

/// Grid scan over [lo, hi] followed by Brent refinement around the best node.
template <class Fn>
Maximum maximize_scalar(Fn&& fn, double lo, double hi, int steps = 720) {
  if (!(hi > lo) || steps < 2) throw DomainError("maximize_scalar: bad interval");
  int best = 0;
  double best_value = fn(lo);
  for (int k = 1; k <= steps; ++k) {
    const double v = fn(lo + (hi - lo) * k / steps);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double h = (hi - lo) / steps;
  const double a = std::max(lo, lo + (best - 1) * h);
  const double b = std::min(hi, lo + (best + 1) * h);
  auto neg = [&](double x) { return -fn(x); };
  const auto r = boost::math::tools::brent_find_minima(neg, a, b, 50);
  if (-r.second >= best_value) return {r.first, -r.second};
  return {lo + best * h, best_value};
}

// ---------------------------------------------------------------------------
// CHSH for the two-qubit beam-splitter model

enum class Branch { plus, minus };

/// B = E(t_a,t_b) - E(t_a,t'_b) + E(t'_a,t'_b) + E(t'_a,t_b) with
/// E = cos 2(t_a +- t_b).
inline double ideal_chsh(const TimeSettings& s, Branch branch) {
  s.validate();
  const double sgn = branch == Branch::plus ? 1.0 : -1.0;
  auto E = [sgn](double ta, double tb) { return std::cos(2.0 * (ta + sgn * tb)); };
  return E(s.t_a, s.t_b) - E(s.t_a, s.t_b_prime) + E(s.t_a_prime, s.t_b_prime) + E(s.t_a_prime, s.t_b);
}

}  // namespace macrobell
