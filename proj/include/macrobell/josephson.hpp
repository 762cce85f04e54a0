#pragma once

// Two-mode Josephson Hamiltonian
//
//   H = kappa (a^dag a2 + a a2^dag) + g a^dag^2 a^2 + g a2^dag^2 a2^2
//
// on fixed-total-number sectors, exact propagation from the sector spectrum,
// and characterisation of the nonlinear beam-splitter regime.  hbar = 1.
//
// Basis index n in sector T is |n>_a |T-n>_a2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>

#include "macrobell/errors.hpp"
#include "macrobell/fock.hpp"
#include "macrobell/tridiagonal.hpp"

namespace macrobell {

struct NbsParams {
  int N = 1;           ///< bosons per NOON component
  double kappa = 1.0;  ///< tunnelling strength
  double g = 0.0;      ///< on-site nonlinearity

  void validate() const {
    if (N < 1) throw DomainError("NbsParams: N must be >= 1");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("NbsParams: kappa must be > 0");
    if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("NbsParams: g must be >= 0");
  }
};

/// Sector Hamiltonian with its spectrum.  Eigenvalues are kept to 50 digits
/// and stored relative to the lowest level; eigenvectors are rounded to double.
class SectorHamiltonian {
 public:
  SectorHamiltonian(const NbsParams& params, int total) : total_(total) {
    params.validate();
    if (total < 0) throw DomainError("build_sector_hamiltonian: total must be >= 0");
    const int dim = total + 1;

    std::vector<precise_real> diag(dim);
    std::vector<precise_real> off(dim - 1);
    const precise_real kappa(params.kappa);
    const precise_real g(params.g);
    matrix_ = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n <= total; ++n) {
      const std::int64_t m = total - n;
      diag[n] = g * precise_real(std::int64_t{n} * (n - 1) + m * (m - 1));
      matrix_(n, n) = static_cast<double>(diag[n]);
      if (n > 0) {
        off[n - 1] = kappa * sqrt(precise_real(std::int64_t{n} * (total - n + 1)));
        matrix_(n, n - 1) = matrix_(n - 1, n) = static_cast<double>(off[n - 1]);
      }
    }

    auto eig = tridiagonal_eigen<precise_real>(diag, off);
    reference_ = eig.values.front();
    relative_.reserve(dim);
    for (const auto& e : eig.values) relative_.push_back(e - reference_);
    vectors_.resize(dim, dim);
    for (int k = 0; k < dim; ++k) {
      for (int row = 0; row < dim; ++row) vectors_(row, k) = static_cast<double>(eig.vector(row, k));
    }
  }

  int total() const noexcept { return total_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return vectors_; }
  const precise_real& ground_energy() const noexcept { return reference_; }
  /// E_k - E_0, ascending.
  const std::vector<precise_real>& relative_energies() const noexcept { return relative_; }

  Eigen::VectorXd eigenvalues() const {
    Eigen::VectorXd out(dim());
    for (Eigen::Index k = 0; k < dim(); ++k) out(k) = static_cast<double>(reference_ + relative_[k]);
    return out;
  }

  /// e^{-i (E_k - E_0) t} for every level, phases reduced mod 2 pi at full precision.
  Eigen::VectorXcd phase_factors(const precise_real& t) const {
    static const precise_real two_pi = boost::math::constants::two_pi<precise_real>();
    Eigen::VectorXcd out(dim());
    for (Eigen::Index k = 0; k < dim(); ++k) {
      const double theta = static_cast<double>(fmod(relative_[k] * t, two_pi));
      out(k) = std::polar(1.0, -theta);
    }
    return out;
  }

  /// U(t) = V e^{-i Lambda t} V^T, up to the global phase e^{-i E_0 t}.
  Eigen::MatrixXcd propagator(const precise_real& t) const {
    const Eigen::MatrixXcd v = vectors_.cast<cplx>();
    return v * phase_factors(t).asDiagonal() * v.transpose();
  }

 private:
  int total_;
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd vectors_;
  precise_real reference_;
  std::vector<precise_real> relative_;
};

inline SectorHamiltonian build_sector_hamiltonian(const NbsParams& params, int total) {
  return SectorHamiltonian(params, total);
}

inline FockVector evolve(const SectorHamiltonian& h, const FockVector& psi0, const precise_real& t) {
  if (psi0.dim() != h.dim()) {
    throw DomainError("evolve: state dimension " + std::to_string(psi0.dim()) +
                      " does not match sector dimension " + std::to_string(h.dim()));
  }
  if (!psi0.is_normalized()) throw DomainError("evolve: input state is not normalized");
  const Eigen::MatrixXcd v = h.eigenvectors().cast<cplx>();
  Eigen::VectorXcd coeffs = v.transpose() * psi0.amplitudes();
  coeffs = coeffs.cwiseProduct(h.phase_factors(t));
  Eigen::VectorXcd out = v * coeffs;
  // Rounding in V can push the norm a few ulps above 1.
  const double sq = out.squaredNorm();
  if (sq > 1.0) out /= std::sqrt(sq);
  return FockVector(std::move(out));
}

inline double energy(const SectorHamiltonian& h, const FockVector& psi) {
  if (psi.dim() != h.dim()) throw DomainError("energy: dimension mismatch");
  const Eigen::VectorXcd hpsi = h.matrix().cast<cplx>() * psi.amplitudes();
  return psi.amplitudes().dot(hpsi).real();
}

/// Return probabilities of |N,0> and transfer probability to |0,N> for the
/// initial state |N,0>, evaluated without forming the full propagator.
struct NoonPopulations {
  double p_N;
  double p_0;
};

inline NoonPopulations noon_populations(const SectorHamiltonian& h, const precise_real& t) {
  const Eigen::Index n = h.dim() - 1;
  const auto& v = h.eigenvectors();
  const Eigen::VectorXcd ph = h.phase_factors(t);
  cplx stay = 0.0;
  cplx swap = 0.0;
  for (Eigen::Index k = 0; k <= n; ++k) {
    stay += v(n, k) * v(n, k) * ph(k);
    swap += v(0, k) * v(n, k) * ph(k);
  }
  if (n == 0) return {std::norm(stay), std::norm(stay)};
  return {std::norm(stay), std::norm(swap)};
}

// ---------------------------------------------------------------------------
// Frequencies

/// Evaluates 2 g N / (N-1)! (kappa/g)^N with hbar = 1.  Infinite when g = 0 and N > 1.
inline double omega_formula(const NbsParams& params) {
  params.validate();
  const int n = params.N;
  if (params.g == 0.0) {
    return n == 1 ? 2.0 * params.kappa : std::numeric_limits<double>::infinity();
  }
  const double log_value = std::log(2.0 * n) + n * std::log(params.kappa) +
                           (1 - n) * std::log(params.g) - std::lgamma(static_cast<double>(n));
  return std::exp(log_value);
}

/// Half the splitting of the two eigenstates carrying most of |N,0>; the
/// angular frequency of p_N = cos^2(omega t) in an ideal two-level picture.
inline precise_real doublet_frequency(const SectorHamiltonian& h) {
  const Eigen::Index n = h.dim() - 1;
  if (n == 0) throw NumericalError("doublet_frequency: sector with no bosons does not oscillate");
  Eigen::Index first = -1;
  Eigen::Index second = -1;
  for (Eigen::Index k = 0; k <= n; ++k) {
    const double w = h.eigenvectors()(n, k) * h.eigenvectors()(n, k);
    if (first < 0 || w > std::pow(h.eigenvectors()(n, first), 2)) {
      second = first;
      first = k;
    } else if (second < 0 || w > std::pow(h.eigenvectors()(n, second), 2)) {
      second = k;
    }
  }
  const precise_real split = abs(h.relative_energies()[first] - h.relative_energies()[second]);
  if (split == 0) throw NumericalError("doublet_frequency: degenerate doublet");
  return split / 2;
}

/// Fits omega from the first 1/2-crossing of p_N, sampled at 512 points over
/// one doublet half-period and refined by linear interpolation between the
/// bracketing samples.  The ripples riding on p_N are many orders of magnitude
/// faster than the oscillation, so the crossing is only defined to within the
/// ripple amplitude; a fixed sampling grid keeps the value reproducible.
inline precise_real fit_omega(const SectorHamiltonian& h, int samples = 512) {
  if (samples < 2) throw DomainError("fit_omega: need at least 2 samples");
  const precise_real estimate = doublet_frequency(h);
  const precise_real pi = boost::math::constants::pi<precise_real>();
  precise_real prev_t = 0;
  double prev_excess = 0.5;
  for (int k = 1; k <= samples; ++k) {
    const precise_real t = pi * k / samples / estimate;
    const double excess = noon_populations(h, t).p_N - 0.5;
    if (excess < 0.0) {
      const precise_real crossing = prev_t + (t - prev_t) * precise_real(prev_excess / (prev_excess - excess));
      return pi / 4 / crossing;
    }
    prev_t = t;
    prev_excess = excess;
  }
  throw NumericalError("fit_omega: p_N never drops below 1/2; no beam-splitter oscillation");
}

// ---------------------------------------------------------------------------
// Traces

struct NbsTrace {
  std::vector<double> times;         ///< physical, units of 1/kappa scale set by H
  std::vector<double> scaled_times;  ///< omega_fitted * t; empty if no fit
  std::vector<double> p_N;
  std::vector<double> p_0;
  std::vector<double> leakage;
  std::optional<precise_real> omega_fitted;

  double max_leakage() const {
    return leakage.empty() ? 0.0 : *std::max_element(leakage.begin(), leakage.end());
  }
};

struct ScaledFrequency {
  double omega_formula;
  precise_real omega_fitted;

  double fitted() const { return static_cast<double>(omega_fitted); }
};

/// Reference formula value and the frequency fitted from the first
/// 1/2-crossing of p_N inside `trace`, linearly interpolated.
inline ScaledFrequency scaled_frequency(const NbsParams& params, const NbsTrace& trace) {
  params.validate();
  for (std::size_t i = 1; i < trace.p_N.size(); ++i) {
    if (trace.p_N[i - 1] >= 0.5 && trace.p_N[i] < 0.5) {
      const double e0 = trace.p_N[i - 1] - 0.5;
      const double e1 = trace.p_N[i] - 0.5;
      const precise_real t0(trace.times[i - 1]);
      const precise_real crossing = t0 + (precise_real(trace.times[i]) - t0) * precise_real(e0 / (e0 - e1));
      if (crossing <= 0) break;
      return {omega_formula(params), boost::math::constants::pi<precise_real>() / 4 / crossing};
    }
  }
  throw NumericalError("scaled_frequency: trace too short to locate one oscillation");
}

inline NbsTrace nbs_trace(const NbsParams& params, std::span<const double> t_grid) {
  params.validate();
  if (t_grid.empty()) throw DomainError("nbs_trace: empty time grid");
  const SectorHamiltonian h(params, params.N);
  NbsTrace trace;
  trace.times.assign(t_grid.begin(), t_grid.end());
  for (double t : t_grid) {
    if (!std::isfinite(t)) throw DomainError("nbs_trace: non-finite time");
    const auto pop = noon_populations(h, precise_real(t));
    trace.p_N.push_back(pop.p_N);
    trace.p_0.push_back(pop.p_0);
    trace.leakage.push_back(std::max(0.0, 1.0 - pop.p_N - pop.p_0));
  }
  try {
    trace.omega_fitted = scaled_frequency(params, trace).omega_fitted;
    for (double t : trace.times) trace.scaled_times.push_back(static_cast<double>(*trace.omega_fitted * t));
  } catch (const NumericalError&) {
    // No full half-swing inside the grid; scaled times stay empty.
  }
  return trace;
}

/// Uniform grid of `steps`+1 points on [0, t_max].
inline std::vector<double> uniform_grid(double t_max, int steps) {
  if (steps < 1) throw DomainError("uniform_grid: steps must be >= 1");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("uniform_grid: t_max must be > 0");
  std::vector<double> out(steps + 1);
  for (int k = 0; k <= steps; ++k) out[k] = t_max * k / steps;
  return out;
}

// ---------------------------------------------------------------------------

/// Josephson dynamics at one site: sector Hamiltonians for the boson totals a
/// two-site protocol can produce, plus the fitted scaled-time frequency.
class JosephsonSite {
 public:
  explicit JosephsonSite(const NbsParams& params)
      : JosephsonSite(params, std::vector<int>{0, params.N, 2 * params.N}) {}

  JosephsonSite(const NbsParams& params, const std::vector<int>& totals) : params_(params) {
    params.validate();
    for (int t : totals) {
      if (!sectors_.contains(t)) sectors_.emplace(t, SectorHamiltonian(params, t));
    }
    if (!sectors_.contains(params.N)) sectors_.emplace(params.N, SectorHamiltonian(params, params.N));
    omega_ = fit_omega(sectors_.at(params.N));
  }

  const NbsParams& params() const noexcept { return params_; }
  const precise_real& omega_fitted() const noexcept { return omega_; }

  const SectorHamiltonian& sector(int total) const {
    auto it = sectors_.find(total);
    if (it == sectors_.end()) throw DomainError("JosephsonSite: sector " + std::to_string(total) + " not built");
    return it->second;
  }

  /// Physical time corresponding to a scaled setting omega_fitted * t.
  precise_real physical_time(double scaled) const { return precise_real(scaled) / omega_; }

 private:
  NbsParams params_;
  std::map<int, SectorHamiltonian> sectors_;
  precise_real omega_;
};

}  // namespace macrobell
