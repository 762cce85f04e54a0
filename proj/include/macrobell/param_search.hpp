#pragma once

// Search for (kappa, g) at which the Josephson dynamics of |N,0> is closest to
// an ideal beam splitter: p_N + p_0 ~ 1 and p_N ~ cos^2(omega t).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "macrobell/errors.hpp"
#include "macrobell/josephson.hpp"
#include "macrobell/nelder_mead.hpp"
#include "macrobell/parallel.hpp"

namespace macrobell {

struct NbsObjective {
  double max_leakage = 0.0;    ///< max of 1 - p_N - p_0 over one fitted period
  double profile_error = 0.0;  ///< max |p_N - cos^2(omega t)| over the same period
  double score = 0.0;          ///< max of the two
  double omega_fitted = 0.0;
};

inline constexpr int kQualityPointsPerPeriod = 512;

inline NbsObjective nbs_quality(const NbsParams& params, int points_per_period = kQualityPointsPerPeriod) {
  params.validate();
  if (points_per_period < 8) throw DomainError("nbs_quality: need at least 8 points per period");
  const SectorHamiltonian h(params, params.N);
  const precise_real omega = fit_omega(h);
  const precise_real period = boost::math::constants::pi<precise_real>() / omega;

  NbsObjective out;
  out.omega_fitted = static_cast<double>(omega);
  for (int k = 0; k <= points_per_period; ++k) {
    const auto pop = noon_populations(h, period * k / points_per_period);
    const double c = std::cos(std::numbers::pi * k / points_per_period);
    out.max_leakage = std::max(out.max_leakage, 1.0 - pop.p_N - pop.p_0);
    out.profile_error = std::max(out.profile_error, std::abs(pop.p_N - c * c));
  }
  out.max_leakage = std::max(out.max_leakage, 0.0);
  out.score = std::max(out.max_leakage, out.profile_error);
  return out;
}

struct SearchRange {
  double lo;
  double hi;

  void validate(const char* name) const {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
      throw DomainError(std::string("optimize_nbs: ") + name + " range must satisfy 0 < lo <= hi");
    }
  }
};

struct OptimizeResult {
  NbsParams params;
  NbsObjective objective;
  int evaluations = 0;
  double grid_best_score = std::numeric_limits<double>::infinity();
  NbsParams grid_best;
};

inline constexpr int kMinimumSearchBudget = 50;

/// Log-spaced grid scan followed by simplex refinement in (log kappa, log g)
/// from the best grid point.  Half the budget goes to the grid.
inline OptimizeResult optimize_nbs(int N, SearchRange kappa_range, SearchRange g_range, int budget,
                                   unsigned workers = 1) {
  if (N < 1) throw DomainError("optimize_nbs: N must be >= 1");
  kappa_range.validate("kappa");
  g_range.validate("g");
  if (budget < kMinimumSearchBudget) {
    throw DomainError("optimize_nbs: budget must be >= " + std::to_string(kMinimumSearchBudget));
  }

  const int side = std::max(5, static_cast<int>(std::floor(std::sqrt(budget / 2.0))));
  const Eigen::Vector2d lo(std::log(kappa_range.lo), std::log(g_range.lo));
  const Eigen::Vector2d hi(std::log(kappa_range.hi), std::log(g_range.hi));
  const Eigen::Vector2d step = (hi - lo) / (side - 1);

  auto score_at = [&](const Eigen::Vector2d& z) -> std::optional<NbsObjective> {
    try {
      return nbs_quality(NbsParams{N, std::exp(z(0)), std::exp(z(1))});
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };
  auto node = [&](int i, int j) {
    return Eigen::Vector2d(i == side - 1 ? hi(0) : lo(0) + step(0) * i,
                           j == side - 1 ? hi(1) : lo(1) + step(1) * j);
  };

  const auto grid = parallel_map(static_cast<std::size_t>(side * side), workers, [&](std::size_t idx) {
    return score_at(node(static_cast<int>(idx) / side, static_cast<int>(idx) % side));
  });

  OptimizeResult result;
  result.evaluations = side * side;
  Eigen::Vector2d best_z;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid[idx] && grid[idx]->score < result.grid_best_score) {
      result.grid_best_score = grid[idx]->score;
      best_z = node(static_cast<int>(idx) / side, static_cast<int>(idx) % side);
      result.objective = *grid[idx];
    }
  }
  if (!std::isfinite(result.grid_best_score)) {
    throw NumericalError("optimize_nbs: no oscillating candidate in the search box");
  }
  result.grid_best = NbsParams{N, std::exp(best_z(0)), std::exp(best_z(1))};
  result.params = result.grid_best;

  const int remaining = budget - result.evaluations;
  if (remaining >= 3) {
    auto clamp = [&](Eigen::Vector2d z) { return Eigen::Vector2d(z.cwiseMax(lo).cwiseMin(hi)); };
    std::vector<Eigen::VectorXd> simplex{best_z};
    for (int d = 0; d < 2; ++d) {
      Eigen::Vector2d v = best_z;
      v(d) += (best_z(d) + step(d) <= hi(d)) ? step(d) : -step(d);
      simplex.push_back(clamp(v));
    }
    std::optional<NbsObjective> refined_best;
    Eigen::Vector2d refined_z = best_z;
    double refined_score = result.grid_best_score;
    auto objective = [&](const Eigen::VectorXd& z) {
      const Eigen::Vector2d zc = clamp(z);
      // Penalise leaving the box so the simplex is pulled back inside.
      const double outside = (z - Eigen::VectorXd(zc)).norm();
      const auto q = score_at(zc);
      if (!q) return std::numeric_limits<double>::infinity();
      if (outside == 0.0 && q->score < refined_score) {
        refined_score = q->score;
        refined_best = q;
        refined_z = zc;
      }
      return q->score + outside;
    };
    NelderMeadOptions opts;
    opts.max_evaluations = remaining;
    opts.value_tolerance = 1e-14;
    opts.size_tolerance = 1e-9;
    const auto nm = nelder_mead(objective, std::move(simplex), opts);
    result.evaluations += nm.evaluations;
    if (refined_best) {
      result.objective = *refined_best;
      result.params = NbsParams{N, std::exp(refined_z(0)), std::exp(refined_z(1))};
    }
  }
  return result;
}

}  // namespace macrobell
