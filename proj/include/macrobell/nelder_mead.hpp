#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "macrobell/errors.hpp"

namespace macrobell {

struct NelderMeadResult {
  Eigen::VectorXd point;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int iterations = 0;
};

struct NelderMeadOptions {
  int max_evaluations = 200;
  double value_tolerance = 1e-12;  ///< stop when the simplex values span less than this
  double size_tolerance = 1e-10;   ///< ...or the simplex diameter falls below this
};

/// Downhill simplex with the standard coefficients (reflect 1, expand 2,
/// contract 1/2, shrink 1/2).  `initial` holds dim+1 vertices.  Non-finite
/// objective values are treated as +inf.
template <class Objective>
NelderMeadResult nelder_mead(Objective&& f, std::vector<Eigen::VectorXd> initial,
                             const NelderMeadOptions& options = {}) {
  const std::size_t n_vertices = initial.size();
  if (n_vertices < 2) throw DomainError("nelder_mead: need at least two vertices");
  const Eigen::Index dim = initial.front().size();
  if (static_cast<std::size_t>(dim) + 1 != n_vertices) {
    throw DomainError("nelder_mead: simplex must have dim+1 vertices");
  }

  NelderMeadResult result;
  // Past the budget every trial point counts as +inf, so no step is accepted.
  auto eval = [&](const Eigen::VectorXd& x) {
    if (result.evaluations >= options.max_evaluations) return std::numeric_limits<double>::infinity();
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> x = std::move(initial);
  std::vector<double> fx(n_vertices);
  for (std::size_t i = 0; i < n_vertices; ++i) fx[i] = eval(x[i]);

  std::vector<std::size_t> order(n_vertices);
  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
  };

  while (result.evaluations < options.max_evaluations) {
    sort_vertices();
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n_vertices - 2];

    double diameter = 0.0;
    for (std::size_t i = 0; i < n_vertices; ++i) diameter = std::max(diameter, (x[i] - x[best]).norm());
    if ((std::isfinite(fx[worst]) && fx[worst] - fx[best] < options.value_tolerance) ||
        diameter < options.size_tolerance) {
      break;
    }
    ++result.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < n_vertices; ++i) {
      if (i != worst) centroid += x[i];
    }
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd reflected = centroid + (centroid - x[worst]);
    const double f_reflected = eval(reflected);
    if (f_reflected < fx[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - x[worst]);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        x[worst] = expanded;
        fx[worst] = f_expanded;
      } else {
        x[worst] = reflected;
        fx[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fx[second_worst]) {
      x[worst] = reflected;
      fx[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < fx[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (x[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < (outside ? f_reflected : fx[worst])) {
      x[worst] = contracted;
      fx[worst] = f_contracted;
      continue;
    }
    if (options.max_evaluations - result.evaluations < static_cast<int>(dim)) break;
    for (std::size_t i = 0; i < n_vertices; ++i) {
      if (i == best) continue;
      x[i] = x[best] + 0.5 * (x[i] - x[best]);
      fx[i] = eval(x[i]);
    }
  }

  sort_vertices();
  result.point = x[order.front()];
  result.value = fx[order.front()];
  return result;
}

}  // namespace macrobell
