#pragma once

// Symmetric tridiagonal eigensolver templated over the scalar type.
//
// The Josephson sector Hamiltonians are tridiagonal and, deep in the
// tunnelling-suppressed regime, their two lowest-lying relevant levels are
// split by less than 1e-19 of their magnitude.  Double precision cannot
// resolve that, so the solver is written once and instantiated with
// boost::multiprecision as well as with double.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "macrobell/errors.hpp"

namespace macrobell {

/// 50 significant digits; used for sector spectra and propagation phases.
using precise_real = boost::multiprecision::cpp_bin_float_50;

template <class Real>
struct TridiagonalEigen {
  std::size_t dim = 0;
  std::vector<Real> values;   ///< ascending
  std::vector<Real> vectors;  ///< column-major, column k pairs with values[k]

  const Real& vector(std::size_t row, std::size_t k) const { return vectors[k * dim + row]; }
};

namespace detail {

template <class Real>
Real hypot2(const Real& a, const Real& b) {
  using std::abs;
  using std::sqrt;
  const Real aa = abs(a);
  const Real ab = abs(b);
  if (aa > ab) {
    const Real r = ab / aa;
    return aa * sqrt(Real(1) + r * r);
  }
  if (ab == Real(0)) return Real(0);
  const Real r = aa / ab;
  return ab * sqrt(Real(1) + r * r);
}

}  // namespace detail

/// Eigen-decomposition of the symmetric tridiagonal matrix with the given
/// diagonal and first off-diagonal, by implicit-shift QL iteration.
template <class Real>
TridiagonalEigen<Real> tridiagonal_eigen(std::span<const Real> diagonal,
                                         std::span<const Real> off_diagonal) {
  using std::abs;
  const std::size_t n = diagonal.size();
  if (n == 0) throw DomainError("tridiagonal_eigen: empty matrix");
  if (off_diagonal.size() + 1 != n) {
    throw DomainError("tridiagonal_eigen: off-diagonal must have dim-1 entries");
  }

  std::vector<Real> d(diagonal.begin(), diagonal.end());
  std::vector<Real> e(off_diagonal.begin(), off_diagonal.end());
  e.push_back(Real(0));
  std::vector<Real> z(n * n, Real(0));
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = Real(1);
  auto at = [&](std::size_t row, std::size_t col) -> Real& { return z[col * n + row]; };

  const Real eps = std::numeric_limits<Real>::epsilon();
  constexpr int max_sweeps = 300;

  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const Real scale = abs(d[m]) + abs(d[m + 1]);
        if (abs(e[m]) <= eps * scale) break;
      }
      if (m == l) break;
      if (++iterations > max_sweeps) {
        throw NumericalError("tridiagonal_eigen: QL iteration did not converge");
      }
      Real g = (d[l + 1] - d[l]) / (Real(2) * e[l]);
      Real r = detail::hypot2(g, Real(1));
      g = d[m] - d[l] + e[l] / (g + (g >= Real(0) ? r : -r));
      Real s(1), c(1), p(0);
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        Real f = s * e[i];
        const Real b = c * e[i];
        r = detail::hypot2(f, g);
        e[i + 1] = r;
        if (r == Real(0)) {
          d[i + 1] -= p;
          e[m] = Real(0);
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + Real(2) * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        for (std::size_t k = 0; k < n; ++k) {
          f = at(k, i + 1);
          at(k, i + 1) = s * at(k, i) + c * f;
          at(k, i) = c * at(k, i) - s * f;
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = Real(0);
    } while (m != l);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  TridiagonalEigen<Real> out;
  out.dim = n;
  out.values.reserve(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values.push_back(d[src]);
    // Sign convention: largest-magnitude component positive.
    std::size_t pivot = 0;
    for (std::size_t row = 1; row < n; ++row) {
      if (abs(at(row, src)) > abs(at(pivot, src))) pivot = row;
    }
    const Real sign = at(pivot, src) < Real(0) ? Real(-1) : Real(1);
    for (std::size_t row = 0; row < n; ++row) out.vectors[k * n + row] = sign * at(row, src);
  }
  return out;
}

}  // namespace macrobell
