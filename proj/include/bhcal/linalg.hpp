#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "bhcal/scalar.hpp"

namespace bhcal::linalg {

template <Scalar T>
using Matrix = std::vector<std::vector<T>>;

namespace detail {

// Row index of the pivot for column `col` among rows [from, end), or -1.
template <Scalar T>
long pick_pivot(const Matrix<T>& m, std::size_t from, std::size_t col, double tol) {
  long best_row = -1;
  if constexpr (Arith<T>::exact) {
    (void)tol;
    for (std::size_t r = from; r < m.size(); ++r)
      if (!Arith<T>::is_zero(m[r][col])) return static_cast<long>(r);
  } else {
    double best = tol;
    for (std::size_t r = from; r < m.size(); ++r)
      if (std::fabs(m[r][col]) > best) {
        best = std::fabs(m[r][col]);
        best_row = static_cast<long>(r);
      }
  }
  return best_row;
}

template <Scalar T>
double max_abs(const Matrix<T>& m) {
  double s = 0;
  for (const auto& row : m)
    for (const auto& x : row) s = std::max(s, std::fabs(Arith<T>::to_double(x)));
  return s;
}

}  // namespace detail

/// Row rank by elimination (float mode treats entries below 1e-12 * max|a| as zero).
template <Scalar T>
std::size_t rank(Matrix<T> m) {
  if (m.empty()) return 0;
  const std::size_t cols = m.front().size();
  const double tol = Arith<T>::exact ? 0.0 : Arith<double>::merge_eps * std::max(1.0, detail::max_abs(m));
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    long p = detail::pick_pivot(m, r, c, tol);
    if (p < 0) continue;
    std::swap(m[r], m[static_cast<std::size_t>(p)]);
    for (std::size_t i = r + 1; i < m.size(); ++i) {
      if (Arith<T>::is_zero(m[i][c])) continue;
      T factor = m[i][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= factor * m[r][j];
    }
    ++r;
  }
  return r;
}

/// Solves the square system a x = b; nullopt when a is singular.
template <Scalar T>
std::optional<std::vector<T>> solve(Matrix<T> a, std::vector<T> b) {
  const std::size_t n = a.size();
  const double tol = Arith<T>::exact ? 0.0 : Arith<double>::merge_eps * std::max(1.0, detail::max_abs(a));
  for (std::size_t c = 0; c < n; ++c) {
    long p = detail::pick_pivot(a, c, c, tol);
    if (p < 0) return std::nullopt;
    std::swap(a[c], a[static_cast<std::size_t>(p)]);
    std::swap(b[c], b[static_cast<std::size_t>(p)]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || Arith<T>::is_zero(a[i][c])) continue;
      T factor = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= factor * a[c][j];
      b[i] -= factor * b[c];
    }
  }
  std::vector<T> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

}  // namespace bhcal::linalg
