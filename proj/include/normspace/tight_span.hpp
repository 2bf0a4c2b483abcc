#pragma once

// Admissible and extremal functions on a finite metric space and the
// 0-cells of its tight span E(X). Templated on the scalar so closed forms
// can be reproduced in exact rational arithmetic.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "normspace/errors.hpp"
#include "normspace/rational.hpp"

namespace normspace {

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr double tol() { return 1e-9; }
  static double abs(double x) { return std::abs(x); }
};

template <>
struct ScalarTraits<Rational> {
  static Rational tol() { return Rational(0); }
  static Rational abs(const Rational& x) { return sgn(x) < 0 ? Rational(-x) : x; }
};

template <typename T>
class FiniteMetric {
 public:
  using Scalar = T;
  using Traits = ScalarTraits<T>;

  FiniteMetric(std::vector<std::string> labels, std::vector<std::vector<T>> d)
      : labels_(std::move(labels)), d_(std::move(d)) {
    const std::size_t n = d_.size();
    if (n == 0) throw UsageError("metric space must be nonempty");
    if (labels_.empty())
      for (std::size_t i = 0; i < n; ++i) labels_.push_back("x" + std::to_string(i));
    if (labels_.size() != n) throw UsageError("label count does not match matrix size");
    for (const auto& row : d_)
      if (row.size() != n) throw UsageError("distance matrix is not square");
    const T tol = Traits::tol();
    for (std::size_t i = 0; i < n; ++i) {
      if (Traits::abs(d_[i][i]) > tol) throw UsageError("nonzero diagonal");
      for (std::size_t j = 0; j < n; ++j) {
        if (d_[i][j] < -tol) throw UsageError("negative distance");
        if (Traits::abs(d_[i][j] - d_[j][i]) > tol) throw UsageError("distance matrix is not symmetric");
        for (std::size_t k = 0; k < n; ++k)
          if (d_[i][k] > d_[i][j] + d_[j][k] + tol) throw UsageError("triangle inequality fails");
      }
    }
  }

  /// Upper-triangle constructor for small examples: d(0,1), d(0,2), ..., d(n-2,n-1).
  static FiniteMetric from_upper(std::size_t n, const std::vector<T>& upper) {
    std::vector<std::vector<T>> d(n, std::vector<T>(n, T(0)));
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (k >= upper.size()) throw UsageError("too few upper-triangle entries");
        d[i][j] = d[j][i] = upper[k++];
      }
    return FiniteMetric({}, std::move(d));
  }

  std::size_t size() const { return d_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<T>>& matrix() const { return d_; }
  const T& operator()(std::size_t i, std::size_t j) const { return d_[i][j]; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<T>> d_;
};

template <typename T>
using Function = std::vector<T>;

namespace detail {
template <typename T>
void require_length(const Function<T>& f, const FiniteMetric<T>& x) {
  if (f.size() != x.size()) throw UsageError("function length does not match the metric space");
}
}  // namespace detail

/// f(x) + f(y) >= d(x, y) for all pairs (x = y included, forcing f >= 0).
template <typename T>
bool is_admissible(const Function<T>& f, const FiniteMetric<T>& x) {
  detail::require_length(f, x);
  const T tol = ScalarTraits<T>::tol();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i; j < x.size(); ++j)
      if (f[i] + f[j] < x(i, j) - tol) return false;
  return true;
}

/// max_y (d(x, y) - f(y)) over all y in X, y = x included.
template <typename T>
T extremal_sup(const Function<T>& f, const FiniteMetric<T>& x, std::size_t i) {
  T best = -f[i];
  for (std::size_t j = 0; j < x.size(); ++j) best = std::max(best, T(x(i, j) - f[j]));
  return best;
}

template <typename T>
bool is_extremal(const Function<T>& f, const FiniteMetric<T>& x) {
  if (!is_admissible(f, x)) throw UsageError("is_extremal: function is not admissible");
  const T tol = ScalarTraits<T>::tol();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (ScalarTraits<T>::abs(f[i] - extremal_sup(f, x, i)) > tol) return false;
  return true;
}

/// Cyclic coordinate descent f(x) <- max(0, max_{y != x} d(x, y) - f(y)) in
/// ascending point order until a sweep moves nothing by more than 1e-12.
template <typename T>
Function<T> extremal_closure(Function<T> f, const FiniteMetric<T>& x) {
  if (!is_admissible(f, x)) throw UsageError("extremal_closure: function is not admissible");
  const std::size_t n = x.size();
  for (int sweep = 0; sweep < 10'000; ++sweep) {
    T moved = T(0);
    for (std::size_t i = 0; i < n; ++i) {
      T target = T(0);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) target = std::max(target, T(x(i, j) - f[j]));
      const T delta = f[i] - target;
      if (delta > moved) moved = delta;
      if (target < f[i]) f[i] = target;
    }
    if (!(moved > T(1e-12))) return f;
  }
  throw DefectError("extremal_closure: no convergence");
}

/// e(x) = d(x, .)
template <typename T>
std::vector<Function<T>> kuratowski_embed(const FiniteMetric<T>& x) {
  std::vector<Function<T>> out;
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(x.matrix()[i]);
  return out;
}

template <typename T>
T ts_distance(const Function<T>& f, const Function<T>& g) {
  if (f.size() != g.size()) throw UsageError("ts_distance: length mismatch");
  T best = T(0);
  for (std::size_t i = 0; i < f.size(); ++i) best = std::max(best, T(ScalarTraits<T>::abs(f[i] - g[i])));
  return best;
}

constexpr std::size_t kMaxTightSpanPoints = 6;

namespace detail {

inline bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-12) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

inline bool solve_square(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b,
                         std::vector<Rational>& x) {
  QMatrix m(b.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i][j];
  return solve(m, b, x);
}

}  // namespace detail

/// 0-cells of E(X): solutions of n independent tight constraints
/// f(x) + f(y) = d(x, y) (x = y allowed) that are admissible, hence vertices of
/// the admissibility polyhedron. Sorted lexicographically, deduplicated.
template <typename T>
std::vector<Function<T>> tight_span_vertices(const FiniteMetric<T>& x) {
  const std::size_t n = x.size();
  if (n > kMaxTightSpanPoints) throw InfeasibleScale("tight_span_vertices supports at most 6 points");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
  const std::size_t np = pairs.size();
  std::vector<Function<T>> out;
  std::vector<std::size_t> pick(n);
  for (std::size_t k = 0; k < n; ++k) pick[k] = k;
  const T tol = ScalarTraits<T>::tol();
  for (;;) {
    std::vector<std::vector<T>> a(n, std::vector<T>(n, T(0)));
    std::vector<T> b(n);
    for (std::size_t r = 0; r < n; ++r) {
      const auto [i, j] = pairs[pick[r]];
      a[r][i] = a[r][i] + T(1);
      a[r][j] = a[r][j] + T(1);
      b[r] = x(i, j);
    }
    Function<T> f;
    if (detail::solve_square(a, b, f) && is_admissible(f, x)) {
      for (auto& v : f)
        if (ScalarTraits<T>::abs(v) <= tol) v = T(0);
      const bool dup = std::any_of(out.begin(), out.end(), [&](const Function<T>& g) {
        return !(ts_distance(f, g) > tol);
      });
      if (!dup) {
        if (!is_extremal(f, x)) throw DefectError("tight_span_vertices: vertex is not extremal");
        out.push_back(std::move(f));
      }
    }
    std::size_t k = n;
    while (k > 0 && pick[k - 1] == k - 1 + np - n) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t r = k; r < n; ++r) pick[r] = pick[r - 1] + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace normspace
