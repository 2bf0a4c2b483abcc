#pragma once

// Diagonalizable ultrametric norms on Q^n for the p-adic absolute value.
//
// A norm is a basis (columns) plus log_p weights m; for coordinates x in that
// basis, log_p eta(v) = max_i (m_i - val_p(x_i)). All arithmetic is exact.

#include <algorithm>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "normspace/errors.hpp"
#include "normspace/rational.hpp"
#include "normspace/rng.hpp"

namespace normspace {

class PAdicContext {
 public:
  explicit PAdicContext(long p) : p_(p) {
    if (!is_prime(p)) throw UsageError("p = " + std::to_string(p) + " is not prime");
  }
  long p() const { return p_; }
  bool operator==(const PAdicContext&) const = default;

 private:
  long p_;
};

/// log_q of a norm value; bottom stands for the value of the zero vector.
class LogValue {
 public:
  static LogValue bottom() { return LogValue(); }
  static LogValue of(Rational r) {
    LogValue v;
    v.bottom_ = false;
    v.value_ = std::move(r);
    return v;
  }

  bool is_bottom() const { return bottom_; }
  const Rational& value() const {
    if (bottom_) throw UsageError("value() of bottom");
    return value_;
  }

  friend bool operator==(const LogValue& a, const LogValue& b) {
    if (a.bottom_ || b.bottom_) return a.bottom_ == b.bottom_;
    return a.value_ == b.value_;
  }
  friend bool operator<(const LogValue& a, const LogValue& b) {
    if (b.bottom_) return false;
    if (a.bottom_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const LogValue& a, const LogValue& b) { return !(b < a); }
  friend bool operator>=(const LogValue& a, const LogValue& b) { return !(a < b); }
  friend LogValue max(const LogValue& a, const LogValue& b) { return a < b ? b : a; }

  /// Shift by a rational; bottom absorbs.
  LogValue shifted(const Rational& a) const { return bottom_ ? *this : of(value_ + a); }

  std::string str() const { return bottom_ ? std::string("bottom") : to_string(value_); }

 private:
  LogValue() = default;
  bool bottom_ = true;
  Rational value_;
};

class DiagNorm {
 public:
  DiagNorm(PAdicContext ctx, QMatrix basis, QVector weights)
      : ctx_(ctx), basis_(std::move(basis)), weights_(std::move(weights)) {
    if (basis_.rows() != basis_.cols() || basis_.rows() == 0)
      throw UsageError("basis must be a nonempty square matrix");
    if (weights_.size() != basis_.rows()) throw UsageError("weights/basis dimension mismatch");
    if (determinant(basis_) == 0) throw UsageError("basis is singular");
    basis_inv_ = inverse(basis_);
  }

  static DiagNorm standard(PAdicContext ctx, std::size_t n) {
    return {ctx, QMatrix::identity(n), QVector(n, Rational(0))};
  }
  static DiagNorm standard(PAdicContext ctx, QVector weights) {
    const auto n = weights.size();
    return {ctx, QMatrix::identity(n), std::move(weights)};
  }

  const PAdicContext& ctx() const { return ctx_; }
  long p() const { return ctx_.p(); }
  std::size_t dim() const { return weights_.size(); }
  const QMatrix& basis() const { return basis_; }
  const QMatrix& basis_inverse() const { return basis_inv_; }
  const QVector& weights() const { return weights_; }
  QVector basis_vector(std::size_t j) const { return basis_.column(j); }

  QVector coordinates(const QVector& v) const {
    if (v.size() != dim()) throw UsageError("vector dimension mismatch");
    return basis_inv_ * v;
  }

  /// Structural equality (same basis and weights), not norm equality.
  bool operator==(const DiagNorm& o) const {
    return ctx_ == o.ctx_ && basis_ == o.basis_ && weights_ == o.weights_;
  }

 private:
  PAdicContext ctx_;
  QMatrix basis_;
  QMatrix basis_inv_;
  QVector weights_;
};

namespace detail {

inline void require_compatible(const DiagNorm& a, const DiagNorm& b) {
  if (!(a.ctx() == b.ctx())) throw UsageError("norms live over different primes");
  if (a.dim() != b.dim()) throw UsageError("norms have different dimensions");
}

/// max_i (m_i - val(x_i)) over nonzero coordinates.
inline LogValue weighted_max(const QVector& x, const QVector& m, long p) {
  LogValue best = LogValue::bottom();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sgn(x[i]) == 0) continue;
    best = max(best, LogValue::of(m[i] - valuation(x[i], p)));
  }
  return best;
}

}  // namespace detail

inline LogValue eval_log_norm(const DiagNorm& eta, const QVector& v) {
  return detail::weighted_max(eta.coordinates(v), eta.weights(), eta.p());
}

/// log_q sup_{v != 0} eta(v) / eta2(v); attained at a basis vector of eta2.
inline Rational log_sup_ratio(const DiagNorm& eta, const DiagNorm& eta2) {
  detail::require_compatible(eta, eta2);
  std::optional<Rational> best;
  for (std::size_t j = 0; j < eta2.dim(); ++j) {
    const Rational r = eval_log_norm(eta, eta2.basis_vector(j)).value() - eta2.weights()[j];
    if (!best || r > *best) best = r;
  }
  return *best;
}

/// eta <= eta2 pointwise.
inline bool leq_norms(const DiagNorm& eta, const DiagNorm& eta2) {
  return log_sup_ratio(eta, eta2) <= 0;
}

/// e^a eta: every weight shifted by a.
inline DiagNorm scale_norm(const DiagNorm& eta, const Rational& a) {
  QVector w = eta.weights();
  for (auto& x : w) x += a;
  return {eta.ctx(), eta.basis(), std::move(w)};
}

/// Goldman-Iwahori distance sup_v |log_q eta(v)/eta2(v)|, exact.
inline Rational gi_distance(const DiagNorm& eta, const DiagNorm& eta2) {
  const Rational a = log_sup_ratio(eta, eta2);
  const Rational b = log_sup_ratio(eta2, eta);
  return a > b ? a : b;
}

/// Coordinates of the second norm's basis in the first norm's basis, with inverse.
struct TransitionData {
  QMatrix g;
  QMatrix g_inv;
};

inline TransitionData transition(const DiagNorm& from, const DiagNorm& to) {
  detail::require_compatible(from, to);
  TransitionData t{from.basis_inverse() * to.basis(), to.basis_inverse() * from.basis()};
  if (!(t.g * t.g_inv).is_identity()) throw DefectError("transition inverse mismatch");
  return t;
}

/// True iff x -> u x preserves eta_m (checked entrywise on u and u^-1).
inline bool stabilizer_check(const QMatrix& u, const QVector& m, const PAdicContext& ctx) {
  if (u.rows() != u.cols() || u.rows() != m.size())
    throw UsageError("stabilizer_check: dimension mismatch");
  const QMatrix u_inv = inverse(u);  // throws on singular u
  auto passes = [&](const QMatrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t k = 0; k < a.cols(); ++k)
        if (sgn(a(i, k)) != 0 && m[i] - valuation(a(i, k), ctx.p()) > m[k]) return false;
    return true;
  };
  return passes(u) && passes(u_inv);
}

/// A basis in which two norms are simultaneously diagonal (a common apartment).
struct AdaptedBasis {
  QMatrix basis;
  QVector weights_first;
  QVector weights_second;
  /// Row operations applied to the first norm's coordinates (stabilizes its weights).
  QMatrix row_transform;
  /// Column operations applied to the second norm's coordinates.
  QMatrix col_transform;

  DiagNorm first(const PAdicContext& ctx) const { return {ctx, basis, weights_first}; }
  DiagNorm second(const PAdicContext& ctx) const { return {ctx, basis, weights_second}; }
};

inline Rational linf_distance(const QVector& a, const QVector& b) {
  Rational best = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rational d = abs(a[i] - b[i]);
    if (d > best) best = d;
  }
  return best;
}

/// Weighted Cartan pivoting on the transition matrix. The result is verified
/// (stabilizer checks on both transforms, monomial form, l-infinity identity)
/// and a DefectError is thrown if any check fails.
inline AdaptedBasis common_adapted_basis(const DiagNorm& eta, const DiagNorm& eta2) {
  detail::require_compatible(eta, eta2);
  const long p = eta.p();
  const std::size_t n = eta.dim();
  const QVector& m = eta.weights();
  const QVector& m2 = eta2.weights();

  QMatrix g = eta.basis_inverse() * eta2.basis();
  QMatrix s = QMatrix::identity(n);
  QMatrix t = QMatrix::identity(n);
  std::vector<bool> row_active(n, true), col_active(n, true);
  std::vector<std::size_t> pivot_col_of_row(n);

  for (std::size_t step = 0; step < n; ++step) {
    std::optional<Rational> best;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!row_active[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!col_active[j] || sgn(g(i, j)) == 0) continue;
        Rational score = m[i] - m2[j] - valuation(g(i, j), p);
        if (!best || score > *best) {
          best = std::move(score);
          bi = i;
          bj = j;
        }
      }
    }
    if (!best) throw DefectError("common_adapted_basis: singular minor");
    const Rational pivot = g(bi, bj);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == bi || !row_active[k] || sgn(g(k, bj)) == 0) continue;
      const Rational c = g(k, bj) / pivot;
      g.axpy_row(k, bi, c);
      s.axpy_row(k, bi, c);
    }
    for (std::size_t l = 0; l < n; ++l) {
      if (l == bj || !col_active[l] || sgn(g(bi, l)) == 0) continue;
      const Rational c = g(bi, l) / pivot;
      g.axpy_column(l, bj, c);
      t.axpy_column(l, bj, c);
    }
    row_active[bi] = false;
    col_active[bj] = false;
    pivot_col_of_row[bi] = bj;
  }

  AdaptedBasis out;
  out.basis = eta.basis() * inverse(s);
  out.weights_first = m;
  out.weights_second.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = pivot_col_of_row[i];
    out.weights_second[i] = m2[j] + valuation(g(i, j), p);
  }
  out.row_transform = std::move(s);
  out.col_transform = std::move(t);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (sgn(g(i, j)) != 0 && pivot_col_of_row[i] != j)
        throw DefectError("common_adapted_basis: result not monomial");
  if (!stabilizer_check(out.row_transform, m, eta.ctx()) ||
      !stabilizer_check(out.col_transform, m2, eta.ctx()))
    throw DefectError("common_adapted_basis: transform leaves the stabilizer");
  if (linf_distance(out.weights_first, out.weights_second) != gi_distance(eta, eta2))
    throw DefectError("common_adapted_basis: apartment distance mismatch");
  return out;
}

/// Least upper bound of two norms, diagonal in their common apartment.
inline DiagNorm join_norms(const DiagNorm& a, const DiagNorm& b) {
  const AdaptedBasis ab = common_adapted_basis(a, b);
  QVector w(a.dim());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = std::max(ab.weights_first[i], ab.weights_second[i]);
  return {a.ctx(), ab.basis, std::move(w)};
}

inline DiagNorm join_norms(std::span<const DiagNorm> norms) {
  if (norms.empty()) throw UsageError("join of an empty family");
  DiagNorm acc = norms.front();
  for (std::size_t s = 1; s < norms.size(); ++s) acc = join_norms(acc, norms[s]);
  return acc;
}

/// A common point of the closed balls B(norms[s], radii[s]).
/// Requires d(eta_s, eta_t) <= a_s + a_t for every pair.
inline DiagNorm helly_witness_na(std::span<const DiagNorm> norms, std::span<const Rational> radii) {
  if (norms.empty()) throw UsageError("helly_witness_na: empty family");
  if (norms.size() != radii.size()) throw UsageError("helly_witness_na: radii count mismatch");
  for (const auto& r : radii)
    if (r < 0) throw UsageError("helly_witness_na: negative radius");
  for (std::size_t s = 0; s < norms.size(); ++s)
    for (std::size_t t = s + 1; t < norms.size(); ++t) {
      const Rational d = gi_distance(norms[s], norms[t]);
      if (d > radii[s] + radii[t]) {
        std::ostringstream msg;
        msg << "balls " << s << " and " << t << " are incompatible: distance " << d.get_str()
            << " exceeds radius sum by " << Rational(d - radii[s] - radii[t]).get_str();
        throw PreconditionViolation(msg.str());
      }
    }
  std::vector<DiagNorm> lowered;
  lowered.reserve(norms.size());
  for (std::size_t s = 0; s < norms.size(); ++s) lowered.push_back(scale_norm(norms[s], -radii[s]));
  DiagNorm theta = join_norms(lowered);
  for (std::size_t s = 0; s < norms.size(); ++s)
    if (gi_distance(theta, norms[s]) > radii[s])
      throw DefectError("helly_witness_na: witness outside ball " + std::to_string(s));
  return theta;
}

/// Random diagonalizable norm: integer basis with entries in [-entry, entry]
/// and weights num/den with |num| <= weight_num, den in [1, max_den].
inline DiagNorm random_diag_norm(Rng& rng, PAdicContext ctx, std::size_t n, long entry = 3,
                                 long weight_num = 6, long max_den = 3) {
  for (;;) {
    QMatrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(i, j) = rng.uniform_int(-entry, entry);
    if (determinant(b) == 0) continue;
    QVector w(n);
    for (auto& x : w) {
      x = Rational(rng.uniform_int(-weight_num, weight_num), rng.uniform_int(1, max_den));
      x.canonicalize();
    }
    return {ctx, std::move(b), std::move(w)};
  }
}

}  // namespace normspace
