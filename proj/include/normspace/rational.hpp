#pragma once

// Exact rational helpers on top of GMP: p-adic valuations, string codecs,
// and small dense matrices over Q.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "normspace/errors.hpp"

namespace normspace {

using Rational = mpq_class;
using Integer = mpz_class;

using QVector = std::vector<Rational>;

inline bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

/// Exponent of p in a nonzero integer.
inline long valuation(const Integer& z, const Integer& p) {
  if (z == 0) throw UsageError("valuation of zero");
  Integer q = abs(z);
  long v = 0;
  while (mpz_divisible_p(q.get_mpz_t(), p.get_mpz_t())) {
    mpz_divexact(q.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    ++v;
  }
  return v;
}

/// p-adic valuation of a nonzero rational. Assumes canonical form.
inline long valuation(const Rational& x, long p) {
  const Integer pp(p);
  return valuation(Integer(x.get_num()), pp) - valuation(Integer(x.get_den()), pp);
}

/// num/den in lowest terms (mpq_class(num, den) does not reduce).
inline Rational make_rational(long num, long den) {
  if (den == 0) throw UsageError("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational pow_p(long p, long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p),
                static_cast<unsigned long>(e < 0 ? -e : e));
  return e >= 0 ? Rational(r) : Rational(Integer(1), r);
}

inline std::string to_string(const Rational& x) { return x.get_str(); }

inline Rational parse_rational(const std::string& s) {
  Rational r;
  if (s.empty() || r.set_str(s, 10) != 0) throw UsageError("malformed rational: '" + s + "'");
  if (r.get_den() == 0) throw UsageError("zero denominator: '" + s + "'");
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rational& x) { return x.get_den() == 1; }

/// Representative of x in Q / p^a Z_(p), chosen as r / p^k with 0 <= r < p^(a+k).
/// Two rationals are congruent modulo p^a Z_(p) iff their representatives coincide.
inline Rational reduce_mod_ppow(const Rational& x, long p, long a) {
  if (x == 0) return x;
  const Integer pp(p);
  Integer num = x.get_num();
  Integer den = x.get_den();
  long k = 0;
  while (mpz_divisible_p(den.get_mpz_t(), pp.get_mpz_t())) {
    mpz_divexact(den.get_mpz_t(), den.get_mpz_t(), pp.get_mpz_t());
    ++k;
  }
  // x = num / (p^k den), den coprime to p.
  const long e = a + k;
  if (e <= 0) return Rational(0);
  Integer modulus;
  mpz_ui_pow_ui(modulus.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
  Integer inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), modulus.get_mpz_t()) == 0)
    throw DefectError("reduce_mod_ppow: denominator not invertible");
  Integer r = (num * inv) % modulus;
  if (r < 0) r += modulus;
  Rational out(r, Integer(1));
  out /= pow_p(p, k);
  out.canonicalize();
  return out;
}

/// Dense row-major matrix over Q.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static QMatrix identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  /// Build from columns (each of equal length).
  static QMatrix from_columns(const std::vector<QVector>& cols) {
    if (cols.empty()) return {};
    QMatrix m(cols[0].size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != m.rows_) throw UsageError("ragged column list");
      for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  QVector column(std::size_t j) const {
    QVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  QVector operator*(const QVector& v) const {
    if (v.size() != cols_) throw UsageError("matrix-vector dimension mismatch");
    QVector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      Rational s = 0;
      for (std::size_t j = 0; j < cols_; ++j)
        if (sgn((*this)(i, j)) != 0 && sgn(v[j]) != 0) s += (*this)(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

  QMatrix operator*(const QMatrix& o) const {
    if (cols_ != o.rows_) throw UsageError("matrix product dimension mismatch");
    QMatrix out(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Rational& a = (*this)(i, k);
        if (sgn(a) == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j)
          if (sgn(o(k, j)) != 0) out(i, j) += a * o(k, j);
      }
    return out;
  }

  bool operator==(const QMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  bool is_identity() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
    return true;
  }

  void swap_columns(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

  /// col_dst -= c * col_src
  void axpy_column(std::size_t dst, std::size_t src, const Rational& c) {
    if (sgn(c) == 0) return;
    for (std::size_t i = 0; i < rows_; ++i)
      if (sgn((*this)(i, src)) != 0) (*this)(i, dst) -= c * (*this)(i, src);
  }

  /// row_dst -= c * row_src
  void axpy_row(std::size_t dst, std::size_t src, const Rational& c) {
    if (sgn(c) == 0) return;
    for (std::size_t j = 0; j < cols_; ++j)
      if (sgn((*this)(src, j)) != 0) (*this)(dst, j) -= c * (*this)(src, j);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

inline Rational determinant(QMatrix m) {
  if (m.rows() != m.cols()) throw UsageError("determinant of non-square matrix");
  const std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && sgn(m(piv, c)) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) m.axpy_row(r, c, m(r, c) / m(c, c));
  }
  return det;
}

/// Exact inverse by Gauss-Jordan; throws UsageError when singular.
inline QMatrix inverse(const QMatrix& a) {
  if (a.rows() != a.cols()) throw UsageError("inverse of non-square matrix");
  const std::size_t n = a.rows();
  QMatrix m = a;
  QMatrix inv = QMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && sgn(m(piv, c)) == 0) ++piv;
    if (piv == n) throw UsageError("singular matrix");
    if (piv != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(piv, j), m(c, j));
        std::swap(inv(piv, j), inv(c, j));
      }
    const Rational d = m(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) /= d;
      inv(c, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(m(r, c)) == 0) continue;
      const Rational f = m(r, c);
      m.axpy_row(r, c, f);
      inv.axpy_row(r, c, f);
    }
  }
  return inv;
}

/// Solve a x = b exactly; nullopt-like signalling via the bool.
inline bool solve(QMatrix a, QVector b, QVector& x) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw UsageError("solve: dimension mismatch");
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && sgn(a(piv, c)) == 0) ++piv;
    if (piv == n) return false;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(c, j));
      std::swap(b[piv], b[c]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(a(r, c)) == 0) continue;
      const Rational f = a(r, c) / a(c, c);
      a.axpy_row(r, c, f);
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a(i, i);
  return true;
}

/// Rank of the column set, exact.
inline std::size_t rank(QMatrix m) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t piv = r;
    while (piv < m.rows() && sgn(m(piv, c)) == 0) ++piv;
    if (piv == m.rows()) continue;
    if (piv != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(r, j));
    for (std::size_t i = r + 1; i < m.rows(); ++i) m.axpy_row(i, r, m(i, c) / m(r, c));
    ++r;
  }
  return r;
}

}  // namespace normspace
