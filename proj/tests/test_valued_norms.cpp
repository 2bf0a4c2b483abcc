#include <gtest/gtest.h>

#include <numeric>

#include "normspace/valued_norms.hpp"

using namespace normspace;

namespace {

const PAdicContext kP2(2);

QVector qv(std::initializer_list<long> xs) {
  QVector v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

DiagNorm lattice_norm(const PAdicContext& ctx, std::vector<QVector> cols) {
  const std::size_t n = cols.size();
  return {ctx, QMatrix::from_columns(cols), QVector(n, Rational(0))};
}

// sup over the integer box {-r..r}^n of log eta(v) - log eta'(v), evaluated
// directly from coordinates, without the closed form.
Rational brute_sup(const DiagNorm& a, const DiagNorm& b, long r) {
  const std::size_t n = a.dim();
  std::vector<long> v(n, -r);
  bool have = false;
  Rational best;
  while (true) {
    QVector x(n);
    bool zero = true;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = v[i];
      zero = zero && v[i] == 0;
    }
    if (!zero) {
      const Rational diff = eval_log_norm(a, x).value() - eval_log_norm(b, x).value();
      if (!have || diff > best) best = diff;
      have = true;
    }
    std::size_t k = 0;
    while (k < n && v[k] == r) v[k++] = -r;
    if (k == n) break;
    ++v[k];
  }
  return best;
}

long gcd_all(const std::vector<long>& xs) {
  long g = 0;
  for (long x : xs) g = std::gcd(g, x);
  return g;
}

long vp(long x, long p) {
  long v = 0;
  for (x = std::labs(x); x % p == 0; x /= p) ++v;
  return v;
}

// Elementary divisors of an integer 2x2 matrix from gcds of minors:
// d1 = gcd(entries), d1 d2 = |det|. Distance to the standard vertex is
// max(v_p(d1), v_p(d2)).
long snf_distance_2x2(long a, long b, long c, long d, long p) {
  const long d1 = gcd_all({a, b, c, d});
  const long det = std::labs(a * d - b * c);
  return std::max(vp(d1, p), vp(det / d1, p));
}

}  // namespace

TEST(EvalLogNorm, DefinitionExamples) {
  EXPECT_EQ(eval_log_norm(DiagNorm::standard(kP2, 2), qv({1, 2})).value(), 0);
  EXPECT_EQ(eval_log_norm(DiagNorm::standard(kP2, qv({3, -1})), qv({1, 0})).value(), 3);
  EXPECT_EQ(eval_log_norm(DiagNorm::standard(kP2, 2), qv({4, 8})).value(), -2);
  EXPECT_TRUE(eval_log_norm(DiagNorm::standard(kP2, 2), qv({0, 0})).is_bottom());
  EXPECT_THROW(eval_log_norm(DiagNorm::standard(kP2, 2), qv({1, 2, 3})), UsageError);
}

TEST(EvalLogNorm, Ultrametric) {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const DiagNorm eta = random_diag_norm(rng, kP2, 3);
    QVector u(3), v(3), s(3);
    for (std::size_t i = 0; i < 3; ++i) {
      u[i] = rng.uniform_int(-9, 9);
      v[i] = rng.uniform_int(-9, 9);
      s[i] = u[i] + v[i];
    }
    EXPECT_LE(eval_log_norm(eta, s), max(eval_log_norm(eta, u), eval_log_norm(eta, v)));
  }
}

TEST(LeqNorms, Examples) {
  Rng rng(1);
  const DiagNorm eta = random_diag_norm(rng, kP2, 2);
  EXPECT_TRUE(leq_norms(eta, eta));
  EXPECT_TRUE(leq_norms(scale_norm(eta, -1), eta));
  EXPECT_FALSE(leq_norms(eta, scale_norm(eta, -1)));
}

TEST(LeqNorms, SublatticeAgainstBruteForce) {
  const DiagNorm std2 = DiagNorm::standard(kP2, 2);
  const DiagNorm lp = lattice_norm(kP2, {qv({2, 0}), qv({1, 1})});
  // brute force over {-8..8}^2
  const Rational s_std_lp = brute_sup(std2, lp, 8);
  const Rational s_lp_std = brute_sup(lp, std2, 8);
  EXPECT_EQ(leq_norms(std2, lp), s_std_lp <= 0);
  EXPECT_EQ(leq_norms(lp, std2), s_lp_std <= 0);
  EXPECT_EQ(s_lp_std, 1);  // (1,0) lies outside L'
  EXPECT_EQ(log_sup_ratio(lp, std2), 1);
  EXPECT_EQ(log_sup_ratio(std2, lp), 0);
}

TEST(ScaleNorm, ShiftsWeights) {
  const DiagNorm eta = DiagNorm::standard(kP2, 2);
  EXPECT_EQ(scale_norm(eta, 0), eta);
  const DiagNorm s = scale_norm(eta, 2);
  EXPECT_EQ(s.weights(), qv({2, 2}));
  EXPECT_EQ(gi_distance(eta, s), 2);
}

TEST(GiDistance, Examples) {
  const DiagNorm a = DiagNorm::standard(kP2, qv({3, -1}));
  const DiagNorm b = DiagNorm::standard(kP2, 2);
  EXPECT_EQ(gi_distance(a, b), 3);
  EXPECT_EQ(gi_distance(a, a), 0);
  EXPECT_EQ(gi_distance(b, lattice_norm(kP2, {qv({2, 0}), qv({1, 1})})), 1);
  EXPECT_THROW(gi_distance(DiagNorm::standard(kP2, 2), DiagNorm::standard(PAdicContext(3), 2)), UsageError);
}

TEST(GiDistance, ElementaryDivisorOracle) {
  Rng rng(2024);
  for (long p : {2L, 3L, 5L}) {
    const PAdicContext ctx(p);
    const DiagNorm s = DiagNorm::standard(ctx, 2);
    for (int t = 0; t < 200; ++t) {
      long a, b, c, d;
      do {
        a = rng.uniform_int(-20, 20);
        b = rng.uniform_int(-20, 20);
        c = rng.uniform_int(-20, 20);
        d = rng.uniform_int(-20, 20);
      } while (a * d - b * c == 0);
      // columns (a,c), (b,d)
      const DiagNorm l = lattice_norm(ctx, {qv({a, c}), qv({b, d})});
      EXPECT_EQ(gi_distance(s, l), snf_distance_2x2(a, b, c, d, p)) << a << " " << b << " " << c << " " << d;
    }
  }
}

TEST(GiDistance, MetricAxioms) {
  Rng rng(99);
  for (int t = 0; t < 1000; ++t) {
    const PAdicContext ctx(std::array<long, 3>{2, 3, 5}[static_cast<std::size_t>(rng.uniform_int(0, 2))]);
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 3));
    const DiagNorm a = random_diag_norm(rng, ctx, n), b = random_diag_norm(rng, ctx, n), c = random_diag_norm(rng, ctx, n);
    const Rational ab = gi_distance(a, b);
    ASSERT_EQ(ab, gi_distance(b, a));
    ASSERT_GE(ab, 0);
    ASSERT_EQ(gi_distance(a, a), 0);
    ASSERT_LE(gi_distance(a, c), ab + gi_distance(b, c));
  }
}

TEST(GiDistance, ApartmentIdentity) {
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    const DiagNorm a = random_diag_norm(rng, kP2, 3);
    QVector w(3);
    for (auto& x : w) x = make_rational(rng.uniform_int(-9, 9), 2);
    const DiagNorm b(kP2, a.basis(), w);
    Rational expect = 0;
    for (std::size_t i = 0; i < 3; ++i) expect = std::max(expect, Rational(abs(a.weights()[i] - w[i])));
    EXPECT_EQ(gi_distance(a, b), expect);
  }
}

TEST(GiDistance, BruteForceLowerBound) {
  Rng rng(17);
  for (int t = 0; t < 40; ++t) {
    const DiagNorm a = random_diag_norm(rng, kP2, 2, 2, 3, 1);
    const DiagNorm b = random_diag_norm(rng, kP2, 2, 2, 3, 1);
    const Rational s = brute_sup(a, b, 8);  // p^3 = 8
    EXPECT_LE(s, log_sup_ratio(a, b));
    // the closed form is attained on a basis vector of the common adapted basis
    const auto ab = common_adapted_basis(a, b);
    Rational attained;
    for (std::size_t j = 0; j < 2; ++j) {
      const QVector v = ab.basis.column(j);
      const Rational r = eval_log_norm(a, v).value() - eval_log_norm(b, v).value();
      if (j == 0 || r > attained) attained = r;
    }
    EXPECT_EQ(attained, log_sup_ratio(a, b));
  }
}

TEST(GiDistance, BallIsInterval) {
  Rng rng(23);
  for (int t = 0; t < 300; ++t) {
    const DiagNorm a = random_diag_norm(rng, kP2, 2), b = random_diag_norm(rng, kP2, 2);
    const Rational r = make_rational(rng.uniform_int(0, 16), 2);
    const bool in_ball = gi_distance(a, b) <= r;
    EXPECT_EQ(in_ball, leq_norms(scale_norm(a, -r), b) && leq_norms(b, scale_norm(a, r)));
  }
}

TEST(Stabilizer, Examples) {
  const QVector m00 = qv({0, 0}), m01 = qv({0, 1});
  EXPECT_TRUE(stabilizer_check(QMatrix::identity(2), m01, kP2));
  QMatrix u = QMatrix::identity(2);
  u(0, 1) = 1;
  EXPECT_TRUE(stabilizer_check(u, m00, kP2));
  u(0, 1) = Rational(1, 2);
  EXPECT_TRUE(stabilizer_check(u, m01, kP2));
  u(0, 1) = Rational(1, 4);
  EXPECT_FALSE(stabilizer_check(u, m01, kP2));
}

TEST(Stabilizer, FailureHasWitnessVector) {
  QMatrix u = QMatrix::identity(2);
  u(0, 1) = Rational(1, 4);
  const DiagNorm eta = DiagNorm::standard(kP2, qv({0, 1}));
  bool moved = false;
  for (long x = -4; x <= 4 && !moved; ++x)
    for (long y = -4; y <= 4 && !moved; ++y) {
      if (x == 0 && y == 0) continue;
      const QVector v = qv({x, y});
      moved = !(eval_log_norm(eta, u * v) == eval_log_norm(eta, v));
    }
  EXPECT_TRUE(moved);
}

TEST(Stabilizer, MatchesEvaluationOnRandomMatrices) {
  // oracle: u stabilizes iff eval(u v) = eval(v) on the basis vectors and on u^-1 of them
  Rng rng(8);
  int agree = 0;
  for (int t = 0; t < 200; ++t) {
    QMatrix u(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) u(i, j) = make_rational(rng.uniform_int(-4, 4), std::array<long, 3>{1, 2, 4}[static_cast<std::size_t>(rng.uniform_int(0, 2))]);
    if (determinant(u) == 0) continue;
    const QVector m = qv({rng.uniform_int(-2, 2), rng.uniform_int(-2, 2)});
    const DiagNorm eta = DiagNorm::standard(kP2, m);
    const DiagNorm pulled(kP2, inverse(u), m);  // v -> eta(u v)
    EXPECT_EQ(stabilizer_check(u, m, kP2), gi_distance(eta, pulled) == 0);
    ++agree;
  }
  EXPECT_GT(agree, 100);
}

TEST(CommonAdaptedBasis, SharedBasis) {
  Rng rng(4);
  const DiagNorm a = random_diag_norm(rng, kP2, 3);
  const DiagNorm b(kP2, a.basis(), qv({1, -2, 0}));
  const auto ab = common_adapted_basis(a, b);
  EXPECT_EQ(gi_distance(ab.first(kP2), a), 0);
  EXPECT_EQ(gi_distance(ab.second(kP2), b), 0);
  EXPECT_EQ(linf_distance(ab.weights_first, ab.weights_second), gi_distance(a, b));
}

TEST(CommonAdaptedBasis, SublatticeExample) {
  const auto ab = common_adapted_basis(DiagNorm::standard(kP2, 2), lattice_norm(kP2, {qv({2, 0}), qv({1, 1})}));
  QVector first = ab.weights_first, second = ab.weights_second;
  EXPECT_EQ(first, qv({0, 0}));
  std::sort(second.begin(), second.end());
  EXPECT_EQ(second, qv({0, 1}));
}

TEST(CommonAdaptedBasis, UnimodularPrecomposition) {
  // Changing the basis by a matrix that stabilizes the weights gives the same
  // norm; the adapted weights then agree up to order.
  Rng rng(12);
  int used = 0;
  for (int t = 0; t < 200; ++t) {
    const DiagNorm a = random_diag_norm(rng, kP2, 3, 3, 2, 1);
    QMatrix u = QMatrix::identity(3);
    for (int k = 0; k < 6; ++k) {
      const auto i = static_cast<std::size_t>(rng.uniform_int(0, 2)), j = static_cast<std::size_t>(rng.uniform_int(0, 2));
      if (i != j) u.axpy_column(i, j, Rational(rng.uniform_int(-3, 3)));
    }
    if (!stabilizer_check(u, a.weights(), kP2)) continue;
    ++used;
    const DiagNorm b(kP2, a.basis() * u, a.weights());
    EXPECT_EQ(gi_distance(a, b), 0);
    const auto ab = common_adapted_basis(a, b);
    QVector w1 = ab.weights_first, w2 = ab.weights_second;
    std::sort(w1.begin(), w1.end());
    std::sort(w2.begin(), w2.end());
    EXPECT_EQ(w1, w2);
  }
  EXPECT_GT(used, 20);
}

TEST(CommonAdaptedBasis, SelfVerifiesOnRandomPairs) {
  Rng rng(31);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const DiagNorm a = random_diag_norm(rng, kP2, n), b = random_diag_norm(rng, kP2, n);
    const auto ab = common_adapted_basis(a, b);
    ASSERT_EQ(gi_distance(ab.first(kP2), a), 0);
    ASSERT_EQ(gi_distance(ab.second(kP2), b), 0);
    ASSERT_EQ(linf_distance(ab.weights_first, ab.weights_second), gi_distance(a, b));
  }
}

TEST(Join, SameBasisIsCoordinateMax) {
  const DiagNorm a = DiagNorm::standard(kP2, qv({0, 2})), b = DiagNorm::standard(kP2, qv({1, 0}));
  const DiagNorm j = join_norms(a, b);
  EXPECT_EQ(j.weights(), qv({1, 2}));
  EXPECT_TRUE(j.basis().is_identity());
  const std::vector<DiagNorm> one{a};
  EXPECT_EQ(join_norms(one), a);
}

TEST(Join, PointwiseMaxOnSamples) {
  Rng rng(77);
  for (int t = 0; t < 10; ++t) {
    std::vector<DiagNorm> ns;
    for (int s = 0; s < 3; ++s) ns.push_back(random_diag_norm(rng, kP2, 2, 3, 6, 1));
    const DiagNorm j = join_norms(ns);
    for (int k = 0; k < 100; ++k) {
      const QVector v = qv({rng.uniform_int(-50, 50), rng.uniform_int(-50, 50)});
      if (v[0] == 0 && v[1] == 0) continue;
      LogValue m = LogValue::bottom();
      for (const auto& eta : ns) m = max(m, eval_log_norm(eta, v));
      EXPECT_GE(eval_log_norm(j, v), m);
    }
  }
}

TEST(Join, LeastUpperBound) {
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    std::vector<DiagNorm> ns;
    for (int s = 0; s < 3; ++s) ns.push_back(random_diag_norm(rng, kP2, 2));
    const DiagNorm j = join_norms(ns);
    for (const auto& eta : ns) EXPECT_TRUE(leq_norms(eta, j));
    for (int k = 1; k <= 10; ++k) EXPECT_TRUE(leq_norms(j, scale_norm(j, make_rational(k, 10))));
  }
}

TEST(HellyNa, TrivialCases) {
  Rng rng(3);
  const DiagNorm eta = random_diag_norm(rng, kP2, 2);
  const std::vector<DiagNorm> one{eta};
  const std::vector<Rational> a{Rational(3, 2)};
  const DiagNorm w = helly_witness_na(one, a);
  EXPECT_EQ(w, scale_norm(eta, Rational(-3, 2)));
  EXPECT_EQ(gi_distance(w, eta), Rational(3, 2));
  const std::vector<DiagNorm> two{eta, eta};
  const std::vector<Rational> z{Rational(0), Rational(0)};
  EXPECT_EQ(gi_distance(helly_witness_na(two, z), eta), 0);
}

TEST(HellyNa, RandomFamiliesWithSlack) {
  Rng rng(55);
  for (int t = 0; t < 30; ++t) {
    std::vector<DiagNorm> ns;
    for (int s = 0; s < 5; ++s) ns.push_back(random_diag_norm(rng, kP2, 2));
    std::vector<Rational> r(5, Rational(0));
    for (std::size_t s = 0; s < 5; ++s) {
      for (std::size_t u = 0; u < 5; ++u) r[s] = std::max(r[s], gi_distance(ns[s], ns[u]));
      r[s] = r[s] / 2 + make_rational(static_cast<long>(s), 7);
    }
    const DiagNorm w = helly_witness_na(ns, r);
    for (std::size_t s = 0; s < 5; ++s) EXPECT_LE(gi_distance(w, ns[s]), r[s]);
  }
}

TEST(HellyNa, ReportsViolatedPair) {
  const DiagNorm a = DiagNorm::standard(kP2, 2), b = DiagNorm::standard(kP2, qv({4, 0}));
  const std::vector<DiagNorm> ns{a, b};
  const std::vector<Rational> r{Rational(1), Rational(1)};
  try {
    helly_witness_na(ns, r);
    FAIL() << "expected PreconditionViolation";
  } catch (const PreconditionViolation& e) {
    EXPECT_NE(std::string(e.what()).find("balls 0 and 1"), std::string::npos);
  }
}
