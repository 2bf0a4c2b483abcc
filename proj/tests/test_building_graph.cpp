#include <gtest/gtest.h>

#include <set>

#include "normspace/building_graph.hpp"

using namespace normspace;

namespace {

const PAdicContext kP2(2);

QVector qv(std::initializer_list<long> xs) {
  QVector v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

using Elem = std::vector<long>;
using Module = std::set<Elem>;

// Z/q-span of the given generators in (Z/q)^n by closure under addition.
Module closure(const std::vector<Elem>& gens, long q, std::size_t n) {
  Module m{Elem(n, 0)};
  std::vector<Elem> frontier{Elem(n, 0)};
  while (!frontier.empty()) {
    std::vector<Elem> next;
    for (const auto& x : frontier)
      for (const auto& g : gens) {
        Elem y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = (x[i] + g[i]) % q;
        if (m.insert(y).second) next.push_back(y);
      }
    frontier = std::move(next);
  }
  return m;
}

// Every submodule of (Z/p^2)^n generated by at most n elements (all of them,
// since (Z/p^2)^n has rank n).
std::set<Module> submodules_by_closure(long p, std::size_t n) {
  const long q = p * p;
  std::vector<Elem> all;
  Elem e(n, 0);
  for (;;) {
    all.push_back(e);
    std::size_t i = 0;
    while (i < n && ++e[i] == q) e[i++] = 0;
    if (i == n) break;
  }
  std::set<Module> out;
  std::vector<std::size_t> pick(n, 0);
  for (;;) {
    std::vector<Elem> gens;
    for (auto k : pick) gens.push_back(all[k]);
    out.insert(closure(gens, q, n));
    std::size_t i = 0;
    while (i < n && ++pick[i] == all.size()) pick[i++] = 0;
    if (i == n) break;
  }
  return out;
}

Module image_mod_p2(const QMatrix& h, long p) {
  const std::size_t n = h.rows();
  const long q = p * p;
  std::vector<Elem> gens;
  for (std::size_t c = 0; c < n; ++c) {
    Elem g(n);
    for (std::size_t r = 0; r < n; ++r) {
      const Rational x = h(r, c);
      EXPECT_TRUE(is_integer(x));
      g[r] = ((x.get_num().get_si() % q) + q) % q;
    }
    gens.push_back(g);
  }
  return closure(gens, q, n);
}

}  // namespace

TEST(Submodules, ClosureOracleMatchesHermiteEnumeration) {
  for (auto [p, n] : std::vector<std::pair<long, std::size_t>>{{2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
    const std::set<Module> oracle = submodules_by_closure(p, n);
    const auto hnfs = submodules_mod_p2(p, n);
    std::set<Module> got;
    for (const auto& h : hnfs) got.insert(image_mod_p2(h, p));
    EXPECT_EQ(hnfs.size(), got.size()) << "duplicate Hermite forms, p=" << p << " n=" << n;
    EXPECT_EQ(got, oracle) << "p=" << p << " n=" << n;
  }
  EXPECT_EQ(submodules_by_closure(2, 2).size(), 15u);
}

TEST(LatticeVertex, KeyIdentifiesLattice) {
  const auto s = LatticeVertex::standard(kP2, 2);
  const LatticeVertex same(DiagNorm(kP2, QMatrix::from_columns({qv({1, 0}), qv({1, 1})}), qv({0, 0})));
  const LatticeVertex sub(DiagNorm(kP2, QMatrix::from_columns({qv({2, 0}), qv({1, 1})}), qv({0, 0})));
  EXPECT_TRUE(vertices_equal(s, s));
  EXPECT_TRUE(vertices_equal(s, same));
  EXPECT_EQ(s.key(), same.key());
  EXPECT_FALSE(vertices_equal(s, sub));
  EXPECT_EQ(gi_distance(s.norm(), sub.norm()), 1);
}

TEST(LatticeVertex, RejectsFractionalWeights) {
  EXPECT_THROW(LatticeVertex(DiagNorm::standard(kP2, QVector{Rational(1, 2), Rational(0)})), UsageError);
}

TEST(LatticeVertex, EqualityNotionsAgree) {
  Rng rng(9);
  for (int t = 0; t < 300; ++t) {
    const auto u = random_vertex(rng.next(), 2, kP2, 2);
    const auto v = random_vertex(rng.next(), 2, kP2, 2);
    const bool zero = gi_distance(u.norm(), v.norm()) == 0;
    EXPECT_EQ(vertices_equal(u, v), zero);
    EXPECT_EQ(u.key() == v.key(), zero);
  }
}

TEST(LatticeVertex, KeyInvariantUnderBasisChange) {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto v = random_vertex(rng.next(), 3, kP2, 3);
    QMatrix u = QMatrix::identity(3);
    for (int k = 0; k < 5; ++k) {
      const auto i = static_cast<std::size_t>(rng.uniform_int(0, 2)), j = static_cast<std::size_t>(rng.uniform_int(0, 2));
      if (i != j) u.axpy_column(i, j, Rational(rng.uniform_int(-3, 3)));
    }
    // same lattice, new generators
    const auto w = LatticeVertex::from_lattice(kP2, v.lattice_basis() * u);
    EXPECT_EQ(w.key(), v.key());
  }
}

TEST(Neighbors, Counts) {
  EXPECT_EQ(neighbors(LatticeVertex::standard(kP2, 1)).size(), 2u);
  EXPECT_EQ(neighbors(LatticeVertex::standard(kP2, 2)).size(), 14u);
  EXPECT_EQ(neighbors(LatticeVertex::standard(PAdicContext(3), 2)).size(), 22u);
  const auto n1 = neighbors(LatticeVertex::standard(kP2, 1));
  std::set<Rational> ws;
  for (const auto& w : n1) ws.insert(Rational(w.norm().weights()[0] - valuation(w.norm().basis()(0, 0), 2)));
  EXPECT_EQ(ws, (std::set<Rational>{Rational(-1), Rational(1)}));
}

TEST(Neighbors, DistanceOneAndSymmetric) {
  const Thickening g(kP2, 2);
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto v = random_vertex(rng.next(), 3, kP2, 2);
    const auto nb = g.neighbors(v);
    EXPECT_EQ(nb.size(), 14u);
    for (const auto& w : nb) {
      EXPECT_EQ(gi_distance(v.norm(), w.norm()), 1);
      const auto back = g.neighbors(w);
      EXPECT_TRUE(std::any_of(back.begin(), back.end(), [&](const auto& x) { return x.key() == v.key(); }));
    }
  }
}

TEST(Neighbors, ScaleEnvelope) {
  EXPECT_THROW(neighbors(LatticeVertex::standard(PAdicContext(5), 2)), InfeasibleScale);
  EXPECT_THROW(neighbors(LatticeVertex::standard(kP2, 4)), InfeasibleScale);
}

TEST(Ball, SmallRadii) {
  const auto s = LatticeVertex::standard(kP2, 2);
  const Ball b0 = ball_bfs(s, 0);
  ASSERT_EQ(b0.vertices.size(), 1u);
  EXPECT_EQ(b0.vertices[0].key(), s.key());
  EXPECT_EQ(ball_bfs(s, 1).vertices.size(), 15u);
  EXPECT_THROW(ball_bfs(s, -1), UsageError);
}

TEST(Ball, DepthEqualsDistance) {
  // ball_bfs audits internally; repeat the check from outside
  for (auto [p, n, r] : std::vector<std::tuple<long, std::size_t, long>>{{2, 2, 2}, {3, 2, 2}}) {
    const PAdicContext ctx(p);
    const auto s = LatticeVertex::standard(ctx, n);
    const Ball b = ball_bfs(s, r);
    std::set<std::string> keys;
    for (std::size_t i = 0; i < b.vertices.size(); ++i) {
      EXPECT_EQ(gi_distance(s.norm(), b.vertices[i].norm()), b.depth[i]);
      keys.insert(b.vertices[i].key());
    }
    EXPECT_EQ(keys.size(), b.vertices.size());
  }
}

TEST(Ball, InducedAdjacencyIsSymmetric) {
  const Thickening g(kP2, 2);
  const Ball b = ball_bfs(g, LatticeVertex::standard(kP2, 2), 2);
  const auto adj = induced_adjacency(g, b);
  for (const auto& [k, nbrs] : adj)
    for (const auto& w : nbrs) {
      const auto& back = adj.at(w);
      EXPECT_NE(std::find(back.begin(), back.end(), k), back.end());
    }
}

TEST(RandomVertex, Deterministic) {
  EXPECT_EQ(random_vertex(5, 3, kP2, 2).key(), random_vertex(5, 3, kP2, 2).key());
  EXPECT_EQ(random_vertex(5, 0, kP2, 2).key(), LatticeVertex::standard(kP2, 2).key());
}

TEST(HellyBuilding, SingleBall) {
  const auto c = random_vertex(3, 2, kP2, 2);
  const std::vector<BallSpec> one{{c, 2}};
  const auto w = helly_check_building(one, HellyMode::Witness);
  ASSERT_TRUE(w.verify());
  EXPECT_EQ(w.witness->key(), LatticeVertex(scale_norm(c.norm(), -2)).key());
  const auto e = helly_check_building(one, HellyMode::Exhaustive);
  EXPECT_EQ(e.intersection_size, ball_bfs(c, 2).vertices.size());
}

TEST(HellyBuilding, AdjacentTriple) {
  const auto s = LatticeVertex::standard(kP2, 2);
  const auto nb = neighbors(s);
  // two neighbors of s adjacent to each other
  const Thickening g(kP2, 2);
  std::optional<LatticeVertex> a, b;
  for (std::size_t i = 0; i < nb.size() && !a; ++i)
    for (std::size_t j = i + 1; j < nb.size() && !a; ++j)
      if (gi_distance(nb[i].norm(), nb[j].norm()) == 1) {
        a = nb[i];
        b = nb[j];
      }
  ASSERT_TRUE(a && b);
  const std::vector<BallSpec> fam{{s, 1}, {*a, 1}, {*b, 1}};
  const auto e = helly_check_building(fam, HellyMode::Exhaustive);
  EXPECT_EQ(e.outcome, HellyOutcome::Witness);
  EXPECT_GT(e.intersection_size, 0u);
  EXPECT_TRUE(helly_check_building(fam, HellyMode::Witness).verify());
}

TEST(HellyBuilding, ModesAgreeOnRandomFamilies) {
  Rng rng(41);
  for (int t = 0; t < 25; ++t) {
    std::vector<BallSpec> fam;
    for (int s = 0; s < 3; ++s) fam.push_back({random_vertex(rng.next(), 2, kP2, 2), 0});
    for (auto& b : fam) {
      long need = 0;
      for (const auto& o : fam) need = std::max(need, gi_distance(b.center.norm(), o.center.norm()).get_num().get_si());
      b.radius = (need + 1) / 2;
    }
    const auto w = helly_check_building(fam, HellyMode::Witness);
    const auto e = helly_check_building(fam, HellyMode::Exhaustive);
    EXPECT_TRUE(w.verify());
    EXPECT_EQ(e.outcome, HellyOutcome::Witness);
    // the witness-mode vertex lies in the exhaustive intersection
    for (const auto& b : fam) EXPECT_LE(gi_distance(w.witness->norm(), b.center.norm()), b.radius);
    for (const auto& x : w.witness->norm().weights()) EXPECT_TRUE(is_integer(x));
  }
}

TEST(HellyBuilding, DisjointPairRejected) {
  const auto s = LatticeVertex::standard(kP2, 2);
  const auto far = LatticeVertex(scale_norm(s.norm(), 3));
  const std::vector<BallSpec> fam{{s, 1}, {far, 1}};
  EXPECT_THROW(helly_check_building(fam, HellyMode::Witness), PreconditionViolation);
  EXPECT_THROW(helly_check_building(fam, HellyMode::Exhaustive), PreconditionViolation);
}

TEST(TripleCampaign, SmallScale) {
  const auto c = exhaustive_triple_campaign(kP2, 2, 1, 1);
  EXPECT_EQ(c.centers, 15u);
  EXPECT_GT(c.pairwise_intersecting, 0u);
  EXPECT_EQ(c.counterexamples, 0u);
  EXPECT_EQ(c.distance_mismatches, 0u);
}
