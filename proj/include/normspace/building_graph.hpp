#pragma once

// Vertices of the extended Bruhat-Tits building of GL(n, Q_p) (integer-weight
// norms, i.e. Z_(p)-lattices) and the thickening graph whose edges join
// vertices at Goldman-Iwahori distance 1.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "normspace/errors.hpp"
#include "normspace/rational.hpp"
#include "normspace/rng.hpp"
#include "normspace/valued_norms.hpp"

namespace normspace {

/// Column Hermite form over Z_(p) of a full-rank generating set (n x k, k >= n).
/// Upper triangular, diagonal p^a_r, entry (r, c) for c > r reduced modulo
/// p^a_r. Two generating sets span the same lattice iff their forms coincide.
inline QMatrix local_hermite_form(QMatrix gens, long p) {
  const std::size_t n = gens.rows();
  std::size_t active = gens.cols();
  if (active < n) throw UsageError("local_hermite_form: fewer generators than rows");
  QMatrix h(n, n);
  std::vector<long> diag_exp(n);
  for (std::size_t rr = n; rr-- > 0;) {
    std::size_t best = active;
    long best_val = 0;
    for (std::size_t c = 0; c < active; ++c) {
      if (sgn(gens(rr, c)) == 0) continue;
      const long v = valuation(gens(rr, c), p);
      if (best == active || v < best_val) {
        best = c;
        best_val = v;
      }
    }
    if (best == active) throw UsageError("local_hermite_form: generators do not span");
    const std::size_t pos = active - 1;
    gens.swap_columns(best, pos);
    // Scale by a p-adic unit so the pivot becomes exactly p^v.
    const Rational unit = pow_p(p, best_val) / gens(rr, pos);
    for (std::size_t i = 0; i <= rr; ++i) gens(i, pos) *= unit;
    for (std::size_t c = 0; c < pos; ++c)
      if (sgn(gens(rr, c)) != 0) gens.axpy_column(c, pos, gens(rr, c) / gens(rr, pos));
    for (std::size_t i = 0; i < n; ++i) h(i, rr) = gens(i, pos);
    diag_exp[rr] = best_val;
    --active;
  }
  for (std::size_t c = 1; c < n; ++c)
    for (std::size_t r = c; r-- > 0;) {
      const Rational x = h(r, c);
      const Rational rep = reduce_mod_ppow(x, p, diag_exp[r]);
      if (rep == x) continue;
      const Rational t = (x - rep) / h(r, r);
      h.axpy_column(c, r, t);
      h(r, c) = rep;
    }
  return h;
}

class LatticeVertex {
 public:
  explicit LatticeVertex(DiagNorm norm) : norm_(std::move(norm)) {
    for (const auto& w : norm_.weights())
      if (!is_integer(w)) throw UsageError("lattice vertex requires integer weights");
    const QMatrix h = local_hermite_form(lattice_basis(), norm_.p());
    key_ = "p" + std::to_string(norm_.p()) + ":";
    for (std::size_t i = 0; i < h.rows(); ++i)
      for (std::size_t j = i; j < h.cols(); ++j) {
        key_ += h(i, j).get_str();
        key_ += (i + 1 == h.rows() && j + 1 == h.cols()) ? "" : ",";
      }
  }

  static LatticeVertex standard(PAdicContext ctx, std::size_t n) {
    return LatticeVertex(DiagNorm::standard(ctx, n));
  }

  /// Vertex whose unit ball is the Z_(p)-span of the given columns.
  static LatticeVertex from_lattice(PAdicContext ctx, const QMatrix& lattice_gens) {
    QMatrix h = local_hermite_form(lattice_gens, ctx.p());
    const std::size_t n = h.rows();
    return LatticeVertex(DiagNorm(ctx, std::move(h), QVector(n, Rational(0))));
  }

  const DiagNorm& norm() const { return norm_; }
  const std::string& key() const { return key_; }
  std::size_t dim() const { return norm_.dim(); }
  long p() const { return norm_.p(); }

  /// Columns spanning the unit ball {v : eta(v) <= 1}.
  QMatrix lattice_basis() const {
    QMatrix m = norm_.basis();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Rational s = pow_p(norm_.p(), norm_.weights()[j].get_num().get_si());
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) *= s;
    }
    return m;
  }

 private:
  DiagNorm norm_;
  std::string key_;
};

inline bool operator==(const LatticeVertex& a, const LatticeVertex& b) { return a.key() == b.key(); }

/// Exact lattice equality: both transition matrices are p-integral.
inline bool vertices_equal(const LatticeVertex& u, const LatticeVertex& v) {
  detail::require_compatible(u.norm(), v.norm());
  const QMatrix mu = u.lattice_basis();
  const QMatrix mv = v.lattice_basis();
  auto integral = [p = u.p()](const QMatrix& g) {
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j)
        if (sgn(g(i, j)) != 0 && valuation(g(i, j), p) < 0) return false;
    return true;
  };
  return integral(inverse(mu) * mv) && integral(inverse(mv) * mu);
}

constexpr std::size_t kMaxEnumerationDim = 3;
constexpr long kMaxEnumerationPrime = 3;

inline void require_enumeration_scale(long p, std::size_t n) {
  if (n > kMaxEnumerationDim || p > kMaxEnumerationPrime)
    throw InfeasibleScale("thickening enumeration supports n <= 3 and p <= 3 (got n = " +
                          std::to_string(n) + ", p = " + std::to_string(p) + ")");
}

/// Hermite forms of all lattices L'' with p^2 Z^n <= L'' <= Z^n, one per
/// submodule of (Z/p^2)^n.
inline std::vector<QMatrix> submodules_mod_p2(long p, std::size_t n) {
  require_enumeration_scale(p, n);
  std::vector<QMatrix> out;
  const std::size_t n_diag = n;
  std::vector<long> exps(n_diag, 0);
  const Rational p2 = Rational(p * p);
  for (;;) {
    // Free entries: (r, c) with r < c, ranging over [0, p^exps[r]).
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    std::vector<long> ranges;
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < c; ++r) {
        slots.emplace_back(r, c);
        long range = 1;
        for (long e = 0; e < exps[r]; ++e) range *= p;
        ranges.push_back(range);
      }
    std::vector<long> digits(slots.size(), 0);
    for (;;) {
      QMatrix h(n, n);
      for (std::size_t r = 0; r < n; ++r) h(r, r) = pow_p(p, exps[r]);
      for (std::size_t s = 0; s < slots.size(); ++s) h(slots[s].first, slots[s].second) = digits[s];
      // Keep h iff p^2 e_j lies in its Z_(p)-span for all j.
      bool contains = true;
      for (std::size_t j = 0; j < n && contains; ++j) {
        QVector rhs(n, Rational(0)), x;
        rhs[j] = p2;
        solve(h, rhs, x);
        for (const auto& xi : x)
          if (sgn(xi) != 0 && valuation(xi, p) < 0) contains = false;
      }
      if (contains) out.push_back(std::move(h));
      std::size_t s = 0;
      while (s < digits.size() && ++digits[s] == ranges[s]) digits[s++] = 0;
      if (s == digits.size()) break;
    }
    std::size_t d = 0;
    while (d < n_diag && ++exps[d] == 3) exps[d++] = 0;
    if (d == n_diag) break;
  }
  return out;
}

/// Precomputed neighbor generator for one (p, n).
class Thickening {
 public:
  Thickening(PAdicContext ctx, std::size_t n) : ctx_(ctx), n_(n), subs_(submodules_mod_p2(ctx.p(), n)) {}

  const PAdicContext& ctx() const { return ctx_; }
  std::size_t dim() const { return n_; }
  std::size_t submodule_count() const { return subs_.size(); }

  /// Vertices at Goldman-Iwahori distance exactly 1, sorted by key.
  std::vector<LatticeVertex> neighbors(const LatticeVertex& v) const {
    if (v.dim() != n_ || !(v.norm().ctx() == ctx_)) throw UsageError("vertex does not match thickening");
    const QMatrix m = v.lattice_basis();
    const Rational inv_p = Rational(1) / ctx_.p();
    std::vector<LatticeVertex> out;
    out.reserve(subs_.size());
    for (const auto& h : subs_) {
      QMatrix gens = m * h;
      for (std::size_t i = 0; i < gens.rows(); ++i)
        for (std::size_t j = 0; j < gens.cols(); ++j) gens(i, j) *= inv_p;
      LatticeVertex w = LatticeVertex::from_lattice(ctx_, gens);
      if (w.key() != v.key()) out.push_back(std::move(w));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    out.erase(std::unique(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key() == b.key(); }),
              out.end());
    return out;
  }

 private:
  PAdicContext ctx_;
  std::size_t n_;
  std::vector<QMatrix> subs_;
};

inline std::vector<LatticeVertex> neighbors(const LatticeVertex& v) {
  return Thickening(v.norm().ctx(), v.dim()).neighbors(v);
}

/// BFS ball in the thickening; vertices in discovery order with depths.
struct Ball {
  LatticeVertex center;
  long radius;
  std::vector<LatticeVertex> vertices;
  std::vector<long> depth;
  std::unordered_map<std::string, std::size_t> index;

  bool contains(const std::string& key) const { return index.count(key) != 0; }
};

/// Every vertex is audited: its BFS depth must equal its GI distance to the
/// center, otherwise a DefectError is thrown.
inline Ball ball_bfs(const Thickening& graph, const LatticeVertex& center, long radius) {
  if (radius < 0) throw UsageError("ball_bfs: negative radius");
  Ball ball{center, radius, {}, {}, {}};
  ball.vertices.push_back(center);
  ball.depth.push_back(0);
  ball.index.emplace(center.key(), 0);
  for (std::size_t head = 0; head < ball.vertices.size(); ++head) {
    if (ball.depth[head] == radius) continue;
    const long next = ball.depth[head] + 1;
    for (auto& w : graph.neighbors(ball.vertices[head])) {
      if (ball.index.count(w.key())) continue;
      ball.index.emplace(w.key(), ball.vertices.size());
      ball.vertices.push_back(std::move(w));
      ball.depth.push_back(next);
    }
  }
  for (std::size_t i = 0; i < ball.vertices.size(); ++i)
    if (gi_distance(center.norm(), ball.vertices[i].norm()) != ball.depth[i])
      throw DefectError("ball_bfs: BFS depth differs from GI distance at " + ball.vertices[i].key());
  return ball;
}

inline Ball ball_bfs(const LatticeVertex& center, long radius) {
  require_enumeration_scale(center.p(), center.dim());
  return ball_bfs(Thickening(center.norm().ctx(), center.dim()), center, radius);
}

/// Adjacency lists restricted to a vertex set, keyed by canonical key.
inline std::map<std::string, std::vector<std::string>> induced_adjacency(const Thickening& graph,
                                                                         const Ball& ball) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& v : ball.vertices) {
    auto& row = adj[v.key()];
    for (const auto& w : graph.neighbors(v))
      if (ball.contains(w.key())) row.push_back(w.key());
  }
  return adj;
}

enum class HellyMode { Witness, Exhaustive };
enum class HellyOutcome { Witness, Counterexample };

struct BallSpec {
  LatticeVertex center;
  long radius;
};

struct BallCertificate {
  std::vector<BallSpec> family;
  HellyMode mode = HellyMode::Witness;
  HellyOutcome outcome = HellyOutcome::Witness;
  std::optional<LatticeVertex> witness;
  std::vector<std::size_t> ball_sizes;  // exhaustive mode only
  std::size_t intersection_size = 0;    // exhaustive mode only
  double runtime_ms = 0;

  /// Recheck the witness against every ball.
  bool verify() const {
    if (outcome != HellyOutcome::Witness || !witness) return false;
    return std::all_of(family.begin(), family.end(), [&](const BallSpec& b) {
      return gi_distance(witness->norm(), b.center.norm()) <= b.radius;
    });
  }
};

inline void require_pairwise_compatible(std::span<const BallSpec> family) {
  for (std::size_t s = 0; s < family.size(); ++s)
    for (std::size_t t = s + 1; t < family.size(); ++t) {
      const Rational d = gi_distance(family[s].center.norm(), family[t].center.norm());
      if (d > family[s].radius + family[t].radius)
        throw PreconditionViolation("balls " + std::to_string(s) + " and " + std::to_string(t) +
                                    " are disjoint: distance " + d.get_str() + " exceeds radius sum by " +
                                    Rational(d - family[s].radius - family[t].radius).get_str());
    }
}

inline BallCertificate helly_check_building(std::span<const BallSpec> family, HellyMode mode) {
  if (family.empty()) throw UsageError("helly_check_building: empty family");
  for (const auto& b : family)
    if (b.radius < 0) throw UsageError("helly_check_building: negative radius");
  const auto start = std::chrono::steady_clock::now();
  require_pairwise_compatible(family);
  BallCertificate cert;
  cert.family.assign(family.begin(), family.end());
  cert.mode = mode;
  if (mode == HellyMode::Witness) {
    std::vector<DiagNorm> centers;
    std::vector<Rational> radii;
    for (const auto& b : family) {
      centers.push_back(b.center.norm());
      radii.emplace_back(b.radius);
    }
    cert.witness = LatticeVertex(helly_witness_na(centers, radii));
  } else {
    const auto& first = family.front().center;
    require_enumeration_scale(first.p(), first.dim());
    const Thickening graph(first.norm().ctx(), first.dim());
    std::vector<Ball> balls;
    for (const auto& b : family) {
      balls.push_back(ball_bfs(graph, b.center, b.radius));
      cert.ball_sizes.push_back(balls.back().vertices.size());
    }
    std::vector<const LatticeVertex*> common;
    for (const auto& v : balls.front().vertices) {
      const bool everywhere = std::all_of(balls.begin() + 1, balls.end(),
                                          [&](const Ball& b) { return b.contains(v.key()); });
      if (everywhere) common.push_back(&v);
    }
    cert.intersection_size = common.size();
    if (common.empty()) {
      cert.outcome = HellyOutcome::Counterexample;
    } else {
      cert.witness = **std::min_element(common.begin(), common.end(),
                                        [](const auto* a, const auto* b) { return a->key() < b->key(); });
    }
  }
  cert.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (cert.outcome == HellyOutcome::Witness && !cert.verify())
    throw DefectError("helly_check_building: witness failed re-verification");
  return cert;
}

/// Random walk away from the standard vertex: each step applies a random
/// unimodular integer change of basis, then shifts some weights by +-1.
inline LatticeVertex random_vertex(std::uint64_t seed, long radius_bound, PAdicContext ctx, std::size_t n) {
  if (radius_bound < 0) throw UsageError("random_vertex: negative radius bound");
  Rng rng(seed);
  QMatrix basis = QMatrix::identity(n);
  QVector weights(n, Rational(0));
  for (long step = 0; step < radius_bound; ++step) {
    if (n > 1) {
      for (std::size_t k = 0; k < 2 * n; ++k) {
        const auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(n) - 1));
        auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(n) - 2));
        if (j >= i) ++j;
        basis.axpy_column(i, j, Rational(rng.uniform_int(-2, 2)));
      }
      basis.swap_columns(static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(n) - 1)),
                         static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(n) - 1)));
    }
    for (auto& w : weights) w += rng.uniform_int(-1, 1);
  }
  return LatticeVertex(DiagNorm(ctx, std::move(basis), std::move(weights)));
}

/// Outcome of checking every pairwise-intersecting triple of balls.
struct TripleCampaign {
  std::size_t centers = 0;
  std::size_t universe = 0;
  std::size_t triples_checked = 0;
  std::size_t pairwise_intersecting = 0;
  std::size_t counterexamples = 0;
  std::size_t distance_mismatches = 0;
};

/// All triples of distinct balls B(c, r) with c in ball_bfs(std, center_radius)
/// and 0 <= r <= max_radius. Pairwise intersection is decided on the vertex
/// sets and cross-checked against d(c_s, c_t) <= r_s + r_t.
inline TripleCampaign exhaustive_triple_campaign(PAdicContext ctx, std::size_t n, long center_radius,
                                                 long max_radius) {
  require_enumeration_scale(ctx.p(), n);
  const Thickening graph(ctx, n);
  const LatticeVertex origin = LatticeVertex::standard(ctx, n);
  const Ball universe = ball_bfs(graph, origin, center_radius + max_radius);
  const std::size_t nu = universe.vertices.size();
  const std::size_t words = (nu + 63) / 64;
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < nu; ++i)
    if (universe.depth[i] <= center_radius) centers.push_back(i);

  using Bits = std::vector<std::uint64_t>;
  std::vector<Bits> balls;  // index = center_slot * (max_radius + 1) + r
  std::vector<std::size_t> ball_center;
  for (std::size_t c : centers) {
    const Ball b = ball_bfs(graph, universe.vertices[c], max_radius);
    std::vector<Bits> by_radius(static_cast<std::size_t>(max_radius + 1), Bits(words, 0));
    for (std::size_t k = 0; k < b.vertices.size(); ++k) {
      const auto it = universe.index.find(b.vertices[k].key());
      if (it == universe.index.end()) throw DefectError("ball escapes the universe");
      for (long r = b.depth[k]; r <= max_radius; ++r)
        by_radius[static_cast<std::size_t>(r)][it->second / 64] |= 1ULL << (it->second % 64);
    }
    for (auto& bits : by_radius) {
      balls.push_back(std::move(bits));
      ball_center.push_back(c);
    }
  }
  auto radius_of = [&](std::size_t ball) { return static_cast<long>(ball % static_cast<std::size_t>(max_radius + 1)); };
  auto meets = [&](const Bits& a, const Bits& b) {
    for (std::size_t w = 0; w < words; ++w)
      if (a[w] & b[w]) return true;
    return false;
  };

  TripleCampaign out;
  out.centers = centers.size();
  out.universe = nu;
  const std::size_t nb = balls.size();
  std::vector<std::vector<char>> pair_meets(nb, std::vector<char>(nb, 0));
  for (std::size_t s = 0; s < nb; ++s)
    for (std::size_t t = s + 1; t < nb; ++t) {
      const bool m = meets(balls[s], balls[t]);
      pair_meets[s][t] = pair_meets[t][s] = m;
      const Rational d = gi_distance(universe.vertices[ball_center[s]].norm(),
                                     universe.vertices[ball_center[t]].norm());
      if (m != (d <= radius_of(s) + radius_of(t))) ++out.distance_mismatches;
    }
  Bits st(words);
  for (std::size_t s = 0; s < nb; ++s)
    for (std::size_t t = s + 1; t < nb; ++t) {
      if (!pair_meets[s][t]) continue;
      for (std::size_t w = 0; w < words; ++w) st[w] = balls[s][w] & balls[t][w];
      for (std::size_t u = t + 1; u < nb; ++u) {
        ++out.triples_checked;
        if (!pair_meets[s][u] || !pair_meets[t][u]) continue;
        ++out.pairwise_intersecting;
        if (!meets(st, balls[u])) ++out.counterexamples;
      }
    }
  return out;
}

}  // namespace normspace
