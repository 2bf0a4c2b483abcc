#pragma once

// The linear isometry group of the l-infinity cube (signed permutations) and
// a decision procedure for injective homomorphisms A_n -> B_{n-1}.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "normspace/errors.hpp"
#include "normspace/rng.hpp"

namespace normspace {

/// x -> y with y[perm[j]] = signs[j] * x[j]. Matrix: M(perm[j], j) = signs[j].
struct SignedPerm {
  std::vector<int> perm;
  std::vector<int> signs;

  static SignedPerm identity(std::size_t k) {
    SignedPerm g{std::vector<int>(k), std::vector<int>(k, 1)};
    std::iota(g.perm.begin(), g.perm.end(), 0);
    return g;
  }

  std::size_t size() const { return perm.size(); }

  bool is_identity() const {
    for (std::size_t j = 0; j < perm.size(); ++j)
      if (perm[j] != static_cast<int>(j) || signs[j] != 1) return false;
    return true;
  }

  /// (this * h)(x) = this(h(x)).
  SignedPerm operator*(const SignedPerm& h) const {
    SignedPerm r{std::vector<int>(size()), std::vector<int>(size())};
    for (std::size_t j = 0; j < size(); ++j) {
      const auto hj = static_cast<std::size_t>(h.perm[j]);
      r.perm[j] = perm[hj];
      r.signs[j] = signs[hj] * h.signs[j];
    }
    return r;
  }

  SignedPerm inverse() const {
    SignedPerm r{std::vector<int>(size()), std::vector<int>(size())};
    for (std::size_t j = 0; j < size(); ++j) {
      r.perm[static_cast<std::size_t>(perm[j])] = static_cast<int>(j);
      r.signs[static_cast<std::size_t>(perm[j])] = signs[j];
    }
    return r;
  }

  std::vector<std::vector<int>> matrix() const {
    std::vector<std::vector<int>> m(size(), std::vector<int>(size(), 0));
    for (std::size_t j = 0; j < size(); ++j) m[static_cast<std::size_t>(perm[j])][j] = signs[j];
    return m;
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) y[static_cast<std::size_t>(perm[j])] = signs[j] * x[j];
    return y;
  }

  auto operator<=>(const SignedPerm&) const = default;
};

inline long element_order(const SignedPerm& g) {
  SignedPerm acc = g;
  long k = 1;
  while (!acc.is_identity()) {
    acc = g * acc;
    ++k;
  }
  return k;
}

/// Signed permutation from a {-1, 0, 1} matrix with one nonzero per row and
/// column; nullopt otherwise.
inline std::optional<SignedPerm> from_matrix(const std::vector<std::vector<int>>& m) {
  const std::size_t k = m.size();
  SignedPerm g{std::vector<int>(k, -1), std::vector<int>(k, 0)};
  std::vector<int> row_hits(k, 0);
  for (std::size_t j = 0; j < k; ++j) {
    int hits = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (m[i][j] == 0) continue;
      if (m[i][j] != 1 && m[i][j] != -1) return std::nullopt;
      ++hits;
      ++row_hits[i];
      g.perm[j] = static_cast<int>(i);
      g.signs[j] = m[i][j];
    }
    if (hits != 1) return std::nullopt;
  }
  for (int h : row_hits)
    if (h != 1) return std::nullopt;
  return g;
}

constexpr std::size_t kMaxAbstractCubeDim = 7;
constexpr std::size_t kMaxMatrixCubeDim = 3;

/// All 2^k k! signed permutations, sorted.
inline std::vector<SignedPerm> signed_permutations(std::size_t k) {
  if (k > kMaxAbstractCubeDim) throw InfeasibleScale("signed permutation enumeration supports k <= 7");
  std::vector<SignedPerm> out;
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      SignedPerm g{perm, std::vector<int>(k, 1)};
      for (std::size_t j = 0; j < k; ++j)
        if (mask & (std::size_t{1} << j)) g.signs[j] = -1;
      out.push_back(std::move(g));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::sort(out.begin(), out.end());
  return out;
}

struct CubeGroup {
  std::size_t k = 0;
  std::vector<SignedPerm> elements;
  /// k <= 3: the brute-force matrix enumeration reproduced the abstract group.
  bool matrix_verified = false;
  std::size_t matrices_tested = 0;
};

inline double linf(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

/// Linear isometries of (R^k, l-infinity). For k <= 3 every {-1,0,1} matrix is
/// tried, kept if it preserves the l-infinity norm on cube vertices and
/// random samples, and the survivors are matched against the abstract group.
inline CubeGroup cube_isometries(std::size_t k) {
  CubeGroup g;
  g.k = k;
  g.elements = signed_permutations(k);
  if (k == 0 || k > kMaxMatrixCubeDim) return g;

  Rng rng(0xc0be5ULL + k);
  std::vector<std::vector<double>> probes;
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<double> v(k);
    for (std::size_t j = 0; j < k; ++j) v[j] = (mask >> j) & 1 ? 1.0 : -1.0;
    probes.push_back(v);
  }
  for (int s = 0; s < 64; ++s) {
    std::vector<double> v(k);
    for (auto& x : v) x = rng.uniform(-1, 1);
    probes.push_back(v);
  }

  std::vector<SignedPerm> found;
  const std::size_t cells = k * k;
  std::size_t total = 1;
  for (std::size_t c = 0; c < cells; ++c) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::vector<int>> m(k, std::vector<int>(k));
    std::size_t c = code;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j, c /= 3) m[i][j] = static_cast<int>(c % 3) - 1;
    ++g.matrices_tested;
    const bool isometry = std::all_of(probes.begin(), probes.end(), [&](const std::vector<double>& v) {
      std::vector<double> w(k, 0.0);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) w[i] += m[i][j] * v[j];
      return std::abs(linf(w) - linf(v)) <= 1e-12;
    });
    if (!isometry) continue;
    auto sp = from_matrix(m);
    if (!sp) throw DefectError("cube_isometries: norm-preserving matrix is not monomial");
    found.push_back(*sp);
  }
  std::sort(found.begin(), found.end());
  g.matrix_verified = found == g.elements;
  return g;
}

namespace detail {

inline void partitions(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  partitions(n, n, cur, out);
  return out;
}

}  // namespace detail

/// Element orders of A_n, from cycle types with an even number of even cycles.
inline std::set<long> alternating_spectrum(int n) {
  std::set<long> out;
  for (const auto& lambda : detail::partitions(n)) {
    const auto even = std::count_if(lambda.begin(), lambda.end(), [](int l) { return l % 2 == 0; });
    if (even % 2 != 0) continue;
    long o = 1;
    for (int l : lambda) o = std::lcm(o, static_cast<long>(l));
    out.insert(o);
  }
  return out;
}

/// Element orders of the signed permutation group on k letters: a cycle of
/// length l has order l or 2l depending on the product of its signs.
inline std::set<long> signed_perm_spectrum(int k) {
  std::set<long> out;
  for (const auto& lambda : detail::partitions(k)) {
    const std::size_t c = lambda.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << c); ++mask) {
      long o = 1;
      for (std::size_t i = 0; i < c; ++i) o = std::lcm(o, static_cast<long>(lambda[i]) * ((mask >> i) & 1 ? 2 : 1));
      out.insert(o);
    }
  }
  if (k == 0) out.insert(1);
  return out;
}

struct GroupOrderFacts {
  int n = 0;
  mpz_class alternating_order;  // n! / 2
  mpz_class target_order;       // 2^(n-1) (n-1)!
  bool divisible = false;
  std::set<long> alternating_orders;
  std::set<long> target_orders;
};

constexpr int kMaxOrderToolsN = 20;

inline GroupOrderFacts group_order_tools(int n) {
  if (n < 1 || n > kMaxOrderToolsN) throw UsageError("group_order_tools supports 1 <= n <= 20");
  GroupOrderFacts f;
  f.n = n;
  mpz_class fact_n, fact_n1;
  mpz_fac_ui(fact_n.get_mpz_t(), static_cast<unsigned long>(n));
  mpz_fac_ui(fact_n1.get_mpz_t(), static_cast<unsigned long>(n - 1));
  f.alternating_order = n >= 2 ? mpz_class(fact_n / 2) : mpz_class(1);
  mpz_class two_pow;
  mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, static_cast<unsigned long>(n - 1));
  f.target_order = two_pow * fact_n1;
  f.divisible = mpz_divisible_p(f.target_order.get_mpz_t(), f.alternating_order.get_mpz_t()) != 0;
  f.alternating_orders = alternating_spectrum(n);
  f.target_orders = signed_perm_spectrum(n - 1);
  return f;
}

/// A permutation of {0..n-1} as an image array.
using Perm = std::vector<int>;

inline Perm compose(const Perm& a, const Perm& b) {  // a after b
  Perm r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[static_cast<std::size_t>(b[i])];
  return r;
}

/// Carmichael generators of A_n: the 3-cycles (0 1 k) for k = 2..n-1.
inline std::vector<Perm> alternating_generators(int n) {
  std::vector<Perm> gens;
  for (int k = 2; k < n; ++k) {
    Perm p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    p[0] = 1;
    p[1] = k;
    p[static_cast<std::size_t>(k)] = 0;
    gens.push_back(p);
  }
  return gens;
}

/// Carmichael relations x_i^3 = (x_i x_j)^2 = 1, a presentation of A_n.
template <typename G>
bool satisfies_alternating_relations(const std::vector<G>& x, const G& id) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] * x[i] * x[i] == id)) return false;
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const G xy = x[i] * x[j];
      if (!(xy * xy == id)) return false;
    }
  }
  return true;
}

inline std::size_t subgroup_order(const std::vector<SignedPerm>& gens, std::size_t k, std::size_t cap) {
  std::set<SignedPerm> seen{SignedPerm::identity(k)};
  std::vector<SignedPerm> queue{SignedPerm::identity(k)};
  for (std::size_t head = 0; head < queue.size() && seen.size() <= cap; ++head)
    for (const auto& g : gens) {
      SignedPerm next = g * queue[head];
      if (seen.insert(next).second) queue.push_back(std::move(next));
    }
  return seen.size();
}

enum class Verdict { EmbeddingExists, Impossible };
enum class ObstructionReason { ElementOrder, Lagrange, Simplicity, ExhaustiveSearch };

inline std::string to_string(Verdict v) { return v == Verdict::EmbeddingExists ? "exists" : "impossible"; }
inline std::string to_string(ObstructionReason r) {
  switch (r) {
    case ObstructionReason::ElementOrder: return "element-order";
    case ObstructionReason::Lagrange: return "lagrange";
    case ObstructionReason::Simplicity: return "simplicity";
    case ObstructionReason::ExhaustiveSearch: return "exhaustive-search";
  }
  return "unknown";
}

struct EmbeddingCertificate {
  std::vector<Perm> generators;    // Carmichael 3-cycles in A_n
  std::vector<SignedPerm> images;  // their images in the cube group
};

struct ObstructionReport {
  int n = 0;
  Verdict verdict = Verdict::Impossible;
  ObstructionReason reason = ObstructionReason::ExhaustiveSearch;
  std::string detail;
  GroupOrderFacts orders;
  std::optional<EmbeddingCertificate> certificate;
};

/// Relations hold and the image has order |A_n|, so the induced hom is injective.
inline bool verify_certificate(const ObstructionReport& r) {
  if (!r.certificate) return false;
  const auto& c = r.certificate.value();
  const std::size_t k = static_cast<std::size_t>(r.n - 1);
  if (c.images.size() != c.generators.size() || c.generators != alternating_generators(r.n)) return false;
  if (!satisfies_alternating_relations(c.images, SignedPerm::identity(k))) return false;
  const std::size_t want = r.orders.alternating_order.get_ui();
  return subgroup_order(c.images, k, want) == want;
}

constexpr std::size_t kMaxSearchTargetOrder = 10'000;

inline ObstructionReport injective_hom_decision(int n) {
  if (n < 3 || n > 12) throw UsageError("injective_hom_decision supports 3 <= n <= 12");
  ObstructionReport r;
  r.n = n;
  r.orders = group_order_tools(n);
  const auto& f = r.orders;

  // A_n always contains a 3-cycle.
  if (!f.target_orders.count(3)) {
    r.reason = ObstructionReason::ElementOrder;
    r.detail = "A_" + std::to_string(n) + " has an element of order 3; the cube group B_" +
               std::to_string(n - 1) + " has none";
    return r;
  }
  if (!f.divisible) {
    r.reason = ObstructionReason::Lagrange;
    r.detail = f.alternating_order.get_str() + " does not divide " + f.target_order.get_str();
    return r;
  }
  if (n >= 5) {
    // Kernel of A_n -> B_{n-1} -> S_{n-1} is normal, so trivial or everything.
    const auto x = alternating_generators(n);
    const bool nonabelian = compose(x[0], x[1]) != compose(x[1], x[0]);
    mpz_class fact_n1;
    mpz_fac_ui(fact_n1.get_mpz_t(), static_cast<unsigned long>(n - 1));
    if (!nonabelian || !(f.alternating_order > fact_n1))
      throw DefectError("simplicity route: structural facts failed");
    r.reason = ObstructionReason::Simplicity;
    r.detail = "A_" + std::to_string(n) + " is simple; |A_n| = " + f.alternating_order.get_str() +
               " > (n-1)! = " + fact_n1.get_str() + " rules out a trivial kernel, and A_n is nonabelian so "
               "its image cannot lie in the sign subgroup";
    return r;
  }

  if (f.target_order > kMaxSearchTargetOrder)
    throw InfeasibleScale("exhaustive search limited to targets of order <= 10^4");
  const std::size_t k = static_cast<std::size_t>(n - 1);
  const auto target = signed_permutations(k);
  std::vector<SignedPerm> order3;
  for (const auto& g : target)
    if (element_order(g) == 3) order3.push_back(g);
  const auto gens = alternating_generators(n);
  const std::size_t want = f.alternating_order.get_ui();
  std::vector<std::size_t> idx(gens.size(), 0);
  if (!order3.empty()) {
    for (;;) {
      std::vector<SignedPerm> images;
      for (auto i : idx) images.push_back(order3[i]);
      if (satisfies_alternating_relations(images, SignedPerm::identity(k)) &&
          subgroup_order(images, k, want) == want) {
        r.verdict = Verdict::EmbeddingExists;
        r.reason = ObstructionReason::ExhaustiveSearch;
        r.detail = "found generator images satisfying the A_" + std::to_string(n) + " presentation";
        r.certificate = EmbeddingCertificate{gens, std::move(images)};
        if (!verify_certificate(r)) throw DefectError("exhaustive search: certificate failed");
        return r;
      }
      std::size_t d = 0;
      while (d < idx.size() && ++idx[d] == order3.size()) idx[d++] = 0;
      if (d == idx.size()) break;
    }
  }
  r.verdict = Verdict::Impossible;
  r.reason = ObstructionReason::ExhaustiveSearch;
  r.detail = "no generator images satisfy the presentation with an injective image";
  return r;
}

}  // namespace normspace
