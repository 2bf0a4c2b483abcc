#include <gtest/gtest.h>

#include <numeric>

#include "normspace/obstruction.hpp"

using namespace normspace;

namespace {

long perm_order(const Perm& p) {
  Perm acc = p;
  long k = 1;
  Perm id(p.size());
  std::iota(id.begin(), id.end(), 0);
  while (acc != id) {
    acc = compose(p, acc);
    ++k;
  }
  return k;
}

bool is_even(const Perm& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) inv += p[i] > p[j];
  return inv % 2 == 0;
}

struct PermG {
  Perm p;
  PermG operator*(const PermG& o) const { return {compose(p, o.p)}; }
  bool operator==(const PermG& o) const { return p == o.p; }
};

}  // namespace

TEST(SignedPerm, GroupLaws) {
  const auto g = signed_permutations(3);
  ASSERT_EQ(g.size(), 48u);
  const auto id = SignedPerm::identity(3);
  for (const auto& a : g) {
    EXPECT_EQ(a * a.inverse(), id);
    EXPECT_EQ(a.inverse() * a, id);
    EXPECT_EQ(from_matrix(a.matrix()), a);
  }
  for (std::size_t i = 0; i < g.size(); i += 7)
    for (std::size_t j = 0; j < g.size(); j += 5) {
      // matrix of a product is the product of matrices
      const auto ma = g[i].matrix(), mb = g[j].matrix(), mab = (g[i] * g[j]).matrix();
      for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) {
          int s = 0;
          for (std::size_t k = 0; k < 3; ++k) s += ma[r][k] * mb[k][c];
          EXPECT_EQ(s, mab[r][c]);
        }
    }
  EXPECT_FALSE(from_matrix({{1, 1}, {0, 1}}).has_value());
  EXPECT_FALSE(from_matrix({{2, 0}, {0, 1}}).has_value());
}

TEST(CubeIsometries, Sizes) {
  const auto c2 = cube_isometries(2), c3 = cube_isometries(3);
  EXPECT_EQ(c2.elements.size(), 8u);
  EXPECT_EQ(c3.elements.size(), 48u);
  EXPECT_TRUE(c2.matrix_verified);
  EXPECT_TRUE(c3.matrix_verified);
  EXPECT_EQ(cube_isometries(4).elements.size(), 384u);
}

TEST(CubeIsometries, PreserveCubeVertices) {
  const auto c3 = cube_isometries(3);
  std::set<std::vector<double>> verts;
  for (int m = 0; m < 8; ++m) verts.insert({m & 1 ? 1.0 : -1.0, m & 2 ? 1.0 : -1.0, m & 4 ? 1.0 : -1.0});
  for (const auto& g : c3.elements) {
    std::set<std::vector<double>> img;
    for (const auto& v : verts) img.insert(g.apply(v));
    EXPECT_EQ(img, verts);
  }
  std::set<SignedPerm> all(c3.elements.begin(), c3.elements.end());
  for (const auto& a : c3.elements) {
    EXPECT_TRUE(all.count(a.inverse()));
    for (const auto& b : c3.elements) EXPECT_TRUE(all.count(a * b));
  }
}

TEST(Spectra, EnumerationMatchesPartitions) {
  for (int k = 1; k <= 5; ++k) {
    std::set<long> seen;
    for (const auto& g : signed_permutations(static_cast<std::size_t>(k))) seen.insert(element_order(g));
    EXPECT_EQ(seen, signed_perm_spectrum(k)) << "k=" << k;
  }
  for (int n = 1; n <= 7; ++n) {
    Perm p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::set<long> seen;
    do
      if (is_even(p)) seen.insert(perm_order(p));
    while (std::next_permutation(p.begin(), p.end()));
    EXPECT_EQ(seen, alternating_spectrum(n)) << "n=" << n;
  }
  EXPECT_EQ(signed_perm_spectrum(2), (std::set<long>{1, 2, 4}));
}

TEST(GroupOrders, Examples) {
  const auto f5 = group_order_tools(5);
  EXPECT_EQ(f5.alternating_order, 60);
  EXPECT_EQ(f5.target_order, 384);
  EXPECT_FALSE(f5.divisible);
  const auto f8 = group_order_tools(8);
  EXPECT_EQ(f8.alternating_order, 20160);
  EXPECT_EQ(f8.target_order, 645120);
  EXPECT_TRUE(f8.divisible);
  const auto f3 = group_order_tools(3);
  EXPECT_EQ(f3.target_orders.count(3), 0u);
}

TEST(Presentation, GeneratorsSatisfyRelationsAndGenerate) {
  for (int n = 3; n <= 7; ++n) {
    std::vector<PermG> gens;
    for (const auto& p : alternating_generators(n)) gens.push_back({p});
    Perm id(static_cast<std::size_t>(n));
    std::iota(id.begin(), id.end(), 0);
    EXPECT_TRUE(satisfies_alternating_relations(gens, PermG{id}));
    std::set<Perm> seen{id};
    std::vector<Perm> q{id};
    for (std::size_t h = 0; h < q.size(); ++h)
      for (const auto& g : gens) {
        Perm x = compose(g.p, q[h]);
        if (seen.insert(x).second) q.push_back(x);
      }
    long half = 1;
    for (int i = 2; i <= n; ++i) half *= i;
    EXPECT_EQ(static_cast<long>(seen.size()), half / 2);
    for (const auto& p : seen) EXPECT_TRUE(is_even(p));
  }
}

TEST(Decision, Verdicts) {
  const std::map<int, std::string> reason = {{3, "element-order"}, {5, "lagrange"}, {6, "lagrange"}, {7, "lagrange"}};
  for (int n : {3, 5, 6, 7, 8, 9, 10, 11, 12}) {
    const auto r = injective_hom_decision(n);
    EXPECT_EQ(r.verdict, Verdict::Impossible) << n;
    EXPECT_FALSE(r.certificate.has_value());
    if (reason.count(n)) {
      EXPECT_EQ(to_string(r.reason), reason.at(n)) << n;
    } else {
      EXPECT_TRUE(r.reason == ObstructionReason::Simplicity || r.reason == ObstructionReason::Lagrange) << n;
    }
  }
  EXPECT_THROW(injective_hom_decision(2), UsageError);
  EXPECT_THROW(injective_hom_decision(13), UsageError);
}

TEST(Decision, FourEmbeds) {
  auto r = injective_hom_decision(4);
  ASSERT_EQ(r.verdict, Verdict::EmbeddingExists);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_TRUE(verify_certificate(r));
  EXPECT_EQ(subgroup_order(r.certificate->images, 3, 100), 12u);
  // every image is a rotation of the cube (determinant +1)
  for (const auto& g : r.certificate->images) {
    int sign = 1;
    for (int s : g.signs) sign *= s;
    Perm p(g.perm.begin(), g.perm.end());
    sign *= is_even(p) ? 1 : -1;
    EXPECT_EQ(sign, 1);
  }
  // a tampered certificate fails
  r.certificate->images[0] = SignedPerm::identity(3);
  EXPECT_FALSE(verify_certificate(r));
}
