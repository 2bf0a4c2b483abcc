#pragma once

// Seeded property campaigns. Instance i of a campaign with seed s draws its
// inputs from Rng(instance_seed(s, i)); results are aggregated in instance
// order no matter how many worker threads run.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "normspace/building_graph.hpp"
#include "normspace/convex_norms.hpp"
#include "normspace/tight_span.hpp"
#include "normspace/valued_norms.hpp"

namespace normspace {

struct CheckResult {
  bool pass = true;
  std::string note;
};

using PropertyCheck = std::function<CheckResult(std::uint64_t seed)>;

namespace checks {

inline CheckResult fail(std::string note) { return {false, std::move(note)}; }

/// Same-basis norms: distance equals the l-infinity weight gap.
inline CheckResult apartment(std::uint64_t seed) {
  Rng rng(seed);
  static constexpr long primes[] = {2, 3, 5};
  const PAdicContext ctx(primes[rng.uniform_int(0, 2)]);
  const auto n = static_cast<std::size_t>(rng.uniform_int(1, 4));
  const DiagNorm a = random_diag_norm(rng, ctx, n);
  QVector w(n);
  for (auto& x : w) {
    x = make_rational(rng.uniform_int(-12, 12), rng.uniform_int(1, 4));
  }
  const DiagNorm b(ctx, a.basis(), w);
  if (gi_distance(a, b) != linf_distance(a.weights(), b.weights())) return fail("distance != l-infinity gap");
  return {};
}

/// Metric axioms on a random triple.
inline CheckResult valued_metric(std::uint64_t seed) {
  Rng rng(seed);
  const PAdicContext ctx(rng.uniform_int(0, 1) ? 2 : 3);
  const auto n = static_cast<std::size_t>(rng.uniform_int(1, 3));
  const DiagNorm a = random_diag_norm(rng, ctx, n), b = random_diag_norm(rng, ctx, n), c = random_diag_norm(rng, ctx, n);
  const Rational ab = gi_distance(a, b), ba = gi_distance(b, a), ac = gi_distance(a, c), bc = gi_distance(b, c);
  if (ab != ba) return fail("asymmetric");
  if (ab < 0 || gi_distance(a, a) != 0) return fail("not a metric");
  if (ac > ab + bc) return fail("triangle inequality");
  return {};
}

/// Random family of norms with compatible radii: the join witness lies in every ball.
inline CheckResult helly_na(std::uint64_t seed) {
  Rng rng(seed);
  const PAdicContext ctx(rng.uniform_int(0, 1) ? 2 : 3);
  const auto n = static_cast<std::size_t>(rng.uniform_int(1, 3));
  const auto m = static_cast<std::size_t>(rng.uniform_int(3, 6));
  std::vector<DiagNorm> norms;
  for (std::size_t s = 0; s < m; ++s) norms.push_back(random_diag_norm(rng, ctx, n));
  std::vector<Rational> radii(m, Rational(0));
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t t = 0; t < m; ++t) radii[s] = std::max(radii[s], gi_distance(norms[s], norms[t]));
    radii[s] = radii[s] / 2 + make_rational(rng.uniform_int(0, 3), 4);
  }
  const DiagNorm theta = helly_witness_na(norms, radii);
  for (std::size_t s = 0; s < m; ++s)
    if (gi_distance(theta, norms[s]) > radii[s]) return fail("witness outside ball " + std::to_string(s));
  return {};
}

/// Witness mode on random vertices agrees with the BFS ball intersection.
inline CheckResult building_witness(std::uint64_t seed) {
  Rng rng(seed);
  const PAdicContext ctx(2);
  const std::size_t n = 2;
  std::vector<BallSpec> family;
  for (int s = 0; s < 3; ++s) family.push_back({random_vertex(rng.next(), 2, ctx, n), 0});
  for (std::size_t s = 0; s < family.size(); ++s) {
    long need = 0;
    for (std::size_t t = 0; t < family.size(); ++t)
      need = std::max(need, gi_distance(family[s].center.norm(), family[t].center.norm()).get_num().get_si());
    family[s].radius = (need + 1) / 2 + rng.uniform_int(0, 1);
  }
  const auto w = helly_check_building(family, HellyMode::Witness);
  const auto e = helly_check_building(family, HellyMode::Exhaustive);
  if (!w.verify()) return fail("witness mode certificate");
  if (e.outcome != HellyOutcome::Witness) return fail("exhaustive counterexample");
  return {};
}

/// John ellipsoid of a random symmetric polytope within log sqrt(n).
inline CheckResult john(std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(rng.uniform_int(2, 3));
  const PolyNorm k = random_polytope(rng, n, static_cast<std::size_t>(rng.uniform_int(static_cast<long>(n), 10)));
  const JohnResult r = john_report(k);
  if (!r.inscribed) return fail("not inscribed");
  if (!r.bound_check) return fail("bound exceeded");
  return {};
}

/// SPD eigenvalue formula dominates direction sampling, with gap <= 0.01.
inline CheckResult spd_formula(std::uint64_t seed) {
  Rng rng(seed);
  const Body a = random_spd(rng, 2), b = random_spd(rng, 2);
  const double exact = gi_distance_bodies(a, b);
  const double sampled = sampled_sup_ratio(a, b, 100'000, rng.next());
  if (sampled > exact + 1e-9) return fail("sampled exceeds formula");
  if (exact - sampled > 0.01) return fail("sampling gap above 0.01");
  return {};
}

/// Intersection of scaled polytopes satisfies every ball constraint.
inline CheckResult helly_bodies(std::uint64_t seed) {
  Rng rng(seed);
  const auto m = static_cast<std::size_t>(rng.uniform_int(3, 5));
  std::vector<Body> bodies;
  for (std::size_t s = 0; s < m; ++s) bodies.emplace_back(random_polytope(rng, 2, static_cast<std::size_t>(rng.uniform_int(2, 6))));
  std::vector<double> radii(m, 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t t = 0; t < m; ++t) radii[s] = std::max(radii[s], gi_distance_bodies(bodies[s], bodies[t]));
    radii[s] = radii[s] / 2 + rng.uniform(0, 0.1);
  }
  const BodyWitness w = coarse_helly_witness_bodies(bodies, radii);
  for (std::size_t s = 0; s < m; ++s)
    if (w.distances[s] > radii[s] + w.tolerances[s]) return fail("ball " + std::to_string(s));
  return {};
}

/// Closure of a random admissible function on a body-distance metric is extremal.
inline CheckResult tight_span(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t m = 5;
  std::vector<Body> bodies;
  for (std::size_t s = 0; s < m; ++s) bodies.emplace_back(random_spd(rng, 2));
  std::vector<std::vector<double>> d(m, std::vector<double>(m, 0.0));
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = s + 1; t < m; ++t) d[s][t] = d[t][s] = gi_distance_bodies(bodies[s], bodies[t]);
  const FiniteMetric<double> x({}, d);
  Function<double> f(m);
  for (std::size_t s = 0; s < m; ++s) f[s] = *std::max_element(d[s].begin(), d[s].end()) + rng.uniform(0, 1);
  const auto cl = extremal_closure(f, x);
  if (!is_extremal(cl, x)) return fail("closure not extremal");
  for (std::size_t s = 0; s < m; ++s)
    if (cl[s] > f[s] + 1e-12) return fail("closure increased a value");
  for (const auto& v : tight_span_vertices(x))
    if (!is_extremal(v, x)) return fail("vertex not extremal");
  return {};
}

}  // namespace checks

inline const std::map<std::string, PropertyCheck>& campaign_kinds() {
  static const std::map<std::string, PropertyCheck> kinds = {
      {"apartment", checks::apartment},         {"valued-metric", checks::valued_metric},
      {"helly-na", checks::helly_na},           {"building-witness", checks::building_witness},
      {"john", checks::john},                   {"spd-formula", checks::spd_formula},
      {"helly-bodies", checks::helly_bodies},   {"tight-span", checks::tight_span},
  };
  return kinds;
}

struct CampaignResult {
  std::string kind;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::size_t passed = 0;
  std::vector<std::pair<std::size_t, std::string>> failures;  // (instance, note), ascending
};

/// Worker count: NORMSPACE_THREADS if set and positive, else hardware concurrency.
inline std::size_t campaign_threads() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NORMSPACE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return std::min<std::size_t>(static_cast<std::size_t>(v), 256);
  }
  return hw;
}

inline CampaignResult run_campaign(const std::string& kind, std::size_t count, std::uint64_t seed,
                                   std::size_t threads = campaign_threads()) {
  const auto it = campaign_kinds().find(kind);
  if (it == campaign_kinds().end()) throw UsageError("unknown campaign kind '" + kind + "'");
  std::vector<CheckResult> results(count);
  auto worker = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < count; i += stride) {
      try {
        results[i] = it->second(instance_seed(seed, i));
      } catch (const std::exception& e) {
        results[i] = {false, std::string("exception: ") + e.what()};
      }
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker, t, threads);
  worker(0, threads);
  for (auto& th : pool) th.join();
  CampaignResult out{kind, seed, count, 0, {}};
  for (std::size_t i = 0; i < count; ++i) {
    if (results[i].pass)
      ++out.passed;
    else
      out.failures.emplace_back(i, results[i].note);
  }
  return out;
}

}  // namespace normspace
