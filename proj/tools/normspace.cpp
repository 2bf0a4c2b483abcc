// normspace command-line front end. Every subcommand prints one JSON document
// (or CSV where --format csv is supported) and maps outcomes to exit codes:
// 0 ok, 1 property violated / counterexample / embedding exists, 2 usage, 3 scale.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "normspace/campaign.hpp"
#include "normspace/json_io.hpp"

using namespace normspace;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitScale = 3;

// Input is inline JSON if it starts with '{' or '[', otherwise a file path.
json load(const std::string& src) {
  const auto first = src.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (src[first] == '{' || src[first] == '[')) {
    try {
      return json::parse(src);
    } catch (const json::parse_error& e) {
      throw UsageError(std::string("inline JSON: ") + e.what());
    }
  }
  std::ifstream in(src);
  if (!in) throw UsageError("cannot open '" + src + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(src + ": " + e.what());
  }
}

void emit(json doc) {
  doc["schema_version"] = io::kSchemaVersion;
  std::cout << doc.dump(2) << "\n";
}

int emit_error(const std::string& kind, const std::string& msg, int code) {
  json doc = {{"error", kind}, {"message", msg}, {"schema_version", io::kSchemaVersion}};
  std::cout << doc.dump(2) << "\n";
  std::cerr << "normspace: " << msg << "\n";
  return code;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
  return o + "\"";
}

struct Options {
  std::string a, b, body, family, points, metric, f, center, mode = "witness", graphml, kind = "all";
  std::string format = "json";
  long p = 0, n = 0, radius = 0, max_radius = 4;
  std::size_t count = 100, threads = 0;
  std::uint64_t seed = 0;
  double eps = kOptimizationTol;
  bool exact = false, timing = false;
};

json leq_pair(const DiagNorm& a, const DiagNorm& b) {
  return {{"a_le_b", leq_norms(a, b)}, {"b_le_a", leq_norms(b, a)}};
}

DiagNorm load_norm(const std::string& src, long p) {
  DiagNorm eta = io::diag_norm_from_json(load(src));
  if (p != 0 && eta.p() != p) throw UsageError("norm has p=" + std::to_string(eta.p()) + " but --p " + std::to_string(p));
  return eta;
}

int cmd_dist(const Options& o) {
  const DiagNorm a = load_norm(o.a, o.p), b = load_norm(o.b, o.p);
  emit({{"distance", io::rational_to_json(gi_distance(a, b))},
        {"log_sup_ratio_ab", io::rational_to_json(log_sup_ratio(a, b))},
        {"log_sup_ratio_ba", io::rational_to_json(log_sup_ratio(b, a))},
        {"order", leq_pair(a, b)}});
  return kExitOk;
}

int cmd_join(const Options& o) {
  const DiagNorm a = load_norm(o.a, o.p), b = load_norm(o.b, o.p);
  emit({{"join", io::to_json(join_norms(a, b))}});
  return kExitOk;
}

int cmd_common_basis(const Options& o) {
  const DiagNorm a = load_norm(o.a, o.p), b = load_norm(o.b, o.p);
  const AdaptedBasis ab = common_adapted_basis(a, b);
  emit({{"first", io::to_json(ab.first(a.ctx()))},
        {"second", io::to_json(ab.second(a.ctx()))},
        {"distance", io::rational_to_json(linf_distance(ab.weights_first, ab.weights_second))}});
  return kExitOk;
}

int cmd_helly_na(const Options& o) {
  const json in = load(o.family);
  std::vector<DiagNorm> norms;
  for (const auto& j : io::field(in, "norms")) norms.push_back(io::diag_norm_from_json(j));
  std::vector<Rational> radii;
  for (const auto& r : io::field(in, "radii")) radii.push_back(io::rational_from_json(r));
  if (radii.size() != norms.size()) throw UsageError("norms/radii length mismatch");
  const DiagNorm w = helly_witness_na(norms, radii);
  json dists = json::array();
  for (const auto& eta : norms) dists.push_back(io::rational_to_json(gi_distance(w, eta)));
  emit({{"witness", io::to_json(w)}, {"distances", std::move(dists)}});
  return kExitOk;
}

LatticeVertex load_center(const Options& o) {
  if (!o.center.empty()) return io::vertex_from_json(load(o.center));
  if (o.p == 0 || o.n == 0) throw UsageError("ball needs --center or both --p and --n");
  return LatticeVertex::standard(PAdicContext(o.p), static_cast<std::size_t>(o.n));
}

int cmd_ball(const Options& o) {
  if (o.radius > o.max_radius)
    throw InfeasibleScale("radius " + std::to_string(o.radius) + " exceeds --max-radius " + std::to_string(o.max_radius));
  const LatticeVertex c = load_center(o);
  require_enumeration_scale(c.p(), c.dim());
  const Thickening graph(c.norm().ctx(), c.dim());
  const Ball ball = ball_bfs(graph, c, o.radius);
  if (!o.graphml.empty()) {
    std::map<std::string, long> depth;
    for (std::size_t i = 0; i < ball.vertices.size(); ++i) depth[ball.vertices[i].key()] = ball.depth[i];
    std::ofstream out(o.graphml);
    if (!out) throw UsageError("cannot write '" + o.graphml + "'");
    out << io::to_graphml(induced_adjacency(graph, ball), depth);
  }
  if (o.format == "csv") {
    std::cout << "key,depth\n";
    for (std::size_t i = 0; i < ball.vertices.size(); ++i)
      std::cout << csv_field(ball.vertices[i].key()) << "," << ball.depth[i] << "\n";
    return kExitOk;
  }
  json vs = json::array();
  for (std::size_t i = 0; i < ball.vertices.size(); ++i) vs.push_back({{"key", ball.vertices[i].key()}, {"depth", ball.depth[i]}});
  emit({{"center", io::to_json(c)}, {"radius", o.radius}, {"size", ball.vertices.size()}, {"vertices", std::move(vs)}});
  return kExitOk;
}

int cmd_helly_building(const Options& o) {
  const json in = load(o.family);
  std::vector<BallSpec> family;
  for (const auto& j : io::field(in, "balls"))
    family.push_back({io::vertex_from_json(io::field(j, "center")), io::field(j, "radius").get<long>()});
  HellyMode mode;
  if (o.mode == "witness")
    mode = HellyMode::Witness;
  else if (o.mode == "exhaustive")
    mode = HellyMode::Exhaustive;
  else
    throw UsageError("--mode must be witness or exhaustive");
  const BallCertificate cert = helly_check_building(family, mode);
  emit({{"certificate", io::to_json(cert, o.timing)}});
  return cert.outcome == HellyOutcome::Witness && cert.verify() ? kExitOk : kExitViolation;
}

int cmd_body_dist(const Options& o) {
  const Body a = io::body_from_json(load(o.a)), b = io::body_from_json(load(o.b));
  emit({{"distance", gi_distance_bodies(a, b)},
        {"log_sup_ratio_ab", log_sup_ratio(a, b)},
        {"log_sup_ratio_ba", log_sup_ratio(b, a)}});
  return kExitOk;
}

PolyNorm load_polytope(const std::string& src) {
  const Body b = io::body_from_json(load(src));
  if (!std::holds_alternative<PolyNorm>(b)) throw UsageError("expected a polytope body");
  return std::get<PolyNorm>(b);
}

int cmd_john(const Options& o) {
  const JohnResult r = john_report(load_polytope(o.body));
  emit({{"ellipsoid", io::to_json(r.ellipsoid)},
        {"distance", r.distance},
        {"bound", r.bound},
        {"inscribed", r.inscribed},
        {"bound_check", r.bound_check},
        {"mvee_gap", r.mvee_gap}});
  return r.inscribed && r.bound_check ? kExitOk : kExitViolation;
}

int cmd_mvee(const Options& o) {
  std::vector<Vec> pts;
  if (!o.points.empty()) {
    const json in = load(o.points);
    for (const auto& p : in.is_array() ? in : io::field(in, "points")) pts.push_back(io::vec_from_json(p));
  } else if (!o.body.empty()) {
    pts = load_polytope(o.body).vertices();
  } else {
    throw UsageError("mvee needs --points or --body");
  }
  const MveeResult r = mvee_solve(pts, o.eps);
  emit({{"ellipsoid", io::to_json(r.ellipsoid)},
        {"weights", r.weights},
        {"gap", r.gap},
        {"iterations", r.iterations}});
  return r.gap <= o.eps ? kExitOk : kExitViolation;
}

int cmd_helly_bodies(const Options& o) {
  const json in = load(o.family);
  std::vector<Body> bodies;
  for (const auto& j : io::field(in, "bodies")) bodies.push_back(io::body_from_json(j));
  const auto radii = io::field(in, "radii").get<std::vector<double>>();
  if (radii.size() != bodies.size()) throw UsageError("bodies/radii length mismatch");
  const BodyWitness w = coarse_helly_witness_bodies(bodies, radii);
  bool ok = true;
  for (std::size_t s = 0; s < bodies.size(); ++s) ok = ok && w.distances[s] <= radii[s] + w.tolerances[s];
  emit({{"intersection", io::to_json(w.intersection)},
        {"distances", w.distances},
        {"tolerances", w.tolerances},
        {"satisfied", ok}});
  return ok ? kExitOk : kExitViolation;
}

template <typename T>
int tight_span_impl(const Options& o) {
  const FiniteMetric<T> x = io::metric_from_json<T>(load(o.metric));
  const auto vs = tight_span_vertices(x);
  if (o.format == "csv") {
    std::cout << "vertex";
    for (const auto& l : x.labels()) std::cout << "," << csv_field(l);
    std::cout << "\n";
    for (std::size_t i = 0; i < vs.size(); ++i) {
      std::cout << i;
      for (const auto& v : vs[i]) std::cout << "," << io::scalar_to_json(v).dump();
      std::cout << "\n";
    }
    return kExitOk;
  }
  emit({{"metric", io::to_json(x)},
        {"exact", std::is_same_v<T, Rational>},
        {"kuratowski", io::functions_to_json(kuratowski_embed(x))},
        {"vertices", io::functions_to_json(vs)}});
  return kExitOk;
}

template <typename T>
int extremal_impl(const Options& o) {
  const FiniteMetric<T> x = io::metric_from_json<T>(load(o.metric));
  const json fj = load(o.f);
  const Function<T> f = io::function_from_json<T>(fj.is_array() ? fj : io::field(fj, "f"));
  if (f.size() != x.size()) throw UsageError("function length does not match the metric space");
  const bool admissible = is_admissible(f, x);
  json doc = {{"admissible", admissible}};
  if (!admissible) {
    doc["extremal"] = false;
    emit(std::move(doc));
    return kExitViolation;
  }
  const bool extremal = is_extremal(f, x);
  doc["extremal"] = extremal;
  doc["closure"] = io::functions_to_json(std::vector<Function<T>>{extremal_closure(f, x)});
  doc["closure"] = doc["closure"][0];
  emit(std::move(doc));
  return extremal ? kExitOk : kExitViolation;
}

int cmd_obstruction(const Options& o) {
  if (o.n < 3 || o.n > 12) throw UsageError("--n must lie in 3..12");
  const ObstructionReport r = injective_hom_decision(static_cast<int>(o.n));
  json doc = io::to_json(r);
  if (r.certificate) doc["certificate_verified"] = verify_certificate(r);
  emit(std::move(doc));
  return r.verdict == Verdict::Impossible ? kExitOk : kExitViolation;
}

int cmd_campaign(const Options& o) {
  std::vector<std::string> kinds;
  if (o.kind == "all")
    for (const auto& [k, _] : campaign_kinds()) kinds.push_back(k);
  else
    kinds.push_back(o.kind);
  const std::size_t threads = o.threads ? std::min(o.threads, campaign_threads()) : campaign_threads();
  std::vector<CampaignResult> results;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& k : kinds) results.push_back(run_campaign(k, o.count, o.seed, threads));
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  bool ok = true;
  for (const auto& r : results) ok = ok && r.failures.empty();
  if (o.format == "csv") {
    std::cout << "kind,seed,count,passed,failed\n";
    for (const auto& r : results)
      std::cout << r.kind << "," << r.seed << "," << r.count << "," << r.passed << "," << r.failures.size() << "\n";
    return ok ? kExitOk : kExitViolation;
  }
  json rows = json::array();
  for (const auto& r : results) {
    json fails = json::array();
    for (const auto& [i, note] : r.failures) fails.push_back({{"instance", i}, {"note", note}});
    rows.push_back({{"kind", r.kind},
                    {"seed", r.seed},
                    {"count", r.count},
                    {"passed", r.passed},
                    {"failed", r.failures.size()},
                    {"failures", std::move(fails)}});
  }
  json doc = {{"campaigns", std::move(rows)}, {"all_passed", ok}};
  if (o.timing) doc["runtime_ms"] = ms;
  emit(std::move(doc));
  return ok ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"normspace: distances, Helly witnesses and tight spans on spaces of norms"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    c->add_flag("--timing", o.timing, "Include wall-clock timings in the output");
  };
  auto pair = [&](CLI::App* c, const char* what) {
    c->add_option("--a", o.a, std::string("First ") + what + " (path or inline JSON)")->required();
    c->add_option("--b", o.b, std::string("Second ") + what + " (path or inline JSON)")->required();
  };

  std::map<std::string, std::function<int()>> run;
  auto sub = [&](const char* name, const char* desc, std::function<int()> fn) {
    CLI::App* c = app.add_subcommand(name, desc);
    common(c);
    run[name] = std::move(fn);
    return c;
  };

  auto* dist = sub("dist", "Exact distance between two p-adic norms", [&] { return cmd_dist(o); });
  pair(dist, "norm");
  dist->add_option("--p", o.p, "Expected prime (checked against the inputs)");
  auto* join = sub("join", "Coordinatewise-max join of two norms", [&] { return cmd_join(o); });
  pair(join, "norm");
  join->add_option("--p", o.p, "Expected prime");
  auto* cb = sub("common-basis", "Basis adapted to two norms", [&] { return cmd_common_basis(o); });
  pair(cb, "norm");
  cb->add_option("--p", o.p, "Expected prime");
  sub("helly-na", "Witness for a family of p-adic balls", [&] { return cmd_helly_na(o); })
      ->add_option("--family", o.family, "{\"norms\": [...], \"radii\": [...]}")
      ->required();
  auto* ball = sub("ball", "BFS ball in the thickening graph", [&] { return cmd_ball(o); });
  ball->add_option("--center", o.center, "Center vertex (default: standard vertex)");
  ball->add_option("--p", o.p, "Prime for the standard center");
  ball->add_option("--n", o.n, "Dimension for the standard center");
  ball->add_option("--radius", o.radius, "Ball radius")->required();
  ball->add_option("--max-radius", o.max_radius, "Refuse radii above this")->capture_default_str();
  ball->add_option("--graphml", o.graphml, "Write the induced subgraph as GraphML");
  auto* hb = sub("helly-building", "Helly certificate for vertex balls", [&] { return cmd_helly_building(o); });
  hb->add_option("--family", o.family, "{\"balls\": [{\"center\": ..., \"radius\": k}, ...]}")->required();
  hb->add_option("--mode", o.mode, "witness or exhaustive")->capture_default_str();
  pair(sub("body-dist", "Distance between two convex bodies", [&] { return cmd_body_dist(o); }), "body");
  sub("john", "John ellipsoid of a symmetric polytope", [&] { return cmd_john(o); })
      ->add_option("--body", o.body, "Polytope body")
      ->required();
  auto* mv = sub("mvee", "Minimum-volume enclosing ellipsoid", [&] { return cmd_mvee(o); });
  mv->add_option("--points", o.points, "{\"points\": [[...], ...]}");
  mv->add_option("--body", o.body, "Polytope body (its vertices are used)");
  mv->add_option("--eps", o.eps, "Duality gap target")->capture_default_str();
  sub("helly-bodies", "Intersection witness for balls of bodies", [&] { return cmd_helly_bodies(o); })
      ->add_option("--family", o.family, "{\"bodies\": [...], \"radii\": [...]}")
      ->required();
  auto* ts = sub("tight-span", "Vertices of the tight span of a finite metric", [&] {
    return o.exact ? tight_span_impl<Rational>(o) : tight_span_impl<double>(o);
  });
  ts->add_option("--metric", o.metric, "{\"labels\": [...], \"d\": [[...]]}")->required();
  ts->add_flag("--exact", o.exact, "Rational arithmetic");
  auto* ex = sub("extremal", "Extremality test and closure", [&] {
    return o.exact ? extremal_impl<Rational>(o) : extremal_impl<double>(o);
  });
  ex->add_option("--metric", o.metric, "Finite metric")->required();
  ex->add_option("--f", o.f, "Function values, [..] or {\"f\": [...]}")->required();
  ex->add_flag("--exact", o.exact, "Rational arithmetic");
  sub("obstruction", "Injective homomorphism decision for alternating groups", [&] { return cmd_obstruction(o); })
      ->add_option("--n", o.n, "Degree n in 3..12")
      ->required();
  auto* cp = sub("campaign", "Seeded batch of property checks", [&] { return cmd_campaign(o); });
  std::vector<std::string> kinds{"all"};
  for (const auto& [k, _] : campaign_kinds()) kinds.push_back(k);
  cp->add_option("--kind", o.kind, "Check kind")->check(CLI::IsMember(kinds))->capture_default_str();
  cp->add_option("--count", o.count, "Instances per kind")->capture_default_str();
  cp->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
  cp->add_option("--threads", o.threads, "Worker threads (capped by NORMSPACE_THREADS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (const auto* c : app.get_subcommands()) return run.at(c->get_name())();
  } catch (const UsageError& e) {
    return emit_error("usage", e.what(), kExitUsage);
  } catch (const PreconditionViolation& e) {
    return emit_error("precondition", e.what(), kExitUsage);
  } catch (const InfeasibleScale& e) {
    return emit_error("infeasible-scale", e.what(), kExitScale);
  } catch (const json::exception& e) {
    return emit_error("usage", e.what(), kExitUsage);
  } catch (const std::exception& e) {
    return emit_error("internal", e.what(), 4);
  }
  return kExitUsage;
}
