#pragma once

// JSON codecs for every domain type. Rationals travel as "num/den" strings
// (integers as plain "n"); floats use shortest round-trip formatting.

#include "json.hpp"

#include <string>
#include <vector>

#include "normspace/building_graph.hpp"
#include "normspace/convex_norms.hpp"
#include "normspace/errors.hpp"
#include "normspace/obstruction.hpp"
#include "normspace/tight_span.hpp"
#include "normspace/valued_norms.hpp"

namespace normspace::io {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

inline json rational_to_json(const Rational& r) { return r.get_str(); }

inline Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) return Rational(j.get<double>());
  throw UsageError("expected a rational, got " + j.dump());
}

inline const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw UsageError(std::string("missing field '") + name + "'");
  return j.at(name);
}

inline json to_json(const DiagNorm& eta) {
  json basis = json::array();
  for (std::size_t c = 0; c < eta.dim(); ++c) {
    json col = json::array();
    for (std::size_t r = 0; r < eta.dim(); ++r) col.push_back(rational_to_json(eta.basis()(r, c)));
    basis.push_back(std::move(col));
  }
  json weights = json::array();
  for (const auto& w : eta.weights()) weights.push_back(rational_to_json(w));
  return {{"p", eta.p()}, {"basis", std::move(basis)}, {"weights", std::move(weights)}};
}

inline DiagNorm diag_norm_from_json(const json& j) {
  const long p = field(j, "p").get<long>();
  const json& cols = field(j, "basis");
  std::vector<QVector> columns;
  for (const auto& c : cols) {
    QVector v;
    for (const auto& x : c) v.push_back(rational_from_json(x));
    columns.push_back(std::move(v));
  }
  QVector weights;
  for (const auto& w : field(j, "weights")) weights.push_back(rational_from_json(w));
  if (columns.size() != weights.size()) throw UsageError("basis/weights size mismatch");
  return {PAdicContext(p), QMatrix::from_columns(columns), std::move(weights)};
}

inline json to_json(const LatticeVertex& v) {
  json j = to_json(v.norm());
  j["key"] = v.key();
  return j;
}

inline LatticeVertex vertex_from_json(const json& j) { return LatticeVertex(diag_norm_from_json(j)); }

inline json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw UsageError("expected a numeric array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

inline json to_json(const SpdNorm& s) {
  json m = json::array();
  for (Eigen::Index i = 0; i < s.matrix().rows(); ++i) m.push_back(vec_to_json(s.matrix().row(i).transpose()));
  return {{"kind", "spd"}, {"matrix", std::move(m)}};
}

inline json to_json(const PolyNorm& k) {
  json facets = json::array();
  for (const auto& f : k.facets()) facets.push_back({{"a", vec_to_json(f.a)}, {"b", f.b}});
  json vertices = json::array();
  for (const auto& w : k.vertices()) vertices.push_back(vec_to_json(w));
  return {{"kind", "polytope"}, {"facets", std::move(facets)}, {"vertices", std::move(vertices)}};
}

inline json to_json(const Body& b) {
  return std::visit([](const auto& x) { return to_json(x); }, b);
}

/// Polytopes may omit either representation; the missing one is enumerated.
inline Body body_from_json(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "spd") {
    const json& rows = field(j, "matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Mat a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (rows[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(n)) throw UsageError("matrix is not square");
      a.row(i) = vec_from_json(rows[static_cast<std::size_t>(i)]).transpose();
    }
    return SpdNorm(std::move(a));
  }
  if (kind == "polytope") {
    std::vector<Facet> facets;
    std::vector<Vec> vertices;
    if (j.contains("facets"))
      for (const auto& f : j.at("facets")) facets.push_back({vec_from_json(field(f, "a")), field(f, "b").get<double>()});
    if (j.contains("vertices"))
      for (const auto& w : j.at("vertices")) vertices.push_back(vec_from_json(w));
    if (!facets.empty() && !vertices.empty()) return PolyNorm(std::move(facets), std::move(vertices));
    if (!facets.empty()) return PolyNorm::from_facets(facets);
    if (!vertices.empty()) return PolyNorm::from_vertices(vertices);
    throw UsageError("polytope needs facets or vertices");
  }
  throw UsageError("unknown body kind '" + kind + "'");
}

template <typename T>
json scalar_to_json(const T& x) {
  if constexpr (std::is_same_v<T, Rational>)
    return rational_to_json(x);
  else
    return x;
}

template <typename T>
T scalar_from_json(const json& j) {
  if constexpr (std::is_same_v<T, Rational>)
    return rational_from_json(j);
  else {
    if (j.is_string()) return parse_rational(j.get<std::string>()).get_d();
    return j.get<double>();
  }
}

template <typename T>
json to_json(const FiniteMetric<T>& x) {
  json d = json::array();
  for (const auto& row : x.matrix()) {
    json r = json::array();
    for (const auto& v : row) r.push_back(scalar_to_json(v));
    d.push_back(std::move(r));
  }
  return {{"labels", x.labels()}, {"d", std::move(d)}};
}

template <typename T>
FiniteMetric<T> metric_from_json(const json& j) {
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  std::vector<std::vector<T>> d;
  for (const auto& row : field(j, "d")) {
    std::vector<T> r;
    for (const auto& v : row) r.push_back(scalar_from_json<T>(v));
    d.push_back(std::move(r));
  }
  return FiniteMetric<T>(std::move(labels), std::move(d));
}

template <typename T>
json functions_to_json(const std::vector<Function<T>>& fs) {
  json out = json::array();
  for (const auto& f : fs) {
    json row = json::array();
    for (const auto& v : f) row.push_back(scalar_to_json(v));
    out.push_back(std::move(row));
  }
  return out;
}

template <typename T>
Function<T> function_from_json(const json& j) {
  Function<T> f;
  for (const auto& v : j) f.push_back(scalar_from_json<T>(v));
  return f;
}

inline json to_json(const SignedPerm& g) { return {{"perm", g.perm}, {"signs", g.signs}}; }

inline SignedPerm signed_perm_from_json(const json& j) {
  SignedPerm g{field(j, "perm").get<std::vector<int>>(), field(j, "signs").get<std::vector<int>>()};
  if (g.perm.size() != g.signs.size()) throw UsageError("perm/signs length mismatch");
  return g;
}

inline json to_json(const GroupOrderFacts& f) {
  return {{"n", f.n},
          {"alternating_order", f.alternating_order.get_str()},
          {"target_order", f.target_order.get_str()},
          {"divisible", f.divisible},
          {"alternating_orders", std::vector<long>(f.alternating_orders.begin(), f.alternating_orders.end())},
          {"target_orders", std::vector<long>(f.target_orders.begin(), f.target_orders.end())}};
}

inline json to_json(const ObstructionReport& r) {
  json j = {{"n", r.n},
            {"verdict", to_string(r.verdict)},
            {"reason", to_string(r.reason)},
            {"detail", r.detail},
            {"orders", to_json(r.orders)}};
  if (r.certificate) {
    json images = json::array();
    for (const auto& g : r.certificate->images) images.push_back(to_json(g));
    j["certificate"] = {{"generators", r.certificate->generators}, {"images", std::move(images)}};
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

inline json to_json(const BallCertificate& c, bool include_timing = false) {
  json family = json::array();
  for (const auto& b : c.family) family.push_back({{"center", to_json(b.center)}, {"radius", b.radius}});
  json stats = {{"ball_sizes", c.ball_sizes}, {"intersection_size", c.intersection_size}};
  if (include_timing) stats["runtime_ms"] = c.runtime_ms;
  return {{"mode", c.mode == HellyMode::Witness ? "witness" : "exhaustive"},
          {"outcome", c.outcome == HellyOutcome::Witness ? "witness" : "counterexample"},
          {"witness", c.witness ? to_json(*c.witness) : json(nullptr)},
          {"verified", c.verify()},
          {"family", std::move(family)},
          {"statistics", std::move(stats)}};
}

/// GraphML document for an induced adjacency map.
inline std::string to_graphml(const std::map<std::string, std::vector<std::string>>& adj,
                              const std::map<std::string, long>& depth) {
  auto esc = [](const std::string& s) {
    std::string o;
    for (char ch : s) {
      if (ch == '&') o += "&amp;";
      else if (ch == '<') o += "&lt;";
      else if (ch == '>') o += "&gt;";
      else if (ch == '"') o += "&quot;";
      else o += ch;
    }
    return o;
  };
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"depth\" for=\"node\" attr.name=\"depth\" attr.type=\"long\"/>\n"
      "  <graph id=\"thickening\" edgedefault=\"undirected\">\n";
  for (const auto& [k, _] : adj) {
    out += "    <node id=\"" + esc(k) + "\">";
    if (auto it = depth.find(k); it != depth.end()) out += "<data key=\"depth\">" + std::to_string(it->second) + "</data>";
    out += "</node>\n";
  }
  for (const auto& [k, nbrs] : adj)
    for (const auto& w : nbrs)
      if (k < w) out += "    <edge source=\"" + esc(k) + "\" target=\"" + esc(w) + "\"/>\n";
  out += "  </graph>\n</graphml>\n";
  return out;
}

}  // namespace normspace::io
