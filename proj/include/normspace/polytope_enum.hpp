#pragma once

// Exact vertex/facet enumeration for centrally symmetric polytopes in
// dimension <= 3.
//
// Both directions reduce to one primitive: the supporting planes
// {y : <x, y> = 1} of conv(+-points). For facets |<a_i, x>| <= b_i the
// points are a_i / b_i and each plane normal x is a vertex; for vertices w_j
// the points are w_j and each plane normal x is a facet (x, 1).

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "normspace/errors.hpp"
#include "normspace/rational.hpp"

namespace normspace {

constexpr std::size_t kMaxExactDim = 3;

namespace detail {

/// Flip sign so that the first nonzero coordinate is positive.
inline QVector sign_canonical(QVector x) {
  for (const auto& c : x) {
    if (sgn(c) == 0) continue;
    if (sgn(c) < 0)
      for (auto& y : x) y = -y;
    break;
  }
  return x;
}

inline Rational dot(const QVector& a, const QVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline QVector sub(const QVector& a, const QVector& b) {
  QVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline QVector cross(const QVector& a, const QVector& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline std::vector<QVector> symmetrize(const std::vector<QVector>& pts) {
  std::vector<QVector> all;
  all.reserve(2 * pts.size());
  for (const auto& p : pts) {
    all.push_back(p);
    QVector q = p;
    for (auto& c : q) c = -c;
    all.push_back(std::move(q));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

inline std::vector<QVector> hull_planes_1d(const std::vector<QVector>& pts) {
  Rational m = 0;
  for (const auto& p : pts) m = std::max(m, Rational(abs(p[0])));
  if (m == 0) throw UsageError("degenerate point set");
  return {QVector{Rational(1) / m}};
}

// Andrew's monotone chain; collinear points are dropped.
inline std::vector<QVector> hull_planes_2d(const std::vector<QVector>& pts) {
  std::vector<QVector> all = symmetrize(pts);
  auto turn = [](const QVector& o, const QVector& a, const QVector& b) {
    return sgn(Rational((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])));
  };
  std::vector<const QVector*> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    auto body = [&](const QVector& p) {
      while (hull.size() >= base + 2 && turn(*hull[hull.size() - 2], *hull.back(), p) <= 0) hull.pop_back();
      hull.push_back(&p);
    };
    if (pass == 0)
      for (const auto& p : all) body(p);
    else
      for (auto it = all.rbegin(); it != all.rend(); ++it) body(*it);
    hull.pop_back();
  }
  if (hull.size() < 3) throw UsageError("degenerate point set");
  std::vector<QVector> planes;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const QVector& u = *hull[i];
    const QVector& w = *hull[(i + 1) % hull.size()];
    QMatrix a(2, 2);
    a(0, 0) = u[0]; a(0, 1) = u[1];
    a(1, 0) = w[0]; a(1, 1) = w[1];
    QVector x;
    if (!solve(a, {Rational(1), Rational(1)}, x)) throw UsageError("origin on the hull boundary");
    planes.push_back(sign_canonical(std::move(x)));
  }
  std::sort(planes.begin(), planes.end());
  planes.erase(std::unique(planes.begin(), planes.end()), planes.end());
  return planes;
}

// Incremental hull with exact orientation tests. Coplanar points are treated
// as not visible, so faces may be triangulated polygons; the plane normals
// are deduplicated at the end.
inline std::vector<QVector> hull_planes_3d(const std::vector<QVector>& pts) {
  const std::vector<QVector> all = symmetrize(pts);
  const std::size_t np = all.size();
  std::size_t i0 = 0, i1 = np, i2 = np, i3 = np;
  for (std::size_t i = 1; i < np && i1 == np; ++i)
    if (all[i] != all[i0]) i1 = i;
  if (i1 == np) throw UsageError("degenerate point set");
  const QVector e1 = sub(all[i1], all[i0]);
  for (std::size_t i = 0; i < np && i2 == np; ++i) {
    const QVector c = cross(e1, sub(all[i], all[i0]));
    if (sgn(c[0]) || sgn(c[1]) || sgn(c[2])) i2 = i;
  }
  if (i2 == np) throw UsageError("degenerate point set");
  const QVector n012 = cross(e1, sub(all[i2], all[i0]));
  for (std::size_t i = 0; i < np && i3 == np; ++i)
    if (sgn(dot(n012, sub(all[i], all[i0]))) != 0) i3 = i;
  if (i3 == np) throw UsageError("degenerate point set");

  struct Face {
    std::size_t a, b, c;
    QVector normal;
    Rational offset;
    bool alive = true;
  };
  std::vector<Face> faces;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_face;
  auto add_face = [&](std::size_t a, std::size_t b, std::size_t c) {
    QVector nrm = cross(sub(all[b], all[a]), sub(all[c], all[a]));
    Rational off = dot(nrm, all[a]);
    const std::size_t id = faces.size();
    faces.push_back({a, b, c, std::move(nrm), std::move(off), true});
    edge_face[{a, b}] = id;
    edge_face[{b, c}] = id;
    edge_face[{c, a}] = id;
  };
  if (sgn(dot(n012, sub(all[i3], all[i0]))) > 0) std::swap(i1, i2);
  // Now (i0, i1, i2) faces away from i3.
  add_face(i0, i1, i2);
  add_face(i0, i3, i1);
  add_face(i1, i3, i2);
  add_face(i2, i3, i0);

  for (std::size_t p = 0; p < np; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (faces[f].alive && dot(faces[f].normal, all[p]) > faces[f].offset) visible.push_back(f);
    if (visible.empty()) continue;
    std::vector<char> is_visible(faces.size(), 0);
    for (auto f : visible) is_visible[f] = 1;
    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    for (auto f : visible) {
      const Face& fc = faces[f];
      for (auto [u, v] : {std::pair{fc.a, fc.b}, std::pair{fc.b, fc.c}, std::pair{fc.c, fc.a}}) {
        const auto it = edge_face.find({v, u});
        if (it == edge_face.end()) throw DefectError("hull: open edge");
        if (!is_visible[it->second]) horizon.emplace_back(u, v);
      }
    }
    for (auto f : visible) {
      Face& fc = faces[f];
      fc.alive = false;
      edge_face.erase({fc.a, fc.b});
      edge_face.erase({fc.b, fc.c});
      edge_face.erase({fc.c, fc.a});
    }
    for (auto [u, v] : horizon) add_face(u, v, p);
  }

  std::vector<QVector> planes;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    if (sgn(f.offset) <= 0) throw UsageError("origin on the hull boundary");
    QVector x = f.normal;
    for (auto& c : x) c /= f.offset;
    planes.push_back(sign_canonical(std::move(x)));
  }
  std::sort(planes.begin(), planes.end());
  planes.erase(std::unique(planes.begin(), planes.end()), planes.end());
  return planes;
}

}  // namespace detail

/// Normals x (one per antipodal pair, first nonzero coordinate positive) of
/// the facets {<x, y> = 1} of conv(+-points). Requires full rank.
inline std::vector<QVector> symmetric_hull_planes(const std::vector<QVector>& points) {
  if (points.empty()) throw UsageError("empty point set");
  const std::size_t n = points.front().size();
  for (const auto& p : points)
    if (p.size() != n) throw UsageError("points of mixed dimension");
  if (n == 0) throw UsageError("zero-dimensional points");
  if (n > kMaxExactDim) throw InfeasibleScale("exact enumeration supports dimension <= 3");
  switch (n) {
    case 1: return detail::hull_planes_1d(points);
    case 2: return detail::hull_planes_2d(points);
    default: return detail::hull_planes_3d(points);
  }
}

/// A symmetric facet |<a, x>| <= b.
struct QFacet {
  QVector a;
  Rational b;
};

/// Vertices (one per antipodal pair) of {x : |<a_i, x>| <= b_i}.
inline std::vector<QVector> vertex_enum(const std::vector<QFacet>& facets) {
  std::vector<QVector> pts;
  for (const auto& f : facets) {
    if (sgn(f.b) <= 0) throw UsageError("facet offsets must be positive");
    QVector q = f.a;
    for (auto& c : q) c /= f.b;
    pts.push_back(std::move(q));
  }
  return symmetric_hull_planes(pts);
}

/// Facets (a, 1), one per antipodal pair, of conv(+-vertices).
inline std::vector<QFacet> facet_enum(const std::vector<QVector>& vertices) {
  std::vector<QFacet> out;
  for (auto& x : symmetric_hull_planes(vertices)) out.push_back({std::move(x), Rational(1)});
  return out;
}

/// Facets that touch the polytope in an (n-1)-dimensional face, with
/// duplicates (same plane up to scale and sign) removed. Exact.
inline std::vector<QFacet> irredundant_facets(const std::vector<QFacet>& facets,
                                              const std::vector<QVector>& vertices) {
  std::vector<QFacet> out;
  std::vector<QVector> seen;
  for (const auto& f : facets) {
    QVector key = f.a;
    for (auto& c : key) c /= f.b;
    key = detail::sign_canonical(std::move(key));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    std::vector<QVector> tight;
    for (const auto& v : vertices)
      if (abs(detail::dot(f.a, v)) == f.b) tight.push_back(v);
    if (tight.empty()) continue;
    // Vertices on +plane and reflected -plane vertices share the + plane.
    for (auto& v : tight)
      if (sgn(detail::dot(f.a, v)) < 0)
        for (auto& c : v) c = -c;
    if (rank(QMatrix::from_columns(tight)) < f.a.size()) continue;
    seen.push_back(std::move(key));
    out.push_back(f);
  }
  return out;
}

/// Vertices lying on n facets of independent directions.
inline std::vector<QVector> irredundant_vertices(const std::vector<QVector>& vertices,
                                                 const std::vector<QFacet>& facets) {
  std::vector<QVector> out;
  for (const auto& v : vertices) {
    const QVector key = detail::sign_canonical(v);
    if (std::find(out.begin(), out.end(), key) != out.end()) continue;
    std::vector<QVector> normals;
    for (const auto& f : facets)
      if (abs(detail::dot(f.a, v)) == f.b) normals.push_back(f.a);
    if (normals.empty() || rank(QMatrix::from_columns(normals)) < v.size()) continue;
    out.push_back(key);
  }
  return out;
}

}  // namespace normspace
