#pragma once

// Archimedean norms on R^n: SPD quadratic forms and centrally symmetric
// polytopes, their Goldman-Iwahori distance, inscribed/circumscribed
// ellipsoids, and intersection witnesses for families of balls.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "normspace/errors.hpp"
#include "normspace/polytope_enum.hpp"
#include "normspace/rational.hpp"
#include "normspace/rng.hpp"

namespace normspace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kStructuralTol = 1e-9;
constexpr double kOptimizationTol = 1e-6;

/// The norm v -> sqrt(v^T A v); unit ball {v^T A v <= 1}.
class SpdNorm {
 public:
  explicit SpdNorm(Mat a) : a_(std::move(a)) {
    if (a_.rows() != a_.cols() || a_.rows() == 0) throw UsageError("SPD matrix must be square");
    if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw UsageError("matrix is not symmetric");
    a_ = 0.5 * (a_ + a_.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(a_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0) throw UsageError("matrix is not positive definite");
  }

  /// Diagonal form exp(2 m_i): the flat norm sqrt(sum e^{2 m_i} x_i^2).
  static SpdNorm flat(std::span<const double> m) {
    Mat a = Mat::Zero(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = std::exp(2 * m[i]);
    return SpdNorm(std::move(a));
  }

  const Mat& matrix() const { return a_; }
  std::size_t dim() const { return static_cast<std::size_t>(a_.rows()); }
  double gauge(const Vec& v) const { return std::sqrt(std::max(0.0, v.dot(a_ * v))); }

 private:
  Mat a_;
};

struct Facet {
  Vec a;
  double b;
};

/// Centrally symmetric polytope {x : |<a_i, x>| <= b_i} = conv(+-w_j);
/// facets and vertices stored once per antipodal pair.
class PolyNorm {
 public:
  PolyNorm(std::vector<Facet> facets, std::vector<Vec> vertices)
      : facets_(std::move(facets)), vertices_(std::move(vertices)) {
    validate();
  }

  /// Exact vertex enumeration from an H-representation; redundant facets dropped.
  static PolyNorm from_facets(const std::vector<Facet>& facets);
  /// Exact facet enumeration from a V-representation; interior points dropped.
  static PolyNorm from_vertices(const std::vector<Vec>& vertices);

  static PolyNorm cube(std::size_t n) {
    std::vector<Facet> f;
    for (std::size_t i = 0; i < n; ++i) f.push_back({Vec::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)), 1.0});
    return from_facets(f);
  }
  static PolyNorm cross_polytope(std::size_t n) {
    std::vector<Vec> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(Vec::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)));
    return from_vertices(v);
  }

  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  std::size_t dim() const { return static_cast<std::size_t>(vertices_.front().size()); }

  double gauge(const Vec& v) const {
    double g = 0;
    for (const auto& f : facets_) g = std::max(g, std::abs(f.a.dot(v)) / f.b);
    return g;
  }

  /// e^s K (gauge scaled by e^-s).
  PolyNorm scaled(double s) const {
    const double k = std::exp(s);
    std::vector<Facet> f = facets_;
    for (auto& x : f) x.b *= k;
    std::vector<Vec> v = vertices_;
    for (auto& x : v) x *= k;
    return PolyNorm(std::move(f), std::move(v));
  }

 private:
  void validate() const {
    if (facets_.empty() || vertices_.empty()) throw UsageError("polytope needs facets and vertices");
    const auto n = vertices_.front().size();
    for (const auto& f : facets_) {
      if (f.a.size() != n) throw UsageError("facet dimension mismatch");
      if (!(f.b > 0)) throw UsageError("facet offsets must be positive");
    }
    for (const auto& w : vertices_)
      if (w.size() != n) throw UsageError("vertex dimension mismatch");
    for (const auto& w : vertices_)
      for (const auto& f : facets_)
        if (std::abs(f.a.dot(w)) > f.b * (1 + kStructuralTol))
          throw UsageError("vertex violates a facet");
    for (const auto& f : facets_) {
      const bool supported = std::any_of(vertices_.begin(), vertices_.end(), [&](const Vec& w) {
        return std::abs(f.a.dot(w)) >= f.b * (1 - kStructuralTol);
      });
      if (!supported) throw UsageError("facet not supported by any vertex");
    }
    Mat w(n, static_cast<Eigen::Index>(vertices_.size()));
    for (std::size_t j = 0; j < vertices_.size(); ++j) w.col(static_cast<Eigen::Index>(j)) = vertices_[j];
    Eigen::FullPivLU<Mat> lu(w);
    lu.setThreshold(1e-12);
    if (lu.rank() < n) throw UsageError("polytope has empty interior");
  }

  std::vector<Facet> facets_;
  std::vector<Vec> vertices_;
};

namespace detail {

inline QVector to_exact(const Vec& v) {
  QVector q(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) throw UsageError("non-finite coordinate");
    q[static_cast<std::size_t>(i)] = Rational(v(i));
  }
  return q;
}

inline Vec to_double(const QVector& q) {
  Vec v(static_cast<Eigen::Index>(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i) v(static_cast<Eigen::Index>(i)) = q[i].get_d();
  return v;
}

inline PolyNorm assemble(const std::vector<QFacet>& qf, const std::vector<QVector>& qv) {
  std::vector<Facet> facets;
  for (const auto& f : qf) {
    // Normalize to b = 1 so downstream doubles stay well scaled.
    QVector a = f.a;
    for (auto& c : a) c /= f.b;
    facets.push_back({to_double(a), 1.0});
  }
  std::vector<Vec> vertices;
  for (const auto& v : qv) vertices.push_back(to_double(v));
  return PolyNorm(std::move(facets), std::move(vertices));
}

}  // namespace detail

inline PolyNorm PolyNorm::from_facets(const std::vector<Facet>& facets) {
  std::vector<QFacet> qf;
  for (const auto& f : facets) {
    if (!(f.b > 0)) throw UsageError("facet offsets must be positive");
    qf.push_back({detail::to_exact(f.a), Rational(f.b)});
  }
  const std::vector<QVector> qv = vertex_enum(qf);
  return detail::assemble(irredundant_facets(qf, qv), qv);
}

inline PolyNorm PolyNorm::from_vertices(const std::vector<Vec>& vertices) {
  std::vector<QVector> qv;
  for (const auto& v : vertices) qv.push_back(detail::to_exact(v));
  const std::vector<QFacet> qf = facet_enum(qv);
  return detail::assemble(qf, irredundant_vertices(qv, qf));
}

/// Polar body: facets (a, b) become vertices a / b; vertices w become facets (w, 1).
inline PolyNorm polar(const PolyNorm& k) {
  std::vector<Vec> vertices;
  for (const auto& f : k.facets()) vertices.push_back(f.a / f.b);
  std::vector<Facet> facets;
  for (const auto& w : k.vertices()) facets.push_back({w, 1.0});
  return PolyNorm(std::move(facets), std::move(vertices));
}

using Body = std::variant<SpdNorm, PolyNorm>;

inline std::size_t body_dim(const Body& k) {
  return std::visit([](const auto& b) { return b.dim(); }, k);
}

inline double gauge(const Body& k, const Vec& v) {
  if (static_cast<std::size_t>(v.size()) != body_dim(k)) throw UsageError("gauge: dimension mismatch");
  return std::visit([&](const auto& b) { return b.gauge(v); }, k);
}

/// Generalized eigenvalues of the pencil (a1, a2) via Cholesky congruence
/// a2 = L L^T, C = L^-1 a1 L^-T.
inline Vec generalized_eigenvalues(const Mat& a1, const Mat& a2) {
  Eigen::LLT<Mat> llt(a2);
  if (llt.info() != Eigen::Success) throw UsageError("singular pencil: second form is not SPD");
  const Mat l = llt.matrixL();
  const Mat linv_a1 = l.triangularView<Eigen::Lower>().solve(a1);
  const Mat c = l.triangularView<Eigen::Lower>().solve(linv_a1.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (c + c.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0) throw UsageError("singular pencil: first form is not SPD");
  return es.eigenvalues();
}

namespace detail {

/// sup_v gauge1(v) / gauge2(v), per representation pair.
inline double sup_ratio(const SpdNorm& k1, const SpdNorm& k2) {
  return std::sqrt(generalized_eigenvalues(k1.matrix(), k2.matrix()).maxCoeff());
}
inline double sup_ratio(const SpdNorm& k1, const PolyNorm& k2) {
  double s = 0;
  for (const auto& w : k2.vertices()) s = std::max(s, k1.gauge(w) / k2.gauge(w));
  return s;
}
inline double sup_ratio(const PolyNorm& k1, const SpdNorm& k2) {
  Eigen::LLT<Mat> llt(k2.matrix());
  double s = 0;
  for (const auto& f : k1.facets()) s = std::max(s, std::sqrt(f.a.dot(llt.solve(f.a))) / f.b);
  return s;
}
inline double sup_ratio(const PolyNorm& k1, const PolyNorm& k2) {
  double s = 0;
  for (const auto& w : k2.vertices()) s = std::max(s, k1.gauge(w) / k2.gauge(w));
  return s;
}

}  // namespace detail

/// sup_v log gauge1(v) / gauge2(v).
inline double log_sup_ratio(const Body& k1, const Body& k2) {
  return std::visit([](const auto& a, const auto& b) { return std::log(detail::sup_ratio(a, b)); }, k1, k2);
}

inline double gi_distance_bodies(const Body& k1, const Body& k2) {
  if (body_dim(k1) != body_dim(k2)) throw UsageError("bodies have different dimensions");
  return std::max({log_sup_ratio(k1, k2), log_sup_ratio(k2, k1), 0.0});
}

/// Lower bound on the distance from N seeded unit directions.
inline double sampled_sup_ratio(const Body& k1, const Body& k2, std::size_t samples, std::uint64_t seed) {
  const std::size_t n = body_dim(k1);
  if (body_dim(k2) != n) throw UsageError("bodies have different dimensions");
  Rng rng(seed);
  double best = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto u = rng.unit_vector(n);
    const Vec v = Eigen::Map<const Vec>(u.data(), static_cast<Eigen::Index>(n));
    best = std::max(best, std::abs(std::log(gauge(k1, v) / gauge(k2, v))));
  }
  return best;
}

struct MveeResult {
  SpdNorm ellipsoid;
  std::vector<double> weights;
  /// max_i x_i^T A x_i - 1; the (1 + gap)-scaled ellipsoid contains every point.
  double gap;
  std::size_t iterations;
};

/// Origin-centred minimum-volume ellipsoid of +-points by Frank-Wolfe with
/// away steps on the D-optimal design weights.
inline MveeResult mvee_solve(std::span<const Vec> points, double eps = kOptimizationTol,
                             std::size_t max_iterations = 2'000'000) {
  if (points.empty()) throw UsageError("mvee: empty point set");
  const auto n = points.front().size();
  const auto m = points.size();
  const double nd = static_cast<double>(n);
  for (const auto& x : points)
    if (x.size() != n) throw UsageError("mvee: points of mixed dimension");
  std::vector<double> u(m, 1.0 / static_cast<double>(m));
  std::vector<double> kappa(m);
  for (std::size_t it = 0;; ++it) {
    Mat x = Mat::Zero(n, n);
    for (std::size_t i = 0; i < m; ++i) x.noalias() += u[i] * points[i] * points[i].transpose();
    Eigen::LLT<Mat> llt(x);
    if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() < 1e-150)
      throw UsageError("mvee: points do not span");
    std::size_t jmax = 0, kmin = m;
    for (std::size_t i = 0; i < m; ++i) {
      kappa[i] = points[i].dot(llt.solve(points[i]));
      if (kappa[i] > kappa[jmax]) jmax = i;
      if (u[i] > 0 && (kmin == m || kappa[i] < kappa[kmin])) kmin = i;
    }
    const double up = kappa[jmax] / nd - 1;
    const double down = 1 - kappa[kmin] / nd;
    if (up <= eps || it >= max_iterations) {
      if (up > eps) throw DefectError("mvee: iteration cap reached before convergence");
      Mat a = llt.solve(Mat::Identity(n, n)) / nd;
      a = 0.5 * (a + a.transpose());
      return {SpdNorm(std::move(a)), u, std::max(up, 0.0), it};
    }
    if (up >= down) {
      const double tau = (kappa[jmax] - nd) / (nd * (kappa[jmax] - 1));
      for (auto& w : u) w *= 1 - tau;
      u[jmax] += tau;
    } else {
      const double drop = -u[kmin] / (1 - u[kmin]);
      const double tau = kappa[kmin] <= 1 ? drop : std::max(drop, (kappa[kmin] - nd) / (nd * (kappa[kmin] - 1)));
      for (auto& w : u) w *= 1 - tau;
      u[kmin] += tau;
      if (tau == drop) u[kmin] = 0;
    }
  }
}

inline SpdNorm mvee(std::span<const Vec> points) { return mvee_solve(points).ellipsoid; }

struct JohnResult {
  SpdNorm ellipsoid;
  double distance;     // gi_distance_bodies(ellipsoid, K)
  double bound;        // log sqrt(n)
  bool inscribed;      // a_i^T Q a_i <= b_i^2 (1 + 1e-6) for all facets
  bool bound_check;    // distance <= bound + 1e-6
  double mvee_gap;
};

/// Maximal-volume inscribed origin-centred ellipsoid, as the polar of the
/// minimum-volume ellipsoid around the polar body's vertices.
inline JohnResult john_report(const PolyNorm& k) {
  std::vector<Vec> pts;
  for (const auto& f : k.facets()) pts.push_back(f.a / f.b);
  MveeResult outer = mvee_solve(pts);
  const Mat& q = outer.ellipsoid.matrix();
  Mat a = q.inverse();
  a = 0.5 * (a + a.transpose());
  SpdNorm john(std::move(a));
  bool inscribed = true;
  for (const auto& f : k.facets())
    if (f.a.dot(q * f.a) > f.b * f.b * (1 + kOptimizationTol)) inscribed = false;
  const double d = gi_distance_bodies(john, k);
  const double bound = std::log(std::sqrt(static_cast<double>(k.dim())));
  return {std::move(john), d, bound, inscribed, d <= bound + kOptimizationTol, outer.gap};
}

inline SpdNorm john_ellipsoid(const PolyNorm& k) { return john_report(k).ellipsoid; }

/// Directions for circumscribed approximations of ellipsoids.
inline std::vector<Vec> sphere_directions(std::size_t n, std::size_t count) {
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec::Ones(1));
  } else if (n == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double t = std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
      Vec v(2);
      v << std::cos(t), std::sin(t);
      dirs.push_back(v);
    }
  } else if (n == 3) {
    // Fibonacci lattice on the upper hemisphere.
    const double golden = std::numbers::pi * (3 - std::sqrt(5.0));
    for (std::size_t k = 0; k < count; ++k) {
      const double z = (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      const double r = std::sqrt(1 - z * z);
      Vec v(3);
      v << r * std::cos(golden * static_cast<double>(k)), r * std::sin(golden * static_cast<double>(k)), z;
      dirs.push_back(v);
    }
  } else {
    throw InfeasibleScale("polytope approximation supports dimension <= 3");
  }
  return dirs;
}

constexpr std::size_t kApproxPairs2d = 64;
constexpr std::size_t kApproxPairs3d = 242;

/// Polytope containing the ellipsoid, tangent to it along the chosen directions.
inline PolyNorm circumscribed_polytope(const SpdNorm& e) {
  const std::size_t n = e.dim();
  const auto dirs = sphere_directions(n, n == 2 ? kApproxPairs2d : kApproxPairs3d);
  Eigen::LLT<Mat> llt(e.matrix());
  const Mat l = llt.matrixL();
  std::vector<Facet> facets;
  for (const auto& u : dirs) facets.push_back({l * u, 1.0});
  return PolyNorm::from_facets(facets);
}

struct BodyWitness {
  PolyNorm intersection;
  std::vector<double> distances;   // d(intersection, K_s)
  std::vector<double> tolerances;  // 1e-6 plus the polytope approximation error of K_s
};

/// C = intersection of e^{r_s} K_s. Requires d(K_s, K_t) <= r_s + r_t + 1e-9.
inline BodyWitness coarse_helly_witness_bodies(std::span<const Body> bodies, std::span<const double> radii) {
  if (bodies.empty()) throw UsageError("empty family");
  if (bodies.size() != radii.size()) throw UsageError("radii count mismatch");
  const std::size_t n = body_dim(bodies.front());
  for (std::size_t s = 0; s < bodies.size(); ++s) {
    if (body_dim(bodies[s]) != n) throw UsageError("bodies have different dimensions");
    if (!(radii[s] >= 0)) throw UsageError("negative radius");
  }
  for (std::size_t s = 0; s < bodies.size(); ++s)
    for (std::size_t t = s + 1; t < bodies.size(); ++t) {
      const double d = gi_distance_bodies(bodies[s], bodies[t]);
      if (d > radii[s] + radii[t] + kStructuralTol)
        throw PreconditionViolation("bodies " + std::to_string(s) + " and " + std::to_string(t) +
                                    " are incompatible: distance exceeds radius sum by " +
                                    std::to_string(d - radii[s] - radii[t]));
    }
  std::vector<double> approx(bodies.size(), 0.0);
  std::vector<Facet> pooled;
  for (std::size_t s = 0; s < bodies.size(); ++s) {
    PolyNorm p = std::holds_alternative<PolyNorm>(bodies[s])
                     ? std::get<PolyNorm>(bodies[s])
                     : circumscribed_polytope(std::get<SpdNorm>(bodies[s]));
    if (std::holds_alternative<SpdNorm>(bodies[s])) approx[s] = gi_distance_bodies(bodies[s], p);
    const double k = std::exp(radii[s]);
    for (const auto& f : p.facets()) pooled.push_back({f.a, f.b * k});
  }
  BodyWitness out{PolyNorm::from_facets(pooled), {}, {}};
  for (std::size_t s = 0; s < bodies.size(); ++s) {
    const double d = gi_distance_bodies(out.intersection, bodies[s]);
    out.distances.push_back(d);
    out.tolerances.push_back(kOptimizationTol + approx[s]);
    if (d > radii[s] + out.tolerances.back())
      throw DefectError("coarse_helly_witness_bodies: intersection outside ball " + std::to_string(s));
  }
  return out;
}

/// A finite linear group given by generators; the closure is computed eagerly.
class LinearGroupAction {
 public:
  static constexpr std::size_t kClosureCap = 10'000;

  explicit LinearGroupAction(std::vector<Mat> generators) : generators_(std::move(generators)) {
    if (generators_.empty()) throw UsageError("group needs at least one generator");
    const auto n = generators_.front().rows();
    for (const auto& g : generators_) {
      if (g.rows() != n || g.cols() != n) throw UsageError("generator dimension mismatch");
      if (std::abs(g.determinant()) < 1e-12) throw UsageError("generator is not invertible");
    }
    elements_.push_back(Mat::Identity(n, n));
    for (std::size_t head = 0; head < elements_.size(); ++head)
      for (const auto& g : generators_) {
        Mat prod = g * elements_[head];
        if (find(prod) != elements_.size()) continue;
        if (elements_.size() == kClosureCap) throw InfeasibleScale("group closure exceeds 10^4 elements");
        elements_.push_back(std::move(prod));
      }
  }

  std::size_t dim() const { return static_cast<std::size_t>(generators_.front().rows()); }
  const std::vector<Mat>& generators() const { return generators_; }
  const std::vector<Mat>& elements() const { return elements_; }

  std::size_t find(const Mat& m) const {
    for (std::size_t i = 0; i < elements_.size(); ++i)
      if ((elements_[i] - m).cwiseAbs().maxCoeff() <= kStructuralTol) return i;
    return elements_.size();
  }

  /// Closure under products and inverses, checked entrywise.
  bool is_group() const {
    for (const auto& a : elements_) {
      if (find(a.inverse()) == elements_.size()) return false;
      for (const auto& b : elements_)
        if (find(a * b) == elements_.size()) return false;
    }
    return true;
  }

 private:
  std::vector<Mat> generators_;
  std::vector<Mat> elements_;
};

inline Mat rotation2d(double angle) {
  Mat r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Gauge invariance on a fixed 10^3-direction sample, plus vertex-set
/// invariance for polytopes.
inline bool is_invariant(const Body& k, const LinearGroupAction& group) {
  const std::size_t n = body_dim(k);
  if (group.dim() != n) throw UsageError("group/body dimension mismatch");
  Rng rng(0x5eed1e55ULL);
  std::vector<Vec> sample;
  for (int s = 0; s < 1000; ++s) {
    const auto u = rng.unit_vector(n);
    sample.push_back(Eigen::Map<const Vec>(u.data(), static_cast<Eigen::Index>(n)));
  }
  for (const auto& g : group.elements())
    for (const auto& v : sample) {
      const double a = gauge(k, v);
      if (std::abs(gauge(k, g * v) - a) > kStructuralTol * std::max(1.0, a)) return false;
    }
  if (const auto* p = std::get_if<PolyNorm>(&k)) {
    for (const auto& g : group.elements())
      for (const auto& w : p->vertices()) {
        const Vec gw = g * w;
        const double tol = kStructuralTol * std::max(1.0, w.norm());
        const bool hit = std::any_of(p->vertices().begin(), p->vertices().end(), [&](const Vec& x) {
          return (gw - x).cwiseAbs().maxCoeff() <= tol || (gw + x).cwiseAbs().maxCoeff() <= tol;
        });
        if (!hit) return false;
      }
  }
  return true;
}

/// Random symmetric polytope conv(+-w_j) of 'pairs' Gaussian points;
/// rank-deficient draws are redrawn.
inline PolyNorm random_polytope(Rng& rng, std::size_t n, std::size_t pairs) {
  for (;;) {
    std::vector<Vec> pts;
    for (std::size_t j = 0; j < pairs; ++j) {
      Vec v(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
      pts.push_back(v);
    }
    try {
      return PolyNorm::from_vertices(pts);
    } catch (const UsageError&) {
      continue;  // degenerate draw
    }
  }
}

inline SpdNorm random_spd(Rng& rng, std::size_t n, double spread = 1.0) {
  Mat g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.normal() * spread;
  return SpdNorm(g * g.transpose() + 0.1 * Mat::Identity(g.rows(), g.cols()));
}

}  // namespace normspace
