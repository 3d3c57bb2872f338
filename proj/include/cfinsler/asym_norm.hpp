#pragma once

// Asymmetric norms on R^n: polyhedral and arc-composite unit balls in the
// plane, quadratic norms in any dimension, and positive rescalings of either.
//
// All queries are exact for the stored representation: polyhedral norms are
// evaluated through their dual vertices, arc composites through ray/circle
// intersection, quadratic norms through a Cholesky factor.

#include "cfinsler/errors.hpp"
#include "cfinsler/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace cfinsler {

/// Relative tolerance used to decide that a covector sits exactly on a
/// normal-cone boundary (face normal of a polygon, arc joint, ...).
inline constexpr double kFaceTolerance = 1e-12;

namespace detail {

inline double cone_margin(const Point2& lo, const Point2& hi, const Point2& a) {
  const double na = a.norm();
  if (na == 0.0) return -1.0;
  const Point2 u = a / na;
  return std::min(cross2(lo.normalized(), u), cross2(u, hi.normalized()));
}

// CCW angle from a to b in [0, 2pi).
inline double ccw_angle(const Point2& a, const Point2& b) {
  return wrap_angle(std::atan2(cross2(a, b), a.dot(b)));
}

}  // namespace detail

/// Unit ball is a convex polygon with vertices listed counterclockwise.
/// Face k joins vertex k to vertex k+1; its dual vertex n_k satisfies
/// n_k . y = 1 along the face, so F(y) = max_k n_k . y.
class PolyhedralNorm {
 public:
  explicit PolyhedralNorm(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t k = vertices_.size();
    if (k < 3) fail(ErrorCode::InvalidNorm, "polyhedral norm needs at least 3 vertices");
    for (const auto& v : vertices_) {
      if (!v.allFinite()) fail(ErrorCode::InvalidNorm, "non-finite polyhedral vertex");
    }
    normals_.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const Point2& a = vertices_[i];
      const Point2& b = vertices_[(i + 1) % k];
      const Point2& c = vertices_[(i + 2) % k];
      // origin strictly left of every edge, and strictly convex turns
      if (cross2(a, b) <= 0.0) {
        fail(ErrorCode::InvalidNorm, "origin must lie strictly inside the counterclockwise vertex polygon");
      }
      if (cross2(b - a, c - b) <= 0.0) {
        fail(ErrorCode::InvalidNorm, "vertex polygon must be strictly convex and counterclockwise");
      }
      Eigen::Matrix2d m;
      m << a.x(), a.y(), b.x(), b.y();
      normals_.push_back(m.inverse() * Point2(1.0, 1.0));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) total += detail::ccw_angle(vertices_[i], vertices_[(i + 1) % k]);
    if (std::abs(total - kTwoPi) > 1e-9) fail(ErrorCode::InvalidNorm, "vertex polygon winds more than once");
    for (const auto& v : vertices_) radius_ = std::max(radius_, v.norm());
  }

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Point2>& face_normals() const { return normals_; }
  int size() const { return static_cast<int>(vertices_.size()); }
  double outer_radius() const { return radius_; }

  double eval(const Point2& y) const {
    double best = 0.0;
    for (const auto& n : normals_) best = std::max(best, n.dot(y));
    return best;
  }

  double dual(const Point2& a) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices_) best = std::max(best, a.dot(v));
    return std::max(best, 0.0);
  }

  int next(int i) const { return (i + 1) % size(); }
  int prev(int i) const { return (i + size() - 1) % size(); }

  /// Margin of `a` inside the normal cone of vertex k (bounded by the dual
  /// vertices of faces k-1 and k).
  double vertex_margin(int k, const Point2& a) const {
    return detail::cone_margin(normals_[prev(k)], normals_[k], a);
  }

 private:
  std::vector<Point2> vertices_;
  std::vector<Point2> normals_;
  double radius_ = 0.0;
};

/// F(y) = sqrt(y^T A y) with A symmetric positive definite.
class QuadraticNorm {
 public:
  explicit QuadraticNorm(Matrix a) : a_(std::move(a)) {
    if (a_.rows() != a_.cols() || a_.rows() < 1) fail(ErrorCode::InvalidNorm, "quadratic norm needs a square matrix");
    if (!a_.allFinite()) fail(ErrorCode::InvalidNorm, "non-finite quadratic norm matrix");
    const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
    if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      fail(ErrorCode::InvalidNorm, "quadratic norm matrix must be symmetric");
    }
    a_ = 0.5 * (a_ + a_.transpose());
    llt_.compute(a_);
    if (llt_.info() != Eigen::Success) fail(ErrorCode::InvalidNorm, "quadratic norm matrix must be positive definite");
    inverse_ = llt_.solve(Matrix::Identity(a_.rows(), a_.cols()));
  }

  const Matrix& matrix() const { return a_; }
  const Matrix& inverse() const { return inverse_; }
  int dimension() const { return static_cast<int>(a_.rows()); }

  double eval(const Vector& y) const { return std::sqrt(std::max(0.0, y.dot(a_ * y))); }
  double dual(const Covector& alpha) const {
    return std::sqrt(std::max(0.0, (alpha * inverse_ * alpha.transpose())(0)));
  }
  Vector solve(const Vector& rhs) const { return llt_.solve(rhs); }

 private:
  Matrix a_;
  Eigen::LLT<Matrix> llt_;
  Matrix inverse_;
};

/// One circular arc of an arc-composite unit circle. `from`/`to` are the
/// polar angles (seen from the origin) of the arc endpoints, counterclockwise.
struct Arc {
  Point2 center;
  double radius = 1.0;
  double from = 0.0;
  double to = 0.0;
};

/// Closed convex curve around the origin made of circular arcs, each
/// covering a polar-angle interval. Joints where the outward normal jumps are
/// corners with a nondegenerate normal cone.
class ArcCompositeNorm {
 public:
  explicit ArcCompositeNorm(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
    const std::size_t m = arcs_.size();
    if (m < 2) fail(ErrorCode::InvalidNorm, "arc composite needs at least 2 arcs");
    for (std::size_t k = 0; k < m; ++k) {
      const Arc& a = arcs_[k];
      if (!(a.radius > 0.0) || !a.center.allFinite() || !std::isfinite(a.from) || !std::isfinite(a.to)) {
        fail(ErrorCode::InvalidNorm, "arc " + std::to_string(k) + " has invalid center/radius/interval");
      }
      if (!(a.to > a.from)) fail(ErrorCode::InvalidNorm, "arc " + std::to_string(k) + " has an empty angular interval");
      if (k + 1 < m && std::abs(arcs_[k + 1].from - a.to) > 1e-9) {
        fail(ErrorCode::InvalidNorm, "arc intervals must be contiguous");
      }
    }
    for (std::size_t k = 0; k + 1 < m; ++k) arcs_[k + 1].from = arcs_[k].to;
    base_ = arcs_.front().from;
    if (std::abs(arcs_.back().to - base_ - kTwoPi) > 1e-9) {
      fail(ErrorCode::InvalidNorm, "arc intervals must cover exactly one turn");
    }
    arcs_.back().to = base_ + kTwoPi;

    for (std::size_t k = 0; k < m; ++k) {
      const Arc& a = arcs_[k];
      for (double th : {a.from, 0.5 * (a.from + a.to), a.to}) {
        if (!ray_hits(static_cast<int>(k), th)) {
          fail(ErrorCode::InvalidNorm, "ray from the origin misses arc " + std::to_string(k));
        }
      }
      starts_.push_back(hit_point(static_cast<int>(k), a.from));
      ends_.push_back(hit_point(static_cast<int>(k), a.to));
      start_normals_.push_back((starts_.back() - a.center) / a.radius);
      end_normals_.push_back((ends_.back() - a.center) / a.radius);
    }
    double turning = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t nk = (k + 1) % m;
      const double scale = std::max(1.0, ends_[k].norm());
      if ((ends_[k] - starts_[nk]).norm() > 1e-9 * scale) {
        fail(ErrorCode::InvalidNorm, "arcs " + std::to_string(k) + " and " + std::to_string(nk) + " do not join");
      }
      if (start_normals_[k].dot(starts_[k]) <= 0.0 || end_normals_[k].dot(ends_[k]) <= 0.0) {
        fail(ErrorCode::InvalidNorm, "origin must lie strictly inside the arc composite");
      }
      const double span = detail::ccw_angle(start_normals_[k], end_normals_[k]);
      const double joint = detail::ccw_angle(end_normals_[k], start_normals_[nk]);
      const double joint_abs = std::min(joint, kTwoPi - joint);
      if (span >= kPi) fail(ErrorCode::InvalidNorm, "arc " + std::to_string(k) + " turns by half a circle or more");
      if (joint >= kPi && joint_abs > 1e-9) fail(ErrorCode::InvalidNorm, "arc composite is not convex at a joint");
      turning += span + (joint >= kPi ? 0.0 : joint);
    }
    if (std::abs(turning - kTwoPi) > 1e-7) fail(ErrorCode::InvalidNorm, "arc composite is not convex");
    // corner k sits at the start of arc k
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t pk = (k + m - 1) % m;
      const double joint = detail::ccw_angle(end_normals_[pk], start_normals_[k]);
      corners_.push_back(joint < kPi && joint > kFaceTolerance);
    }
  }

  const std::vector<Arc>& arcs() const { return arcs_; }
  int size() const { return static_cast<int>(arcs_.size()); }
  int next(int k) const { return (k + 1) % size(); }
  int prev(int k) const { return (k + size() - 1) % size(); }
  const Point2& arc_start(int k) const { return starts_[k]; }
  const Point2& arc_end(int k) const { return ends_[k]; }
  const Point2& start_normal(int k) const { return start_normals_[k]; }
  const Point2& end_normal(int k) const { return end_normals_[k]; }
  bool has_corner(int k) const { return corners_[k]; }

  int arc_index(double theta) const {
    const double t = wrap_angle(theta, base_);
    for (int k = 0; k < size(); ++k) {
      if (t < arcs_[k].to) return k;
    }
    return size() - 1;
  }

  /// Distance along the unit ray at polar angle theta to arc k.
  double ray_distance(int k, double theta) const {
    const Point2 u(std::cos(theta), std::sin(theta));
    const Arc& a = arcs_[k];
    const double b = u.dot(a.center);
    const double disc = b * b - a.center.squaredNorm() + a.radius * a.radius;
    return b + std::sqrt(std::max(0.0, disc));
  }

  Point2 point_at(double theta) const {
    const int k = arc_index(theta);
    return ray_distance(k, theta) * Point2(std::cos(theta), std::sin(theta));
  }

  double eval(const Point2& y) const {
    const double r = y.norm();
    if (r == 0.0) return 0.0;
    const double theta = std::atan2(y.y(), y.x());
    return r / ray_distance(arc_index(theta), theta);
  }

  double arc_margin(int k, const Point2& a) const {
    return detail::cone_margin(start_normals_[k], end_normals_[k], a);
  }
  double corner_margin(int k, const Point2& a) const {
    return detail::cone_margin(end_normals_[prev(k)], start_normals_[k], a);
  }

  /// Boundary point maximizing `a`, chosen among arcs whose normal range
  /// contains `a` and all corners.
  Point2 maximizer(const Point2& a) const {
    Point2 best = starts_[0];
    double best_value = a.dot(best);
    auto consider = [&](const Point2& p) {
      const double v = a.dot(p);
      if (v > best_value) {
        best_value = v;
        best = p;
      }
    };
    for (const auto& p : starts_) consider(p);
    const double na = a.norm();
    if (na > 0.0) {
      for (int k = 0; k < size(); ++k) {
        if (arc_margin(k, a) >= 0.0) consider(arcs_[k].center + arcs_[k].radius * a / na);
      }
    }
    return best;
  }

  double dual(const Point2& a) const { return std::max(0.0, a.dot(maximizer(a))); }

  /// alpha applied to the counterclockwise tangent of the boundary at polar
  /// angle theta; its sign is the sign of d/dtheta alpha(boundary(theta)).
  double tangent_slope(const Point2& a, double theta) const {
    const int k = arc_index(theta);
    const Point2 p = point_at(theta);
    const Point2 r = p - arcs_[k].center;
    return a.dot(Point2(-r.y(), r.x()));
  }

 private:
  bool ray_hits(int k, double theta) const {
    const Point2 u(std::cos(theta), std::sin(theta));
    const Arc& a = arcs_[k];
    const double b = u.dot(a.center);
    const double disc = b * b - a.center.squaredNorm() + a.radius * a.radius;
    return disc >= -1e-12 && b + std::sqrt(std::max(0.0, disc)) > 0.0;
  }
  Point2 hit_point(int k, double theta) const {
    return ray_distance(k, theta) * Point2(std::cos(theta), std::sin(theta));
  }

  std::vector<Arc> arcs_;
  double base_ = 0.0;
  std::vector<Point2> starts_, ends_, start_normals_, end_normals_;
  std::vector<bool> corners_;
};

enum class NormKind { Polyhedral, Quadratic, ArcComposite };

/// Control regime of a support selection: which vertex / arc / corner of the
/// unit sphere maximizes a covector. Quadratic norms have a single smooth one.
enum class RegimeKind { Smooth, Vertex, Arc, Corner };

struct Regime {
  RegimeKind kind = RegimeKind::Smooth;
  int index = 0;
  bool operator==(const Regime&) const = default;
};

inline std::string regime_id(const Regime& r) {
  switch (r.kind) {
    case RegimeKind::Smooth: return "S";
    case RegimeKind::Vertex: return "V" + std::to_string(r.index);
    case RegimeKind::Arc: return "A" + std::to_string(r.index);
    case RegimeKind::Corner: return "C" + std::to_string(r.index);
  }
  return "?";
}

struct SupportPoint {
  Vector v;
};

/// Closed segment of unit-sphere maximizers along polygon face `face`
/// (from vertex `face` to vertex `face + 1`, counterclockwise).
struct SupportFace {
  Vector from;
  Vector to;
  int face = -1;
};

using SupportSet = std::variant<SupportPoint, SupportFace>;

/// Immutable asymmetric norm value. Copies share the representation.
/// A scale factor s > 0 represents F(y) = G(y) / s for the stored G.
class AsymNorm {
 public:
  using Rep = std::variant<PolyhedralNorm, QuadraticNorm, ArcCompositeNorm>;

  static AsymNorm polyhedral(std::vector<Point2> vertices) {
    return AsymNorm(Rep(std::in_place_type<PolyhedralNorm>, std::move(vertices)));
  }
  static AsymNorm quadratic(Matrix a) { return AsymNorm(Rep(std::in_place_type<QuadraticNorm>, std::move(a))); }
  static AsymNorm euclidean(int n = 2) { return quadratic(Matrix::Identity(n, n)); }
  static AsymNorm arc_composite(std::vector<Arc> arcs) {
    return AsymNorm(Rep(std::in_place_type<ArcCompositeNorm>, std::move(arcs)));
  }

  /// Returns the norm y -> F(y) / factor.
  AsymNorm scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) fail(ErrorCode::InvalidNorm, "scale factor must be positive");
    AsymNorm out = *this;
    out.factor_ *= factor;
    return out;
  }

  NormKind kind() const { return static_cast<NormKind>(rep_->index()); }
  const Rep& rep() const { return *rep_; }
  double factor() const { return factor_; }
  int dimension() const {
    if (const auto* q = std::get_if<QuadraticNorm>(rep_.get())) return q->dimension();
    return 2;
  }
  bool strictly_convex() const { return kind() != NormKind::Polyhedral; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(rep_.get());
  }

 private:
  explicit AsymNorm(Rep rep) : rep_(std::make_shared<const Rep>(std::move(rep))) {}

  std::shared_ptr<const Rep> rep_;
  double factor_ = 1.0;
};

namespace detail {

inline void require_dim(const AsymNorm& n, Eigen::Index d) {
  if (d != n.dimension()) {
    fail(ErrorCode::InvalidArgument,
         "dimension mismatch: norm is " + std::to_string(n.dimension()) + "-dimensional, argument has " +
             std::to_string(d) + " components");
  }
}

}  // namespace detail

/// F(y).
inline double eval(const AsymNorm& n, const Vector& y) {
  detail::require_dim(n, y.size());
  double g = 0.0;
  if (const auto* p = n.as<PolyhedralNorm>()) g = p->eval(as_point(y));
  else if (const auto* q = n.as<QuadraticNorm>()) g = q->eval(y);
  else g = n.as<ArcCompositeNorm>()->eval(as_point(y));
  return g / n.factor();
}

/// Dual norm F*(alpha) = sup over the unit ball of alpha(y).
inline double dual_eval(const AsymNorm& n, const Covector& alpha) {
  detail::require_dim(n, alpha.size());
  double g = 0.0;
  if (const auto* p = n.as<PolyhedralNorm>()) g = p->dual(as_point(alpha));
  else if (const auto* q = n.as<QuadraticNorm>()) g = q->dual(alpha);
  else g = n.as<ArcCompositeNorm>()->dual(as_point(alpha));
  return g * n.factor();
}

/// Unit-sphere point in the polar direction theta (planar norms only).
inline Vector boundary_point(const AsymNorm& n, double theta) {
  const Vector u = vec({std::cos(theta), std::sin(theta)});
  return u / eval(n, u);
}

/// Unit-sphere maximizers of alpha. A face is reported exactly when alpha is
/// an outward normal of a polygon face (relative tolerance kFaceTolerance).
inline SupportSet support_set(const AsymNorm& n, const Covector& alpha) {
  detail::require_dim(n, alpha.size());
  if (alpha.norm() == 0.0) fail(ErrorCode::ZeroCovector, "support set of the zero covector");
  const double s = n.factor();
  if (const auto* p = n.as<PolyhedralNorm>()) {
    const Point2 a = as_point(alpha);
    const auto& v = p->vertices();
    int best = 0;
    for (int i = 1; i < p->size(); ++i) {
      if (a.dot(v[i]) > a.dot(v[best])) best = i;
    }
    const double tol = kFaceTolerance * a.norm() * p->outer_radius();
    const double top = a.dot(v[best]);
    if (top - a.dot(v[p->next(best)]) <= tol) {
      return SupportFace{s * as_vector(v[best]), s * as_vector(v[p->next(best)]), best};
    }
    if (top - a.dot(v[p->prev(best)]) <= tol) {
      const int f = p->prev(best);
      return SupportFace{s * as_vector(v[f]), s * as_vector(v[best]), f};
    }
    return SupportPoint{s * as_vector(v[best])};
  }
  if (const auto* q = n.as<QuadraticNorm>()) {
    const Vector w = q->solve(alpha.transpose());
    return SupportPoint{s * w / std::sqrt(alpha.dot(w.transpose()))};
  }
  return SupportPoint{s * as_vector(n.as<ArcCompositeNorm>()->maximizer(as_point(alpha)))};
}

/// Signed margin of alpha inside the normal cone of regime r; nonnegative
/// iff r is a maximizing control for alpha. Scale-free in alpha.
inline double regime_margin(const AsymNorm& n, const Regime& r, const Covector& alpha) {
  switch (r.kind) {
    case RegimeKind::Smooth: return 1.0;
    case RegimeKind::Vertex: return n.as<PolyhedralNorm>()->vertex_margin(r.index, as_point(alpha));
    case RegimeKind::Arc: return n.as<ArcCompositeNorm>()->arc_margin(r.index, as_point(alpha));
    case RegimeKind::Corner: return n.as<ArcCompositeNorm>()->corner_margin(r.index, as_point(alpha));
  }
  return -1.0;
}

/// Unit-sphere point selected by regime r for covector alpha. Arc regimes
/// extend smoothly past their cone (point = center + radius * alpha/|alpha|).
inline Vector regime_point(const AsymNorm& n, const Regime& r, const Covector& alpha) {
  const double s = n.factor();
  switch (r.kind) {
    case RegimeKind::Smooth: {
      const auto* q = n.as<QuadraticNorm>();
      const Vector w = q->solve(alpha.transpose());
      return s * w / std::sqrt(alpha.dot(w.transpose()));
    }
    case RegimeKind::Vertex: return s * as_vector(n.as<PolyhedralNorm>()->vertices()[r.index]);
    case RegimeKind::Arc: {
      const auto& arc = n.as<ArcCompositeNorm>()->arcs()[r.index];
      return s * as_vector(arc.center + arc.radius * as_point(alpha).normalized());
    }
    case RegimeKind::Corner: return s * as_vector(n.as<ArcCompositeNorm>()->arc_start(r.index));
  }
  return {};
}

/// Every regime whose normal cone contains alpha up to margin -tol.
inline std::vector<Regime> regimes_at(const AsymNorm& n, const Covector& alpha, double tol = kFaceTolerance) {
  if (alpha.norm() == 0.0) fail(ErrorCode::ZeroCovector, "regime of the zero covector");
  std::vector<Regime> out;
  if (n.as<QuadraticNorm>()) {
    out.push_back({RegimeKind::Smooth, 0});
  } else if (const auto* p = n.as<PolyhedralNorm>()) {
    for (int k = 0; k < p->size(); ++k) {
      if (p->vertex_margin(k, as_point(alpha)) >= -tol) out.push_back({RegimeKind::Vertex, k});
    }
  } else {
    const auto* c = n.as<ArcCompositeNorm>();
    for (int k = 0; k < c->size(); ++k) {
      if (c->has_corner(k) && c->corner_margin(k, as_point(alpha)) >= -tol) out.push_back({RegimeKind::Corner, k});
      if (c->arc_margin(k, as_point(alpha)) >= -tol) out.push_back({RegimeKind::Arc, k});
    }
  }
  return out;
}

/// Generators of the subdifferential of F at a unit-sphere point y: the
/// extreme rays of the normal cone plus `interior` evenly spaced convex
/// combinations, each normalized so that alpha(y) = 1.
inline std::vector<Covector> unit_subgradients(const AsymNorm& n, const Vector& y, int interior = 8) {
  const double s = n.factor();
  std::vector<Covector> out;
  auto add_cone = [&](const Point2& lo, const Point2& hi, const Point2& yy) {
    out.push_back(as_covector(lo / lo.dot(yy)));
    out.push_back(as_covector(hi / hi.dot(yy)));
    for (int i = 1; i <= interior; ++i) {
      const double lam = static_cast<double>(i) / (interior + 1);
      const Point2 m = (1.0 - lam) * lo / lo.dot(yy) + lam * hi / hi.dot(yy);
      out.push_back(as_covector(m));
    }
  };
  if (const auto* q = n.as<QuadraticNorm>()) {
    const Vector yy = y / s;
    out.push_back((q->matrix() * yy).transpose() / s);
    return out;
  }
  const Point2 yy = as_point(y) / s;
  if (const auto* p = n.as<PolyhedralNorm>()) {
    std::vector<int> active;
    for (int k = 0; k < p->size(); ++k) {
      if (p->face_normals()[k].dot(yy) >= 1.0 - 1e-12) active.push_back(k);
    }
    if (active.size() == 1) {
      out.push_back(as_covector(p->face_normals()[active[0]]));
    } else if (active.size() == 2) {
      int lo = active[0], hi = active[1];
      if (p->next(hi) == lo) std::swap(lo, hi);
      add_cone(p->face_normals()[lo], p->face_normals()[hi], yy);
    }
  } else {
    const auto* c = n.as<ArcCompositeNorm>();
    const double theta = std::atan2(yy.y(), yy.x());
    const int k = c->arc_index(theta);
    int corner = -1;
    for (int j = 0; j < c->size(); ++j) {
      if (c->has_corner(j) && (c->arc_start(j) - yy).norm() <= 1e-12 * std::max(1.0, yy.norm())) corner = j;
    }
    if (corner >= 0) {
      add_cone(c->end_normal(c->prev(corner)), c->start_normal(corner), yy);
    } else {
      const Point2 nrm = (yy - c->arcs()[k].center) / c->arcs()[k].radius;
      out.push_back(as_covector(nrm / nrm.dot(yy)));
    }
  }
  for (auto& a : out) a /= s;
  return out;
}

}  // namespace cfinsler
