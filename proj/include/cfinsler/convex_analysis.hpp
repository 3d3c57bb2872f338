#pragma once

// Convex-analytic queries on asymmetric norms that go beyond eval/dual:
// the conjugate of F^2, the gradient of F*^2, strong convexity and the
// Lipschitz behaviour of dF*^2.

#include "cfinsler/asym_norm.hpp"

#include <cstdint>
#include <random>

namespace cfinsler {

namespace detail {

inline constexpr double kInvPhi = 0.6180339887498949;

// Maximizes a unimodal periodic function of the polar angle: coarse sampling
// then golden section on the bracket around the best sample.
template <class Fn>
double maximize_angle(Fn&& phi, double tol = 1e-10, int coarse = 256) {
  int best = 0;
  double best_value = phi(0.0);
  const double h = kTwoPi / coarse;
  for (int i = 1; i < coarse; ++i) {
    const double v = phi(i * h);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = (best - 1) * h, b = (best + 1) * h;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = phi(c), fd = phi(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = phi(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// (F^2)*(alpha) = sup_y alpha(y) - F(y)^2. For planar norms the supremum is
/// taken first over the radius (closed form t^2/4 for t = alpha(unit point))
/// and then over the ray direction, using only eval. Quadratic norms in other
/// dimensions use the stationary point y = A^-1 alpha / 2 directly.
inline double fenchel_conjugate_sq(const AsymNorm& n, const Covector& alpha) {
  detail::require_dim(n, alpha.size());
  if (alpha.norm() == 0.0) return 0.0;
  if (n.dimension() != 2) {
    const auto* q = n.as<QuadraticNorm>();
    const double s2 = n.factor() * n.factor();
    const Vector y = 0.5 * s2 * q->solve(alpha.transpose());
    const double f = eval(n, y);
    return std::max(0.0, pair(alpha, y) - f * f);
  }
  auto phi = [&](double th) { return pair(alpha, boundary_point(n, th)); };
  const double th = detail::maximize_angle(phi);
  const double t = std::max(0.0, phi(th));
  return 0.25 * t * t;
}

/// dF*^2(alpha) for strictly convex norms.
/// Throws NotStrictlyConvex (polyhedral) and ZeroCovector.
inline Vector grad_dual_sq(const AsymNorm& n, const Covector& alpha) {
  detail::require_dim(n, alpha.size());
  if (!n.strictly_convex()) fail(ErrorCode::NotStrictlyConvex, "dF*^2 is not defined for polyhedral norms");
  if (alpha.norm() == 0.0) fail(ErrorCode::ZeroCovector, "dF*^2 at the zero covector");
  if (const auto* q = n.as<QuadraticNorm>()) {
    return 2.0 * n.factor() * n.factor() * q->solve(alpha.transpose());
  }
  const auto* c = n.as<ArcCompositeNorm>();
  const Point2 a = as_point(alpha);
  auto phi = [&](double th) { return pair(alpha, boundary_point(n, th)); };
  double th = detail::maximize_angle(phi, 1e-7);
  // the slope of alpha along the boundary changes sign exactly at the maximizer
  double lo = th - 1e-6, hi = th + 1e-6;
  if (c->tangent_slope(a, lo) > 0.0 && c->tangent_slope(a, hi) < 0.0) {
    while (hi - lo > 1e-14) {
      const double mid = 0.5 * (lo + hi);
      (c->tangent_slope(a, mid) > 0.0 ? lo : hi) = mid;
    }
    th = 0.5 * (lo + hi);
  }
  const Vector y = boundary_point(n, th);
  return 2.0 * pair(alpha, y) * y;
}

/// Absolute slack (relative to max(1, F^2)) granted to the margin for
/// floating-point rounding of the three F^2 terms.
inline constexpr double kConvexityRoundoff = 1e-14;

struct ConvexityReport {
  bool pass = true;
  double worst_margin = 0.0;
  int triples = 0;
  Vector y, z;
  Covector alpha;
};

/// Samples triples (y, z, alpha in dF^2(y)) and checks
///   F^2(z) >= F^2(y) + alpha(z - y) + c^2 |z - y|^2.
/// Sampling covers vertices/corners with their normal-cone generators and,
/// for polygons, pairs on a common face. Deterministic for a given seed.
inline ConvexityReport check_strong_convexity(const AsymNorm& n, double c, int triples, std::uint64_t seed = 7) {
  if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "strong convexity constant must be positive");
  if (n.dimension() != 2 && !n.as<QuadraticNorm>()) fail(ErrorCode::InvalidArgument, "unsupported dimension");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int dim = n.dimension();

  auto random_direction = [&]() {
    std::normal_distribution<double> g;
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = g(rng);
    return Vector(v / eval(n, v));
  };

  std::vector<Vector> special;
  if (const auto* p = n.as<PolyhedralNorm>()) {
    for (const auto& v : p->vertices()) special.push_back(n.factor() * as_vector(v));
  } else if (const auto* a = n.as<ArcCompositeNorm>()) {
    for (int k = 0; k < a->size(); ++k) {
      if (a->has_corner(k)) special.push_back(n.factor() * as_vector(a->arc_start(k)));
      // one-sided limits at the arc ends, where curvature effects peak
      const Arc& arc = a->arcs()[k];
      for (double th : {arc.from + 1e-9, arc.to - 1e-9}) special.push_back(boundary_point(n, th));
    }
  }

  ConvexityReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  auto test = [&](const Vector& y, const Vector& z, const Covector& alpha) {
    const double fy = eval(n, y), fz = eval(n, z);
    const Vector d = z - y;
    const double margin = fz * fz - fy * fy - pair(alpha, d) - c * c * d.squaredNorm();
    const double scale = std::max({1.0, fy * fy, fz * fz});
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.y = y;
      rep.z = z;
      rep.alpha = alpha;
    }
    if (margin < -kConvexityRoundoff * scale) rep.pass = false;
    ++rep.triples;
  };

  std::size_t special_cursor = 0;
  for (int i = 0; i < triples; ++i) {
    const int mode = i % 4;
    const auto* poly = n.as<PolyhedralNorm>();
    if (mode == 1 && poly) {
      const int k = static_cast<int>(rng() % static_cast<std::uint64_t>(poly->size()));
      const Point2 a = poly->vertices()[k], b = poly->vertices()[poly->next(k)];
      const Vector y = n.factor() * as_vector(a + unit(rng) * (b - a));
      const Vector z = n.factor() * as_vector(a + unit(rng) * (b - a));
      test(y, z, 2.0 * as_covector(poly->face_normals()[k]) / n.factor());
      continue;
    }
    Vector yu;
    std::vector<Covector> subs;
    double probe_angle = -1.0;
    if (mode == 0 && !special.empty()) {
      yu = special[special_cursor % special.size()];
      subs = unit_subgradients(n, yu);
      const std::size_t round = special_cursor / special.size();
      subs = {subs[round % subs.size()]};
      // golden-angle sequence: evenly spread probe directions per point
      probe_angle = std::fmod(static_cast<double>(round) * 2.399963229728653, kTwoPi);
      ++special_cursor;
    } else {
      yu = random_direction();
      subs = unit_subgradients(n, yu, 0);
      subs = {subs[rng() % subs.size()]};
    }
    const double r = 0.5 + 1.5 * unit(rng);
    const Vector y = r * yu;
    const Covector& g = subs.front();
    // far z probes the global shape; z along the level-set tangent at y
    // probes the curvature, which is where the constant is decided
    Vector z = (0.5 + 1.5 * unit(rng)) * random_direction();
    const double u = unit(rng);
    if (probe_angle >= 0.0 && dim == 2) {
      z = y + 1e-3 * r * vec({std::cos(probe_angle), std::sin(probe_angle)});
    } else if (u < 0.3) {
      z = y + (1e-3 + 0.2 * unit(rng)) * random_direction();
    } else if (u < 0.7) {
      Vector t = random_direction();
      t -= (pair(g, t) / g.squaredNorm()) * g.transpose();
      if (t.norm() > 0.0) z = y + std::pow(10.0, -4.0 + 3.0 * unit(rng)) * r * t / t.norm();
    }
    test(y, z, 2.0 * r * g);
  }
  return rep;
}

struct ConvexityConstant {
  double c = 0.0;  // 0 when no constant in [1e-6, 1] passes
  ConvexityReport report;
};

/// Largest c in [1e-6, 1] passing check_strong_convexity, by bisection.
inline ConvexityConstant strong_convexity_constant(const AsymNorm& n, int triples, std::uint64_t seed = 7) {
  const auto hi_rep = check_strong_convexity(n, 1.0, triples, seed);
  if (hi_rep.pass) return {1.0, hi_rep};
  auto lo_rep = check_strong_convexity(n, 1e-6, triples, seed);
  if (!lo_rep.pass) return {0.0, lo_rep};
  double lo = 1e-6, hi = 1.0;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto rep = check_strong_convexity(n, mid, triples, seed);
    if (rep.pass) {
      lo = mid;
      lo_rep = rep;
    } else {
      hi = mid;
    }
  }
  return {lo, lo_rep};
}

struct LipschitzReport {
  double max_quotient = 0.0;
  int pairs = 0;
  Covector a1, a2;
};

/// Max |dF*^2(a1) - dF*^2(a2)| / |a1 - a2| over random covector pairs on the
/// annulus 0.5 <= |a| <= 2, half of them close pairs.
inline LipschitzReport lipschitz_report_grad_dual(const AsymNorm& n, int pairs, std::uint64_t seed = 11) {
  if (!n.strictly_convex()) fail(ErrorCode::NotStrictlyConvex, "dF*^2 is not Lipschitz-defined for polyhedral norms");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> g;
  const int dim = n.dimension();
  auto sample = [&]() {
    Covector a(dim);
    for (int i = 0; i < dim; ++i) a(i) = g(rng);
    return Covector(a / a.norm() * (0.5 + 1.5 * unit(rng)));
  };
  LipschitzReport rep;
  for (int i = 0; i < pairs; ++i) {
    const Covector a1 = sample();
    Covector a2 = sample();
    if (i % 2 == 1) {
      Covector d(dim);
      for (int j = 0; j < dim; ++j) d(j) = g(rng);
      a2 = a1 + 1e-3 * d / d.norm();
    }
    const double den = (a1 - a2).norm();
    if (den == 0.0) continue;
    const double q = (grad_dual_sq(n, a1) - grad_dual_sq(n, a2)).norm() / den;
    if (q > rep.max_quotient) {
      rep.max_quotient = q;
      rep.a1 = a1;
      rep.a2 = a2;
    }
    ++rep.pairs;
  }
  return rep;
}

}  // namespace cfinsler
