#pragma once

// Quasi-hyperbolic planes F(x, y) = F_e(y) / x2: closed-form geodesics for
// polygonal F_e (in particular the regular hexagon), the two-point hexagon
// connection, the rounded norm S_e and the hyperbolic reference case.

#include "cfinsler/integrator.hpp"

namespace cfinsler {

/// Regular hexagon with vertices (0, +-1), (+-sqrt3/2, +-1/2), listed
/// counterclockwise starting at (sqrt3/2, -1/2).
inline AsymNorm hexagon_norm() {
  const double h = std::sqrt(3.0) / 2.0;
  return AsymNorm::polyhedral({{h, -0.5}, {h, 0.5}, {0.0, 1.0}, {-h, 0.5}, {-h, -0.5}, {0.0, -1.0}});
}

/// Four arcs of radius sqrt5 centred at (+-1, +-1), one per quadrant; arc k
/// covers polar angles [k pi/2, (k+1) pi/2]. Corners at (+-1, 0), (0, +-1).
inline AsymNorm se_norm() {
  const double r = std::sqrt(5.0);
  return AsymNorm::arc_composite({{{-1.0, -1.0}, r, 0.0, kPi / 2},
                                  {{1.0, -1.0}, r, kPi / 2, kPi},
                                  {{1.0, 1.0}, r, kPi, 1.5 * kPi},
                                  {{-1.0, 1.0}, r, 1.5 * kPi, kTwoPi}});
}

struct SeThresholds {
  double k1 = 0.0;  // (0,1) maximizes alpha iff alpha2 >= k1 alpha1 (alpha1 > 0)
  double k2 = 0.0;  // (1,0) maximizes alpha iff |alpha2| <= k2 alpha1
};

/// Ratios alpha2/alpha1 bounding the normal cones at the corners (0,1) and
/// (1,0) (alpha1 > 0), read off the circle normals meeting there.
inline SeThresholds se_thresholds() {
  const AsymNorm n = se_norm();
  const auto* c = n.as<ArcCompositeNorm>();
  SeThresholds out;
  for (int k = 0; k < c->size(); ++k) {
    if (!c->has_corner(k)) continue;
    const Point2 p = c->arc_start(k);
    const Point2 lo = c->end_normal(c->prev(k)), hi = c->start_normal(k);
    // largest slope among boundary rays with positive first component
    double slope = -std::numeric_limits<double>::infinity();
    for (const Point2& ray : {lo, hi}) {
      if (ray.x() > 0.0) slope = std::max(slope, ray.y() / ray.x());
    }
    if (std::abs(p.x()) < 1e-12 && p.y() > 0.0) out.k1 = slope;
    if (std::abs(p.y()) < 1e-12 && p.x() > 0.0) out.k2 = slope;
  }
  return out;
}

namespace detail {

// expm1(k t) / k, continuous at k = 0
inline double e1(double k, double t) { return k == 0.0 ? t : std::expm1(k * t) / k; }

}  // namespace detail

/// Exact flow of E on a quasi-hyperbolic plane under a fixed unit control u
/// (F_e(u) = 1): with tau = t - t_s and D = alpha(u) at the start,
///   x2 = x2_s e^{u2 tau},  x1 = x1_s + u1 x2_s E(u2, tau),
///   alpha1 const,          alpha2 = alpha2_s - D E(-u2, tau),
/// where E(k, tau) = (e^{k tau} - 1) / k.
struct FixedControlFlow {
  Point2 u;
  Vector xs;
  Covector as;

  double D() const { return as(0) * u.x() + as(1) * u.y(); }

  CotangentState at(double tau) const {
    const double x2 = xs(1) * std::exp(u.y() * tau);
    return {vec({xs(0) + u.x() * xs(1) * detail::e1(u.y(), tau), x2}),
            covec({as(0), as(1) - D() * detail::e1(-u.y(), tau)})};
  }

  PhaseVelocity velocity(const CotangentState& z) const {
    const double c0 = xs(1) * D();
    return {z.x(1) * as_vector(u), covec({0.0, -c0 / z.x(1)})};
  }

  /// Signed time until alpha2 reaches T, or nullopt if never.
  std::optional<double> time_to(double T) const {
    const double R = (as(1) - T) / D();
    const double k = -u.y();
    if (k == 0.0) return R;
    const double arg = k * R;
    if (arg <= -1.0) return std::nullopt;
    return std::log1p(arg) / k;
  }

  /// Signed time until alpha crosses the ray through n (needs n1 of the
  /// same sign as alpha1), or nullopt.
  std::optional<double> time_to_ray(const Point2& n) const {
    const double a = as(0);
    if (a == 0.0 || n.x() == 0.0 || (n.x() > 0.0) != (a > 0.0)) return std::nullopt;
    return time_to(a * n.y() / n.x());
  }
};

/// Closed-form E curve of a quasi-hyperbolic plane with polygonal F_e:
/// piecewise fixed-vertex flows with exact switching times. alpha1 is
/// conserved; alpha2 decreases, so alpha turns clockwise when alpha1 > 0.
class PolyhedralQHGeodesic {
 public:
  struct Piece {
    double t_begin;
    double t_end;
    int vertex;
    FixedControlFlow flow;  // flow.xs/as is the state at t_begin
  };

  PolyhedralQHGeodesic(const AsymNorm& base, const CotangentState& z0, double t0, double t_lo, double t_hi,
                       FaceStart face = FaceStart::Probe)
      : base_(base), t0_(t0) {
    poly_ = base.as<PolyhedralNorm>();
    if (!poly_) fail(ErrorCode::InvalidArgument, "closed-form solver needs a polygonal base norm");
    if (!(z0.x.size() == 2 && z0.x(1) > 0.0 && std::isfinite(z0.x(0)))) {
      fail(ErrorCode::OutOfDomain, "initial point must lie in the upper half-plane");
    }
    if (z0.alpha.norm() == 0.0) fail(ErrorCode::ZeroCovector, "initial covector is zero");
    if (!(t_lo <= t0 && t0 <= t_hi)) fail(ErrorCode::InvalidArgument, "t0 must lie in [t_lo, t_hi]");
    C0_ = z0.x(1) * dual_eval(base, z0.alpha);
    std::vector<Piece> back;
    if (t_lo < t0) back = sweep(z0, t_lo, -1.0, face);
    std::vector<Piece> fwd = sweep(z0, t_hi, 1.0, face);
    for (auto it = back.rbegin(); it != back.rend(); ++it) pieces_.push_back(*it);
    for (auto& p : fwd) {
      if (p.t_end > p.t_begin || pieces_.empty()) pieces_.push_back(p);
    }
  }

  double C0() const { return C0_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  double t_begin() const { return pieces_.front().t_begin; }
  double t_end() const { return pieces_.back().t_end; }

  Point2 vertex(int k) const { return base_.factor() * poly_->vertices()[k]; }

  std::vector<double> switch_times() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      if (pieces_[i].vertex != pieces_[i - 1].vertex) out.push_back(pieces_[i].t_begin);
    }
    return out;
  }

  CotangentState state_at(double t) const { return piece_at(t).flow.at(t - piece_at(t).t_begin); }

  const Piece& piece_at(double t) const {
    for (const auto& p : pieces_) {
      if (t <= p.t_end) return p;
    }
    return pieces_.back();
  }

  /// Samples every `step` on the grid t0 + k step plus every switch time.
  Trajectory sample(double step) const {
    if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "step must be positive");
    Trajectory out;
    out.kind = TrajectoryKind::Analytic;
    out.C0 = C0_;
    for (const auto& p : pieces_) {
      TrajectoryPiece tp{p.t_begin, p.t_end, {RegimeKind::Vertex, p.vertex}, {}};
      auto push = [&](double t) {
        const CotangentState z = p.flow.at(t - p.t_begin);
        tp.samples.push_back({t, z, p.flow.velocity(z), C0_});
      };
      push(p.t_begin);
      const double k0 = std::floor((p.t_begin - t0_) / step) + 1.0;
      for (double k = k0;; k += 1.0) {
        const double t = t0_ + k * step;
        if (t >= p.t_end - 1e-12 * std::max(1.0, std::abs(t))) break;
        if (t > p.t_begin) push(t);
      }
      if (p.t_end > p.t_begin) push(p.t_end);
      if (!out.pieces.empty()) {
        auto& prev = out.pieces.back();
        if (prev.control == tp.control) {
          // backward and forward halves of one regime around t0
          prev.samples.insert(prev.samples.end(), tp.samples.begin() + 1, tp.samples.end());
          prev.t_end = tp.t_end;
          continue;
        }
        out.events.push_back({p.t_begin, EventKind::Switch, prev.control, tp.control, tp.samples.front().z});
      }
      out.pieces.push_back(std::move(tp));
    }
    return out;
  }

 private:
  int start_vertex(const CotangentState& z, double dir, FaceStart face) const {
    const auto cands = regimes_at(base_, z.alpha);
    if (cands.size() == 1) return cands.front().index;
    // alpha on a face normal: the two face vertices are candidates
    int cw = cands[0].index, ccw = cands[1].index;
    if (cross2(vertex(cw), vertex(ccw)) < 0.0) std::swap(cw, ccw);
    if (face == FaceStart::Clockwise) return cw;
    if (face == FaceStart::CounterClockwise) return ccw;
    const double a = z.alpha(0);
    if (a == 0.0) fail(ErrorCode::NoProgress, "covector stays on a face normal; only bang-bang controls are supported");
    // alpha turns clockwise iff dir * alpha1 > 0
    return dir * a > 0.0 ? cw : ccw;
  }

  std::vector<Piece> sweep(const CotangentState& z0, double t_stop, double dir, FaceStart face) const {
    std::vector<Piece> out;
    int k = start_vertex(z0, dir, face);
    CotangentState z = z0;
    double t = t0_;
    for (int guard = 0; guard < 64; ++guard) {
      // every vertex of the unit ball is a unit control
      const FixedControlFlow flow{vertex(k), z.x, z.alpha};
      const bool clockwise = dir * z.alpha(0) > 0.0;
      const int exit_face = clockwise ? poly_->prev(k) : k;
      const int next = clockwise ? poly_->prev(k) : poly_->next(k);
      const auto tau = flow.time_to_ray(poly_->face_normals()[exit_face]);
      double t_end = t_stop;
      bool switches = false;
      if (tau && dir * *tau >= 0.0 && dir * (t + *tau - t_stop) < 0.0) {
        t_end = t + *tau;
        switches = true;
      }
      Piece p{std::min(t, t_end), std::max(t, t_end), k, flow};
      if (dir < 0.0) {
        p.flow.xs = flow.at(t_end - t).x;
        p.flow.as = flow.at(t_end - t).alpha;
      }
      out.push_back(p);
      if (!switches) break;
      z = flow.at(t_end - t);
      // land exactly on the switching ray
      const Point2 n = poly_->face_normals()[exit_face];
      z.alpha(1) = z.alpha(0) * n.y() / n.x();
      t = t_end;
      k = next;
    }
    return out;
  }

  AsymNorm base_;
  const PolyhedralNorm* poly_ = nullptr;
  double t0_ = 0.0;
  double C0_ = 0.0;
  std::vector<Piece> pieces_;
};

/// Closed-form hexagon geodesic through (x0, alpha0) at t = 0, sampled on [t_lo, t_hi].
inline Trajectory hexagon_geodesic(const Vector& x0, const Covector& alpha0, double t_lo, double t_hi,
                                   double step = 1e-2) {
  return PolyhedralQHGeodesic(hexagon_norm(), {x0, alpha0}, 0.0, t_lo, t_hi).sample(step);
}

struct HexagonConnection {
  Trajectory trajectory;
  CotangentState start;  // normalized so that C0 = 1
  double center = 0.0;   // abscissa of the hexagon centre on the x1-axis
  double scale = 0.0;    // side length (= circumradius) of the hexagon
  double length = 0.0;   // Finsler length = arrival time
  bool vertical = false;
};

/// Minimizing hexagon geodesic from p to q. Off a common vertical, the trace
/// lies on the hexagon (c, 0) + s S_{F_e}; c solves F_e(p - (c,0)) = F_e(q - (c,0)),
/// a piecewise-linear equation solved exactly between its breakpoints.
inline HexagonConnection connect_hexagon(const Vector& p, const Vector& q, double step = 1e-2) {
  if (p.size() != 2 || q.size() != 2) fail(ErrorCode::InvalidArgument, "planar points expected");
  if (!(p(1) > 0.0 && q(1) > 0.0)) fail(ErrorCode::OutOfDomain, "points must lie in the upper half-plane");
  if ((p - q).norm() == 0.0) fail(ErrorCode::IdenticalPoints, "endpoints coincide");
  const AsymNorm fe = hexagon_norm();
  const auto* poly = fe.as<PolyhedralNorm>();
  HexagonConnection out;
  if (p(0) == q(0)) {
    const double up = q(1) > p(1) ? 1.0 : -1.0;
    out.vertical = true;
    out.center = p(0);
    out.length = std::abs(std::log(q(1) / p(1)));
    out.start = {p, covec({0.0, up / p(1)})};
    out.trajectory = PolyhedralQHGeodesic(fe, out.start, 0.0, 0.0, out.length).sample(step);
    return out;
  }
  auto g = [&](double c) {
    return eval(fe, vec({p(0) - c, p(1)})) - eval(fe, vec({q(0) - c, q(1)}));
  };
  std::vector<double> bp;
  const auto& nn = poly->face_normals();
  for (std::size_t j = 0; j < nn.size(); ++j) {
    for (std::size_t k = j + 1; k < nn.size(); ++k) {
      const Point2 d = nn[j] - nn[k];
      if (std::abs(d.x()) < 1e-15) continue;
      for (const Vector* z : {&p, &q}) bp.push_back((*z)(0) + d.y() * (*z)(1) / d.x());
    }
  }
  std::sort(bp.begin(), bp.end());
  const double span = std::abs(p(0) - q(0)) + p(1) + q(1) + 1.0;
  bp.insert(bp.begin(), bp.front() - span);
  bp.push_back(bp.back() + span);
  double c = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double g0 = g(bp[i]), g1 = g(bp[i + 1]);
    if (g0 == 0.0) {
      c = bp[i];
      break;
    }
    if ((g0 < 0.0) != (g1 < 0.0) || g1 == 0.0) {
      c = bp[i] + (bp[i + 1] - bp[i]) * g0 / (g0 - g1);
      break;
    }
  }
  if (!std::isfinite(c)) fail(ErrorCode::Unreachable, "no hexagon through both points");
  const double s = eval(fe, vec({p(0) - c, p(1)}));
  const bool clockwise = p(0) < q(0);
  const double a = (clockwise ? 1.0 : -1.0) * 2.0 / (std::sqrt(3.0) * s);

  // travel direction at a boundary point z of the unit hexagon
  auto direction_at = [&](const Point2& z) {
    int face = 0;
    double best = -1.0;
    for (int k = 0; k < poly->size(); ++k) {
      const double v = nn[k].dot(z);
      if (v > best) {
        best = v;
        face = k;
      }
    }
    const auto& v = poly->vertices();
    for (int k = 0; k < poly->size(); ++k) {
      if ((v[k] - z).norm() < 1e-12) {
        return clockwise ? Point2(v[poly->prev(k)] - v[k]) : Point2(v[poly->next(k)] - v[k]);
      }
    }
    return clockwise ? Point2(v[face] - v[poly->next(face)]) : Point2(v[poly->next(face)] - v[face]);
  };
  const Point2 zp = (as_point(p) - Point2(c, 0.0)) / s;
  const Point2 zq = (as_point(q) - Point2(c, 0.0)) / s;
  const Point2 u = direction_at(zp);
  const Point2 uq = direction_at(zq);
  const double alpha2 = (1.0 / p(1) - a * u.x()) / u.y();
  out.start = {p, covec({a, alpha2})};
  out.center = c;
  out.scale = s;

  // generous horizon, then locate the arrival inside the piece moving along uq
  const double horizon = 8.0 * (std::abs(std::log(q(1) / p(1))) + 2.0 * (s + std::abs(p(0) - q(0))) / std::min(p(1), q(1)) + 1.0);
  const PolyhedralQHGeodesic geo(fe, out.start, 0.0, 0.0, horizon, FaceStart::Probe);
  double t_q = std::numeric_limits<double>::quiet_NaN();
  for (const auto& piece : geo.pieces()) {
    if ((piece.flow.u - uq).norm() > 1e-9) continue;
    const double tau = std::log(q(1) / piece.flow.xs(1)) / piece.flow.u.y();
    if (tau >= -1e-12 && piece.t_begin + tau <= piece.t_end + 1e-9) {
      t_q = piece.t_begin + std::max(0.0, tau);
      break;
    }
  }
  if (!std::isfinite(t_q)) fail(ErrorCode::Unreachable, "hexagon geodesic does not reach the target");
  out.length = t_q;
  out.trajectory = PolyhedralQHGeodesic(fe, out.start, 0.0, 0.0, t_q).sample(step);
  return out;
}

/// S_e geodesic over [t0, t1] (either order): corner regimes in closed form,
/// arc regimes by integrate_E, stitched at the exact regime changes.
inline Trajectory se_geodesic(const Vector& x0, const Covector& alpha0, double t0, double t1,
                              const IntegrationOptions& opts = {}) {
  const AsymNorm n = se_norm();
  const auto* c = n.as<ArcCompositeNorm>();
  const FinslerField f = FinslerField::quasi_hyperbolic(n);
  f.require_inside(x0);
  if (alpha0.norm() == 0.0) fail(ErrorCode::ZeroCovector, "initial covector is zero");
  const double dir = t1 >= t0 ? 1.0 : -1.0;

  Trajectory out;
  out.kind = TrajectoryKind::Extended;
  out.C0 = dual_eval(f.norm_at(x0), alpha0);
  CotangentState z{x0, alpha0};
  double t = t0;

  // initial regime, ties resolved by a short probe along each candidate
  IntegrationOptions probe = opts;
  Regime r;
  {
    const auto cands = regimes_at(n, alpha0);
    r = cands.front();
    if (cands.size() > 1) {
      detail::Engine eng(f, probe, false);
      if (auto pick = eng.consistent(z, cands, dir * 1e-2 * opts.step)) r = *pick;
    }
  }

  auto append = [&](TrajectoryPiece piece, std::vector<TrajectoryEvent> evts) {
    if (!out.pieces.empty() && !(out.pieces.back().control == piece.control)) {
      out.events.push_back({piece.t_begin, EventKind::Switch, out.pieces.back().control, piece.control,
                            piece.samples.front().z});
    }
    out.pieces.push_back(std::move(piece));
    for (auto& e : evts) out.events.push_back(e);
  };

  for (int guard = 0; guard < 64 && dir * (t1 - t) > 1e-12; ++guard) {
    if (r.kind == RegimeKind::Corner) {
      FixedControlFlow flow{c->arc_start(r.index), z.x, z.alpha};
      const bool clockwise = dir * z.alpha(0) > 0.0;
      const Point2 ray = clockwise ? c->end_normal(c->prev(r.index)) : c->start_normal(r.index);
      const Regime next{RegimeKind::Arc, clockwise ? c->prev(r.index) : r.index};
      const auto tau = flow.time_to_ray(ray);
      double t_end = t1;
      bool switches = false;
      if (tau && dir * *tau >= 0.0 && dir * (t + *tau - t1) < 0.0) {
        t_end = t + *tau;
        switches = true;
      }
      TrajectoryPiece piece{t, t_end, r, {}};
      auto push = [&](double tt) {
        const CotangentState zz = flow.at(tt - t);
        piece.samples.push_back({tt, zz, flow.velocity(zz), out.C0});
      };
      const int m = std::max(1, static_cast<int>(std::ceil(std::abs(t_end - t) / opts.step)));
      for (int i = 0; i <= m; ++i) push(t + (t_end - t) * i / m);
      z = flow.at(t_end - t);
      if (switches) z.alpha(1) = z.alpha(0) * ray.y() / ray.x();
      t = t_end;
      append(std::move(piece), {});
      if (!switches) break;
      r = next;
    } else {
      IntegrationOptions o = opts;
      o.initial_regime = r;
      o.stop_at_first_switch = true;
      Trajectory seg = integrate_E(f, z, t, t1, o);
      if (dir < 0.0) detail::Engine::reverse(seg);  // back to integration order
      out.max_drift = std::max(out.max_drift, seg.max_drift);
      z = seg.pieces.back().samples.back().z;
      t = seg.pieces.back().samples.back().t;
      for (auto& piece : seg.pieces) append(std::move(piece), {});
      const bool switched = !seg.events.empty() && seg.events.back().kind == EventKind::Switch;
      if (!seg.events.empty() && seg.events.back().kind != EventKind::Switch) out.events.push_back(seg.events.back());
      if (!switched) break;
      r = seg.events.back().to;
    }
  }
  if (dir < 0.0) detail::Engine::reverse(out);
  return out;
}

/// S_e geodesic through (x0, alpha0) at t = 0 covering [t_lo, t_hi].
inline Trajectory se_geodesic_through(const Vector& x0, const Covector& alpha0, double t_lo, double t_hi,
                                      const IntegrationOptions& opts = {}) {
  if (!(t_lo <= 0.0 && 0.0 <= t_hi)) fail(ErrorCode::InvalidArgument, "span must contain t = 0");
  Trajectory back, fwd;
  if (t_lo < 0.0) back = se_geodesic(x0, alpha0, 0.0, t_lo, opts);
  if (t_hi > 0.0 || t_lo == 0.0) fwd = se_geodesic(x0, alpha0, 0.0, t_hi, opts);
  return detail::merge_two_sided(std::move(back), fwd);
}

struct HyperbolicCircle {
  double center = 0.0;  // predicted from the initial tangent
  double radius = 0.0;
  double fit_center = 0.0;  // least-squares fit to the integrated trace
  double fit_radius = 0.0;
  double residual = 0.0;  // max | |x - (c,0)| - r | over the trace
};

/// Euclidean circle, centred on the x1-axis, carrying the E curve of the
/// hyperbolic plane (quasi-hyperbolic with Euclidean F_e) through (x0, alpha0).
/// Throws VerticalGeodesic when alpha1 = 0.
inline HyperbolicCircle hyperbolic_reference(const Vector& x0, const Covector& alpha0, double t_len = 5.0,
                                             const IntegrationOptions& opts = {}) {
  if (alpha0.size() != 2 || x0.size() != 2) fail(ErrorCode::InvalidArgument, "planar state expected");
  if (!(x0(1) > 0.0)) fail(ErrorCode::OutOfDomain, "point must lie in the upper half-plane");
  if (alpha0.norm() == 0.0) fail(ErrorCode::ZeroCovector, "initial covector is zero");
  if (alpha0(0) == 0.0) fail(ErrorCode::VerticalGeodesic, "trace is a vertical line");
  HyperbolicCircle out;
  // tangent is parallel to alpha for a Euclidean base; the centre lies on
  // the x1-axis along the normal through x0
  const Point2 v = as_point(alpha0).normalized();
  out.center = x0(0) + x0(1) * v.y() / v.x();
  out.radius = (as_point(x0) - Point2(out.center, 0.0)).norm();

  const FinslerField f = FinslerField::quasi_hyperbolic(AsymNorm::euclidean());
  const Trajectory tr = integrate_E(f, {x0, alpha0}, 0.0, t_len, opts);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(tr.sample_count()), 2);
  Eigen::VectorXd b(A.rows());
  std::vector<Point2> pts;
  for (const auto& p : tr.pieces) {
    for (const auto& s : p.samples) {
      const auto i = static_cast<Eigen::Index>(pts.size());
      pts.push_back(as_point(s.z.x));
      A(i, 0) = 2.0 * s.z.x(0);
      A(i, 1) = 1.0;
      b(i) = s.z.x.squaredNorm();
    }
  }
  const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(b);
  out.fit_center = sol(0);
  out.fit_radius = std::sqrt(std::max(0.0, sol(1) + sol(0) * sol(0)));
  for (const auto& p : pts) {
    out.residual = std::max(out.residual, std::abs((p - Point2(out.fit_center, 0.0)).norm() - out.fit_radius));
  }
  return out;
}

/// Classical hyperbolic distance in the upper half-plane.
inline double hyperbolic_distance(const Vector& p, const Vector& q) {
  return std::acosh(1.0 + (p - q).squaredNorm() / (2.0 * p(1) * q(1)));
}

}  // namespace cfinsler
