#pragma once

// Event-driven fixed-step RK4 for E (and F*.E) with bang-bang control
// switching. Within a piece the control regime is frozen, which makes the
// right-hand side smooth; a switch fires when alpha leaves the regime's
// normal cone and is located by bisection on the step length.

#include "cfinsler/trajectory.hpp"

#include <optional>

namespace cfinsler {

/// Selection rule when alpha starts exactly on a polygon face normal.
/// Probe: take the extreme vertex whose control keeps alpha in its cone a
/// short time later; Clockwise / CounterClockwise: take that extreme point.
enum class FaceStart { Probe, Clockwise, CounterClockwise };

struct IntegrationOptions {
  double step = 1e-3;
  double event_tolerance = 1e-10;  // bisection width in t
  double switch_slack = 1e-13;     // cone margin below which a switch fires
  double drift_tolerance = 1e-6;
  bool allow_face_sliding = false;
  FaceStart face_start = FaceStart::Probe;
  std::optional<Regime> initial_regime;
  bool stop_at_first_switch = false;
  /// Integration stops where this function changes sign.
  std::function<double(const CotangentState&)> stop_event;
};

namespace detail {

class Engine {
 public:
  Engine(const FinslerField& f, const IntegrationOptions& o, bool spray) : f_(f), o_(o), spray_(spray) {}

  PhaseVelocity velocity(const CotangentState& z, const Regime& r) const {
    const AsymNorm n = f_.norm_at(z.x);
    const Vector y = regime_point(n, r, z.alpha);
    PhaseVelocity v = velocity_for_control(f_, z, y);
    if (spray_) {
      const double h = pair(z.alpha, y);
      v.dx *= h;
      v.da *= h;
    }
    return v;
  }

  double hamiltonian_of(const CotangentState& z, const Regime& r) const {
    return pair(z.alpha, regime_point(f_.norm_at(z.x), r, z.alpha));
  }

  double margin(const CotangentState& z, const Regime& r) const { return regime_margin(f_.norm_at(z.x), r, z.alpha); }

  static CotangentState advance(const CotangentState& z, const PhaseVelocity& v, double h) {
    return {z.x + h * v.dx, z.alpha + h * v.da};
  }

  /// One RK4 step; nullopt if any stage leaves the domain.
  std::optional<CotangentState> rk4(const CotangentState& z, const Regime& r, double h) const {
    try {
      const PhaseVelocity k1 = velocity(z, r);
      const PhaseVelocity k2 = velocity(advance(z, k1, 0.5 * h), r);
      const PhaseVelocity k3 = velocity(advance(z, k2, 0.5 * h), r);
      const PhaseVelocity k4 = velocity(advance(z, k3, h), r);
      CotangentState out;
      out.x = z.x + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
      out.alpha = z.alpha + h / 6.0 * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da);
      if (!f_.domain().contains(out.x) || !out.alpha.allFinite()) return std::nullopt;
      return out;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::OutOfDomain) return std::nullopt;
      throw;
    }
  }

  /// Regime for which a short probe along its own flow stays in its cone.
  std::optional<Regime> consistent(const CotangentState& z, const std::vector<Regime>& cands, double probe) const {
    std::optional<Regime> best;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (const auto& c : cands) {
      const auto zp = rk4(z, c, probe);
      if (!zp) continue;
      const double m = margin(*zp, c);
      if (m >= -o_.switch_slack && m > best_margin) {
        best_margin = m;
        best = c;
      }
    }
    return best;
  }

  Regime by_orientation(const CotangentState& z, const std::vector<Regime>& cands, bool clockwise) const {
    const AsymNorm n = f_.norm_at(z.x);
    Regime pick = cands.front();
    for (std::size_t i = 1; i < cands.size(); ++i) {
      const Point2 a = as_point(regime_point(n, pick, z.alpha));
      const Point2 b = as_point(regime_point(n, cands[i], z.alpha));
      // b is counterclockwise of a when cross(a, b) > 0
      const bool b_ccw = cross2(a, b) > 0.0;
      if (b_ccw != clockwise) pick = cands[i];
    }
    return pick;
  }

  Regime initial_regime(const CotangentState& z, double dir) const {
    if (o_.initial_regime) return *o_.initial_regime;
    const auto cands = regimes_at(f_.norm_at(z.x), z.alpha);
    if (cands.size() == 1) return cands.front();
    if (cands.empty()) fail(ErrorCode::NoProgress, "no control regime contains the initial covector");
    switch (o_.face_start) {
      case FaceStart::Clockwise: return by_orientation(z, cands, true);
      case FaceStart::CounterClockwise: return by_orientation(z, cands, false);
      case FaceStart::Probe: break;
    }
    if (auto r = consistent(z, cands, dir * 1e-2 * o_.step)) return *r;
    return by_orientation(z, cands, true);
  }

  Regime next_regime(const CotangentState& z, const Regime& from, double dir) const {
    auto cands = regimes_at(f_.norm_at(z.x), z.alpha, 1e-7);
    std::erase(cands, from);
    if (cands.empty()) fail(ErrorCode::NoProgress, "no neighbouring control regime at a switch");
    if (auto r = consistent(z, cands, dir * 1e-2 * o_.step)) return *r;
    if (!o_.allow_face_sliding) {
      fail(ErrorCode::NoProgress, "covector would slide along a face; only bang-bang controls are supported");
    }
    return by_orientation(z, cands, o_.face_start != FaceStart::CounterClockwise);
  }

  Trajectory run(const CotangentState& z0, double t0, double t1) const {
    if (!(o_.step > 0.0) || !std::isfinite(o_.step)) fail(ErrorCode::InvalidArgument, "step must be positive");
    if (z0.x.size() != f_.dimension() || z0.alpha.size() != f_.dimension()) {
      fail(ErrorCode::InvalidArgument, "state dimension mismatch");
    }
    f_.require_inside(z0.x);
    if (z0.alpha.norm() == 0.0) fail(ErrorCode::ZeroCovector, "initial covector is zero");
    if (spray_ && !f_.strictly_convex()) fail(ErrorCode::NotStrictlyConvex, "F*.E needs strictly convex unit balls");

    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double h = dir * o_.step;
    Trajectory traj;
    traj.kind = spray_ ? TrajectoryKind::SprayProduct : TrajectoryKind::Extended;
    traj.C0 = dual_eval(f_.norm_at(z0.x), z0.alpha);

    Regime r = initial_regime(z0, dir);
    CotangentState z = z0;
    double t = t0;
    auto sample = [&](double tt, const CotangentState& zz, const Regime& rr) {
      PhasePoint p{tt, zz, velocity(zz, rr), hamiltonian_of(zz, rr)};
      if (spray_) p.H = dual_eval(f_.norm_at(zz.x), zz.alpha);
      traj.max_drift = std::max(traj.max_drift, std::abs(p.H - traj.C0) / traj.C0);
      return p;
    };
    auto open_piece = [&](double tt, const CotangentState& zz, const Regime& rr) {
      traj.pieces.push_back({tt, tt, rr, {sample(tt, zz, rr)}});
    };
    auto close_sample = [&](double tt, const CotangentState& zz) {
      traj.pieces.back().samples.push_back(sample(tt, zz, traj.pieces.back().control));
      traj.pieces.back().t_end = tt;
    };
    open_piece(t, z, r);

    auto stop_value = [&](const CotangentState& zz) { return o_.stop_event ? o_.stop_event(zz) : 0.0; };
    std::int64_t k = 0;
    const double span = std::abs(t1 - t0);
    const double tiny = 1e-12 * std::max(1.0, std::abs(t1) + std::abs(t0));
    while (dir * (t1 - t) > tiny) {
      double t_next = t0 + static_cast<double>(k + 1) * h;
      if (std::abs(t_next - t0) >= span - tiny) t_next = t1;
      if (dir * (t_next - t) <= tiny) {
        ++k;
        continue;
      }
      const double hs = t_next - t;
      const double s_now = stop_value(z);
      auto bad = [&](const std::optional<CotangentState>& zn) -> int {
        if (!zn) return 1;
        if (o_.stop_event) {
          const double s1 = stop_value(*zn);
          if ((s_now < 0.0 && s1 >= 0.0) || (s_now > 0.0 && s1 <= 0.0)) return 2;
        }
        if (margin(*zn, r) < -o_.switch_slack) return 3;
        return 0;
      };
      const auto zn = rk4(z, r, hs);
      const int kind = bad(zn);
      if (kind == 0) {
        z = *zn;
        t = t_next;
        close_sample(t, z);
        ++k;
        continue;
      }
      // earliest event inside the step
      double lo = 0.0, hi = hs;
      int hi_kind = kind;
      while (std::abs(hi - lo) > o_.event_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const int km = bad(rk4(z, r, mid));
        if (km == 0) {
          lo = mid;
        } else {
          hi = mid;
          hi_kind = km;
        }
      }
      if (hi_kind == 1) {
        if (lo != 0.0) {
          z = *rk4(z, r, lo);
          t += lo;
          close_sample(t, z);
        }
        traj.events.push_back({t, EventKind::DomainExit, r, r, z});
        break;
      }
      const double s_evt = 0.5 * (lo + hi);
      auto ze = rk4(z, r, s_evt);
      if (!ze) ze = rk4(z, r, lo);
      z = *ze;
      t += s_evt;
      close_sample(t, z);
      if (hi_kind == 2) {
        traj.events.push_back({t, EventKind::Stop, r, r, z});
        break;
      }
      const Regime nr = next_regime(z, r, dir);
      traj.events.push_back({t, EventKind::Switch, r, nr, z});
      if (o_.stop_at_first_switch) break;
      r = nr;
      open_piece(t, z, r);
    }
    if (dir < 0.0) reverse(traj);
    return traj;
  }

  static void reverse(Trajectory& traj) {
    std::reverse(traj.pieces.begin(), traj.pieces.end());
    for (auto& p : traj.pieces) {
      std::reverse(p.samples.begin(), p.samples.end());
      std::swap(p.t_begin, p.t_end);
    }
    std::reverse(traj.events.begin(), traj.events.end());
    for (auto& e : traj.events) {
      if (e.kind == EventKind::Switch) std::swap(e.from, e.to);
    }
  }

 private:
  const FinslerField& f_;
  const IntegrationOptions& o_;
  bool spray_;
};

inline Trajectory merge_two_sided(Trajectory back, const Trajectory& fwd) {
  if (back.empty()) return fwd;
  if (fwd.empty()) return back;
  const bool same = back.pieces.back().control == fwd.pieces.front().control;
  std::vector<TrajectoryPiece> pieces = std::move(back.pieces);
  auto it = fwd.pieces.begin();
  if (same) {
    auto& last = pieces.back();
    last.samples.insert(last.samples.end(), it->samples.begin() + 1, it->samples.end());
    last.t_end = it->t_end;
    ++it;
  }
  const double t_mid = fwd.t_begin();
  std::vector<TrajectoryEvent> events = std::move(back.events);
  if (!same) {
    events.push_back({t_mid, EventKind::Switch, pieces.back().control, fwd.pieces.front().control,
                      fwd.front().z});
  }
  pieces.insert(pieces.end(), it, fwd.pieces.end());
  events.insert(events.end(), fwd.events.begin(), fwd.events.end());
  Trajectory out;
  out.pieces = std::move(pieces);
  out.events = std::move(events);
  out.C0 = fwd.C0;
  out.max_drift = std::max(back.max_drift, fwd.max_drift);
  out.kind = fwd.kind;
  return out;
}

}  // namespace detail

/// Integral curve of E from state0 over [t0, t1] (t1 < t0 integrates
/// backward; the result is always ordered by increasing time). A domain exit
/// truncates the curve and is recorded as an event.
inline Trajectory integrate_E(const FinslerField& f, const CotangentState& state0, double t0, double t1,
                              const IntegrationOptions& opts = {}) {
  return detail::Engine(f, opts, false).run(state0, t0, t1);
}

/// Integral curve through state0 at t0 covering [t_lo, t_hi] with t_lo <= t0 <= t_hi.
inline Trajectory integrate_E_through(const FinslerField& f, const CotangentState& state0, double t0, double t_lo,
                                      double t_hi, const IntegrationOptions& opts = {}) {
  if (!(t_lo <= t0 && t0 <= t_hi)) fail(ErrorCode::InvalidArgument, "t0 must lie in [t_lo, t_hi]");
  Trajectory back, fwd;
  if (t_lo < t0) back = integrate_E(f, state0, t0, t_lo, opts);
  if (t_hi > t0 || t_lo == t0) fwd = integrate_E(f, state0, t0, t_hi, opts);
  return detail::merge_two_sided(std::move(back), fwd);
}

/// Integral curve of F*.E; its projection has constant speed C0.
inline Trajectory integrate_spray_product(const FinslerField& f, const CotangentState& state0, double t0, double t1,
                                          const IntegrationOptions& opts = {}) {
  return detail::Engine(f, opts, true).run(state0, t0, t1);
}

/// Converts an F*.E curve to the E curve with the same trace. Since F* is
/// constant (= C0) along it, z_G(t) = z_E(t0 + C0 (t - t0)), so time is
/// stretched by C0 and velocities divided by C0.
/// Throws NonConstantHamiltonian when F* drifts beyond the tolerance.
inline Trajectory reparameterize_to_unit(const Trajectory& traj, double drift_tolerance = 1e-6) {
  if (traj.kind != TrajectoryKind::SprayProduct) fail(ErrorCode::InvalidArgument, "expected an F*.E trajectory");
  if (traj.empty()) return traj;
  double drift = 0.0;
  for (const auto& p : traj.pieces) {
    for (const auto& s : p.samples) drift = std::max(drift, std::abs(s.H - traj.C0) / traj.C0);
  }
  if (drift > drift_tolerance) fail(ErrorCode::NonConstantHamiltonian, "F* is not constant along the curve");
  const double c = traj.C0;
  const double t0 = traj.t_begin();
  auto map = [&](double t) { return t0 + c * (t - t0); };
  Trajectory out = traj;
  out.kind = TrajectoryKind::Extended;
  for (auto& p : out.pieces) {
    p.t_begin = map(p.t_begin);
    p.t_end = map(p.t_end);
    for (auto& s : p.samples) {
      s.t = map(s.t);
      s.v.dx /= c;
      s.v.da /= c;
    }
  }
  for (auto& e : out.events) e.t = map(e.t);
  return out;
}

/// Rescales alpha so that F*(x, alpha) = 1.
inline CotangentState normalize_covector(const FinslerField& f, const CotangentState& z) {
  const double s = dual_eval(f.norm_at(z.x), z.alpha);
  if (s == 0.0) fail(ErrorCode::ZeroCovector, "cannot normalize the zero covector");
  return {z.x, z.alpha / s};
}

}  // namespace cfinsler
