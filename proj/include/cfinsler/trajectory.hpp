#pragma once

// Piecewise phase curves: one piece per constant control regime, samples
// carry their phase velocity so the curve can be evaluated between samples.

#include "cfinsler/geodesic_field.hpp"

#include <algorithm>

namespace cfinsler {

struct PhasePoint {
  double t = 0.0;
  CotangentState z;
  PhaseVelocity v;
  double H = 0.0;
};

struct TrajectoryPiece {
  double t_begin = 0.0;
  double t_end = 0.0;
  Regime control;
  std::vector<PhasePoint> samples;
};

enum class EventKind { Switch, DomainExit, Stop };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Switch: return "switch";
    case EventKind::DomainExit: return "domain_exit";
    case EventKind::Stop: return "stop";
  }
  return "?";
}

struct TrajectoryEvent {
  double t = 0.0;
  EventKind kind = EventKind::Switch;
  Regime from;
  Regime to;
  CotangentState state;
};

/// Extended: integral curve of E. SprayProduct: integral curve of F*.E.
/// Analytic: exact closed-form samples of an E curve.
enum class TrajectoryKind { Extended, SprayProduct, Analytic };

struct Trajectory {
  std::vector<TrajectoryPiece> pieces;
  std::vector<TrajectoryEvent> events;
  double C0 = 0.0;
  double max_drift = 0.0;
  TrajectoryKind kind = TrajectoryKind::Extended;

  bool empty() const { return pieces.empty(); }
  double t_begin() const { return pieces.front().t_begin; }
  double t_end() const { return pieces.back().t_end; }
  const PhasePoint& front() const { return pieces.front().samples.front(); }
  const PhasePoint& back() const { return pieces.back().samples.back(); }

  std::vector<double> switch_times() const {
    std::vector<double> out;
    for (const auto& e : events) {
      if (e.kind == EventKind::Switch) out.push_back(e.t);
    }
    return out;
  }

  std::size_t sample_count() const {
    std::size_t n = 0;
    for (const auto& p : pieces) n += p.samples.size();
    return n;
  }

  /// Cubic Hermite interpolation of (x, alpha) inside the piece covering t.
  /// Throws InvalidArgument outside [t_begin, t_end].
  CotangentState state_at(double t) const {
    if (empty()) fail(ErrorCode::InvalidArgument, "empty trajectory");
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    if (t < t_begin() - slack || t > t_end() + slack) fail(ErrorCode::InvalidArgument, "time outside the trajectory");
    const TrajectoryPiece* piece = &pieces.back();
    for (const auto& p : pieces) {
      if (t <= p.t_end) {
        piece = &p;
        break;
      }
    }
    const auto& s = piece->samples;
    if (s.size() == 1) return s.front().z;
    auto it = std::upper_bound(s.begin(), s.end(), t, [](double v, const PhasePoint& p) { return v < p.t; });
    std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - s.begin(), 1, s.size() - 1));
    const PhasePoint& a = s[i - 1];
    const PhasePoint& b = s[i];
    const double h = b.t - a.t;
    if (h <= 0.0) return b.z;
    const double u = std::clamp((t - a.t) / h, 0.0, 1.0);
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    CotangentState out;
    out.x = h00 * a.z.x + h10 * h * a.v.dx + h01 * b.z.x + h11 * h * b.v.dx;
    out.alpha = h00 * a.z.alpha + h10 * h * a.v.da + h01 * b.z.alpha + h11 * h * b.v.da;
    return out;
  }
};

/// Length integral of F(x, x') over the trajectory by composite Simpson on
/// the recorded samples (nonuniform spacing), using the stored velocities.
inline double path_length(const FinslerField& f, const Trajectory& traj) {
  double total = 0.0;
  for (const auto& piece : traj.pieces) {
    const auto& s = piece.samples;
    if (s.size() < 2) continue;
    std::vector<double> g(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) g[i] = field_eval(f, s[i].z.x, s[i].v.dx);
    std::size_t i = 0;
    for (; i + 2 < s.size(); i += 2) {
      const double h0 = s[i + 1].t - s[i].t, h1 = s[i + 2].t - s[i + 1].t;
      if (h0 <= 0.0 || h1 <= 0.0) {
        total += 0.5 * (h0 * (g[i] + g[i + 1]) + h1 * (g[i + 1] + g[i + 2]));
        continue;
      }
      total += (h0 + h1) / 6.0 *
               ((2.0 - h1 / h0) * g[i] + (h0 + h1) * (h0 + h1) / (h0 * h1) * g[i + 1] + (2.0 - h0 / h1) * g[i + 2]);
    }
    if (i + 1 < s.size()) total += 0.5 * (s[i + 1].t - s[i].t) * (g[i] + g[i + 1]);
  }
  return total;
}

/// Length of a polyline in the field, each segment by Simpson's rule.
inline double polyline_length(const FinslerField& f, const std::vector<Vector>& pts) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vector d = pts[i + 1] - pts[i];
    const Vector m = 0.5 * (pts[i] + pts[i + 1]);
    total += (field_eval(f, pts[i], d) + 4.0 * field_eval(f, m, d) + field_eval(f, pts[i + 1], d)) / 6.0;
  }
  return total;
}

}  // namespace cfinsler
