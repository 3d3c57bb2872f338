#pragma once

// CSV and SVG export of trajectories. Numbers are printed with %.17g so
// identical inputs give byte-identical files.

#include "cfinsler/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace cfinsler {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Columns t, x1..xn, a1..an, control, H; one row per stored sample.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.empty()) return;
  const auto n = traj.front().z.x.size();
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x" << i;
  for (Eigen::Index i = 1; i <= n; ++i) os << ",a" << i;
  os << ",control,H\n";
  for (const auto& piece : traj.pieces) {
    const std::string id = regime_id(piece.control);
    for (const auto& s : piece.samples) {
      os << format_double(s.t);
      for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(s.z.x(i));
      for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(s.z.alpha(i));
      os << ',' << id << ',' << format_double(s.H) << '\n';
    }
  }
}

/// Side list of events: t, kind, from, to, then the event state.
inline void write_events_csv(std::ostream& os, const Trajectory& traj) {
  const Eigen::Index n = traj.empty() ? 0 : traj.front().z.x.size();
  os << "t,kind,from,to";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x" << i;
  for (Eigen::Index i = 1; i <= n; ++i) os << ",a" << i;
  os << '\n';
  for (const auto& e : traj.events) {
    os << format_double(e.t) << ',' << to_string(e.kind) << ',' << regime_id(e.from) << ',' << regime_id(e.to);
    for (Eigen::Index i = 0; i < e.state.x.size(); ++i) os << ',' << format_double(e.state.x(i));
    for (Eigen::Index i = 0; i < e.state.alpha.size(); ++i) os << ',' << format_double(e.state.alpha(i));
    os << '\n';
  }
}

/// Events path derived from a CSV path: "run.csv" -> "run.events.csv".
inline std::string events_path_for(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  const auto slash = csv_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return csv_path + ".events.csv";
  return csv_path.substr(0, dot) + ".events" + csv_path.substr(dot);
}

struct SvgSeries {
  std::vector<Point2> points;
  std::vector<Point2> markers;
  std::string color = "#1f4e9c";
  std::string label;
};

/// x-projection (first two coordinates) of a trajectory, switches as markers.
inline SvgSeries svg_series(const Trajectory& traj, const std::string& color = "#1f4e9c",
                            const std::string& label = "") {
  SvgSeries s;
  s.color = color;
  s.label = label;
  for (const auto& piece : traj.pieces) {
    for (const auto& p : piece.samples) {
      if (p.z.x.size() >= 2) {
        s.points.emplace_back(p.z.x(0), p.z.x(1));
      } else {
        s.points.emplace_back(p.t, p.z.x(0));
      }
    }
  }
  for (const auto& e : traj.events) {
    if (e.kind != EventKind::Switch) continue;
    if (e.state.x.size() >= 2) {
      s.markers.emplace_back(e.state.x(0), e.state.x(1));
    } else {
      s.markers.emplace_back(e.t, e.state.x(0));
    }
  }
  return s;
}

/// Plain SVG 1.1: one polyline per series, circles at markers, equal axis scale.
inline void write_svg(std::ostream& os, const std::vector<SvgSeries>& series, const std::string& title = "",
                      double width = 640.0) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (const auto* v : {&s.points, &s.markers}) {
      for (const auto& p : *v) {
        x0 = std::min(x0, p.x());
        x1 = std::max(x1, p.x());
        y0 = std::min(y0, p.y());
        y1 = std::max(y1, p.y());
      }
    }
  }
  if (!std::isfinite(x0)) x0 = y0 = 0.0, x1 = y1 = 1.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double pad = 0.05 * span;
  x0 -= pad;
  y0 -= pad;
  x1 += pad;
  y1 += pad;
  const double scale = width / std::max(x1 - x0, 1e-12);
  const double height = std::max(1.0, (y1 - y0) * scale);
  auto sx = [&](double x) { return format_double((x - x0) * scale); };
  auto sy = [&](double y) { return format_double((y1 - y) * scale); };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << format_double(width) << "\" height=\""
     << format_double(height) << "\" viewBox=\"0 0 " << format_double(width) << ' ' << format_double(height) << "\">\n";
  if (!title.empty()) os << "  <title>" << title << "</title>\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (y0 < 0.0 && y1 > 0.0) {
    os << "  <line x1=\"0\" y1=\"" << sy(0.0) << "\" x2=\"" << format_double(width) << "\" y2=\"" << sy(0.0)
       << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  }
  for (const auto& s : series) {
    if (!s.label.empty()) os << "  <g><desc>" << s.label << "</desc>\n";
    if (s.points.size() >= 2) {
      os << "  <polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i) os << ' ';
        os << sx(s.points[i].x()) << ',' << sy(s.points[i].y());
      }
      os << "\"/>\n";
    }
    for (const auto& m : s.markers) {
      os << "  <circle cx=\"" << sx(m.x()) << "\" cy=\"" << sy(m.y()) << "\" r=\"4\" fill=\"#c0392b\"/>\n";
    }
    if (!s.label.empty()) os << "  </g>\n";
  }
  os << "</svg>\n";
}

namespace detail {

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ConfigError, "cannot write '" + path + "'");
  fn(out);
  if (!out) fail(ErrorCode::ConfigError, "write to '" + path + "' failed");
}

}  // namespace detail

/// Writes the sample CSV and, next to it, the events CSV.
inline void save_trajectory_csv(const std::string& path, const Trajectory& traj) {
  detail::write_file(path, [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  detail::write_file(events_path_for(path), [&](std::ostream& os) { write_events_csv(os, traj); });
}

inline void save_svg(const std::string& path, const std::vector<SvgSeries>& series, const std::string& title = "") {
  detail::write_file(path, [&](std::ostream& os) { write_svg(os, series, title); });
}

}  // namespace cfinsler
