#pragma once

// Brute-force distance oracle: Dijkstra on a directed grid graph whose edge
// p -> p + d costs F(midpoint, d). Independent of the geodesic machinery.

#include "cfinsler/trajectory.hpp"

#include <queue>
#include <utility>

namespace cfinsler {

using Offset = std::pair<int, int>;

/// Neighbourhood stencils: 4 (axis), 8 (king), 16 (king + knight),
/// 32 (adds the (3,1) and (3,2) families).
inline std::vector<Offset> make_stencil(int size) {
  std::vector<Offset> out;
  auto add_family = [&](int a, int b) {
    for (int sa : {1, -1}) {
      for (int sb : {1, -1}) {
        out.emplace_back(sa * a, sb * b);
        if (a != b) out.emplace_back(sb * b, sa * a);
      }
    }
  };
  if (size == 4) return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  if (size != 8 && size != 16 && size != 32) fail(ErrorCode::InvalidArgument, "stencil size must be 4, 8, 16 or 32");
  out = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  add_family(1, 1);
  if (size >= 16) add_family(2, 1);
  if (size == 32) {
    add_family(3, 1);
    add_family(3, 2);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

enum class EdgeRule { Midpoint, Simpson };

struct GridOracle {
  Vector lo, hi;
  int n = 0;
  double dx = 0.0, dy = 0.0;
  std::vector<Offset> stencil;
  std::vector<std::size_t> row_start;  // CSR over nodes i + n j
  std::vector<std::uint32_t> target;
  std::vector<double> weight;

  std::size_t node_count() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  std::size_t edge_count() const { return target.size(); }
  Vector position(std::size_t id) const {
    const auto i = static_cast<double>(id % static_cast<std::size_t>(n));
    const auto j = static_cast<double>(id / static_cast<std::size_t>(n));
    return vec({lo(0) + i * dx, lo(1) + j * dy});
  }
  bool in_window(const Vector& p) const {
    const double ex = 1e-9 * dx, ey = 1e-9 * dy;
    return p(0) >= lo(0) - ex && p(0) <= hi(0) + ex && p(1) >= lo(1) - ey && p(1) <= hi(1) + ey;
  }
  /// Nearest node; throws OutOfWindow.
  std::size_t snap(const Vector& p) const {
    if (p.size() != 2 || !in_window(p)) fail(ErrorCode::OutOfWindow, "point outside the oracle window");
    const auto i = static_cast<std::size_t>(std::clamp<long>(std::lround((p(0) - lo(0)) / dx), 0, n - 1));
    const auto j = static_cast<std::size_t>(std::clamp<long>(std::lround((p(1) - lo(1)) / dy), 0, n - 1));
    return i + static_cast<std::size_t>(n) * j;
  }
};

/// N x N nodes spanning the closed window [lo, hi]. Throws OutOfDomain if
/// the window is not inside the field's domain.
inline GridOracle build_grid(const FinslerField& f, const Vector& lo, const Vector& hi, int n, int stencil = 16,
                             EdgeRule rule = EdgeRule::Midpoint) {
  if (f.dimension() != 2) fail(ErrorCode::InvalidArgument, "grid oracle is planar");
  if (n < 16) fail(ErrorCode::InvalidArgument, "grid resolution must be at least 16");
  if (!(lo(0) < hi(0) && lo(1) < hi(1))) fail(ErrorCode::InvalidArgument, "empty oracle window");
  for (double a : {lo(0), hi(0)}) {
    for (double b : {lo(1), hi(1)}) {
      if (!f.domain().contains(vec({a, b}))) fail(ErrorCode::OutOfDomain, "oracle window leaves the domain");
    }
  }
  GridOracle g;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  g.dx = (hi(0) - lo(0)) / (n - 1);
  g.dy = (hi(1) - lo(1)) / (n - 1);
  g.stencil = make_stencil(stencil);
  g.row_start.reserve(g.node_count() + 1);
  g.target.reserve(g.node_count() * g.stencil.size());
  g.weight.reserve(g.node_count() * g.stencil.size());
  g.row_start.push_back(0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vector p = vec({lo(0) + i * g.dx, lo(1) + j * g.dy});
      for (const auto& [di, dj] : g.stencil) {
        const int a = i + di, b = j + dj;
        if (a < 0 || a >= n || b < 0 || b >= n) continue;
        const Vector d = vec({di * g.dx, dj * g.dy});
        double w = field_eval(f, p + 0.5 * d, d);
        if (rule == EdgeRule::Simpson) w = (field_eval(f, p, d) + 4.0 * w + field_eval(f, p + d, d)) / 6.0;
        g.target.push_back(static_cast<std::uint32_t>(a + n * b));
        g.weight.push_back(w);
      }
      g.row_start.push_back(g.target.size());
    }
  }
  return g;
}

struct OraclePath {
  double distance = 0.0;
  std::vector<Vector> nodes;
  double snap_error = 0.0;  // largest Euclidean distance from an endpoint to its node
};

/// Exact directed shortest path on the graph between the nodes nearest p, q.
inline OraclePath shortest_path(const GridOracle& g, const Vector& p, const Vector& q) {
  const std::size_t s = g.snap(p), t = g.snap(q);
  OraclePath out;
  out.snap_error = std::max((g.position(s) - p).norm(), (g.position(t) - q).norm());
  const std::size_t nn = g.node_count();
  std::vector<double> dist(nn, std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> parent(nn, std::numeric_limits<std::uint32_t>::max());
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[s] = 0.0;
  heap.emplace(0.0, static_cast<std::uint32_t>(s));
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == t) break;
    for (std::size_t e = g.row_start[u]; e < g.row_start[u + 1]; ++e) {
      const std::uint32_t v = g.target[e];
      const double nd = d + g.weight[e];
      if (nd < dist[v]) {
        dist[v] = nd;
        parent[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
  if (!std::isfinite(dist[t])) fail(ErrorCode::Unreachable, "target node not reachable");
  out.distance = dist[t];
  for (std::size_t v = t;; v = parent[v]) {
    out.nodes.push_back(g.position(v));
    if (v == s) break;
  }
  std::reverse(out.nodes.begin(), out.nodes.end());
  return out;
}

struct Certificate {
  double length = 0.0;
  double oracle = 0.0;
  double gap = 0.0;  // (oracle - length) / length
  double snap_error = 0.0;
  bool pass = false;
};

inline constexpr double kCertifyBelow = 1e-3;
inline constexpr double kCertifyAbove = 0.03;

/// Compares a curve length between p and q with the oracle distance.
inline Certificate certify_length(double length, const Vector& p, const Vector& q, const GridOracle& g) {
  const auto path = shortest_path(g, p, q);
  Certificate c;
  c.length = length;
  c.oracle = path.distance;
  c.snap_error = path.snap_error;
  c.gap = (path.distance - length) / length;
  c.pass = c.gap >= -kCertifyBelow && c.gap <= kCertifyAbove;
  return c;
}

/// Certifies a trajectory against the oracle. Throws OutOfWindow when an
/// endpoint lies outside the oracle window.
inline Certificate certify(const FinslerField& f, const Trajectory& traj, const GridOracle& g) {
  if (traj.empty()) fail(ErrorCode::InvalidArgument, "empty trajectory");
  const Vector& p = traj.front().z.x;
  const Vector& q = traj.back().z.x;
  if (!g.in_window(p) || !g.in_window(q)) fail(ErrorCode::OutOfWindow, "trajectory endpoints outside the oracle window");
  return certify_length(path_length(f, traj), p, q, g);
}

}  // namespace cfinsler
