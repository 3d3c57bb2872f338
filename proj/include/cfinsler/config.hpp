#pragma once

// JSON definitions of norms and fields.
//
// Norm:
//   {"kind": "polyhedral", "vertices": [[x, y], ...]}        counterclockwise
//   {"kind": "quadratic", "matrix": [[a11, a12], [a21, a22]]}
//   {"kind": "arc_composite", "arcs": [{"center": [x, y], "radius": r,
//                                       "from": th0, "to": th1}, ...]}
//   {"kind": "scaled", "inner": <norm>, "factor": s}          F = inner / s
//   {"preset": "hexagon" | "se" | "euclidean"}
// Field:
//   {"kind": "quasi_hyperbolic", "base": <norm>}
//   {"kind": "constant", "norm": <norm>, "lower": [..], "upper": [..]}   bounds optional
//   {"kind": "riemannian_hyperbolic"} | {"kind": "riemannian_euclidean", "dimension": n}
//   {"preset": "hexagon" | "se" | "hyperbolic" | "riemannian_hyperbolic" | "euclidean"}
// A source string is a preset name, inline JSON, or a path to a JSON file.

#include "cfinsler/finsler_field.hpp"
#include "cfinsler/qh_plane.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace cfinsler {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path, const std::string& msg) {
  fail(ErrorCode::ConfigError, "field '" + (path.empty() ? std::string("/") : path) + "': " + msg);
}

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) config_fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) config_fail(path + "/" + key, "missing");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) config_fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_fail(path, "expected a finite number");
  return v;
}

inline std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) config_fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "/" + std::to_string(i)));
  return out;
}

inline Point2 point2(const json& j, const std::string& path) {
  const auto v = numbers(j, path);
  if (v.size() != 2) config_fail(path, "expected 2 components");
  return {v[0], v[1]};
}

inline Vector vector_of(const json& j, const std::string& path) {
  const auto v = numbers(j, path);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Converts library validation errors into field-qualified config errors.
template <class Fn>
auto validated(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_fail(path, e.what());
  }
}

}  // namespace detail

/// Parses JSON text; syntax errors report the line and column.
inline json parse_json_text(const std::string& text, const std::string& origin = "<inline>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorCode::ConfigError, origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

inline AsymNorm norm_preset(const std::string& name) {
  if (name == "hexagon") return hexagon_norm();
  if (name == "se") return se_norm();
  if (name == "euclidean") return AsymNorm::euclidean();
  fail(ErrorCode::ConfigError, "unknown norm preset '" + name + "' (hexagon, se, euclidean)");
}

inline FinslerField field_preset(const std::string& name) {
  if (name == "hexagon") return FinslerField::quasi_hyperbolic(hexagon_norm());
  if (name == "se") return FinslerField::quasi_hyperbolic(se_norm());
  if (name == "hyperbolic") return FinslerField::quasi_hyperbolic(AsymNorm::euclidean());
  if (name == "riemannian_hyperbolic") return FinslerField(RiemannianField::hyperbolic());
  if (name == "euclidean") return FinslerField::constant(AsymNorm::euclidean());
  fail(ErrorCode::ConfigError,
       "unknown field preset '" + name + "' (hexagon, se, hyperbolic, riemannian_hyperbolic, euclidean)");
}

inline AsymNorm parse_norm(const json& j, const std::string& path = "") {
  using namespace detail;
  if (j.is_string()) return norm_preset(j.get<std::string>());
  if (!j.is_object()) config_fail(path, "expected a norm object or preset name");
  if (j.contains("preset")) {
    const auto& p = j["preset"];
    if (!p.is_string()) config_fail(path + "/preset", "expected a string");
    return norm_preset(p.get<std::string>());
  }
  const auto& kind = member(j, "kind", path);
  if (!kind.is_string()) config_fail(path + "/kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "polyhedral") {
    const auto& vs = member(j, "vertices", path);
    if (!vs.is_array()) config_fail(path + "/vertices", "expected an array");
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < vs.size(); ++i) pts.push_back(point2(vs[i], path + "/vertices/" + std::to_string(i)));
    return validated(path + "/vertices", [&] { return AsymNorm::polyhedral(pts); });
  }
  if (k == "quadratic") {
    const auto& m = member(j, "matrix", path);
    if (!m.is_array() || m.empty()) config_fail(path + "/matrix", "expected a nonempty array of rows");
    const auto n = static_cast<Eigen::Index>(m.size());
    Matrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const std::string rp = path + "/matrix/" + std::to_string(r);
      const auto row = numbers(m[static_cast<std::size_t>(r)], rp);
      if (static_cast<Eigen::Index>(row.size()) != n) config_fail(rp, "row length differs from row count");
      for (Eigen::Index c = 0; c < n; ++c) a(r, c) = row[static_cast<std::size_t>(c)];
    }
    return validated(path + "/matrix", [&] { return AsymNorm::quadratic(a); });
  }
  if (k == "arc_composite") {
    const auto& as = member(j, "arcs", path);
    if (!as.is_array()) config_fail(path + "/arcs", "expected an array");
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < as.size(); ++i) {
      const std::string ap = path + "/arcs/" + std::to_string(i);
      arcs.push_back({point2(member(as[i], "center", ap), ap + "/center"),
                      number(member(as[i], "radius", ap), ap + "/radius"), number(member(as[i], "from", ap), ap + "/from"),
                      number(member(as[i], "to", ap), ap + "/to")});
    }
    return validated(path + "/arcs", [&] { return AsymNorm::arc_composite(arcs); });
  }
  if (k == "scaled") {
    const AsymNorm inner = parse_norm(member(j, "inner", path), path + "/inner");
    const double s = number(member(j, "factor", path), path + "/factor");
    return validated(path + "/factor", [&] { return inner.scaled(s); });
  }
  config_fail(path + "/kind", "unknown norm kind '" + k + "' (polyhedral, quadratic, arc_composite, scaled)");
}

inline FinslerField parse_field(const json& j, const std::string& path = "") {
  using namespace detail;
  if (j.is_string()) return field_preset(j.get<std::string>());
  if (!j.is_object()) config_fail(path, "expected a field object or preset name");
  if (j.contains("preset")) {
    const auto& p = j["preset"];
    if (!p.is_string()) config_fail(path + "/preset", "expected a string");
    return field_preset(p.get<std::string>());
  }
  const auto& kind = member(j, "kind", path);
  if (!kind.is_string()) config_fail(path + "/kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "quasi_hyperbolic") {
    const AsymNorm base = parse_norm(member(j, "base", path), path + "/base");
    return validated(path + "/base", [&] { return FinslerField::quasi_hyperbolic(base); });
  }
  if (k == "constant") {
    const AsymNorm n = parse_norm(member(j, "norm", path), path + "/norm");
    ChartDomain d = ChartDomain::whole(n.dimension());
    if (j.contains("lower") || j.contains("upper")) {
      const Vector lo = vector_of(member(j, "lower", path), path + "/lower");
      const Vector hi = vector_of(member(j, "upper", path), path + "/upper");
      d = validated(path + "/lower", [&] { return ChartDomain::box(lo, hi); });
    }
    return validated(path, [&] { return FinslerField(ConstantField{n, d}); });
  }
  if (k == "riemannian_hyperbolic") return FinslerField(RiemannianField::hyperbolic());
  if (k == "riemannian_euclidean") {
    int n = 2;
    if (j.contains("dimension")) n = static_cast<int>(number(j["dimension"], path + "/dimension"));
    if (n < 1) config_fail(path + "/dimension", "must be positive");
    return FinslerField(RiemannianField::euclidean(n));
  }
  config_fail(path + "/kind",
              "unknown field kind '" + k + "' (quasi_hyperbolic, constant, riemannian_hyperbolic, riemannian_euclidean)");
}

namespace detail {

inline json resolve_source(const std::string& src, bool& is_preset) {
  is_preset = false;
  const auto first = src.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && src[first] == '{') return parse_json_text(src);
  std::ifstream probe(src);
  if (probe) return load_json_file(src);
  is_preset = true;
  return json(src);
}

}  // namespace detail

/// Norm from a preset name, inline JSON, or JSON file path.
inline AsymNorm norm_from_source(const std::string& src) {
  bool preset = false;
  return parse_norm(detail::resolve_source(src, preset));
}

/// Field from a preset name, inline JSON, or JSON file path.
inline FinslerField field_from_source(const std::string& src) {
  bool preset = false;
  return parse_field(detail::resolve_source(src, preset));
}

/// Comma- or space-separated list of numbers.
inline std::vector<double> parse_number_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::string tok;
  std::stringstream ss(s);
  while (std::getline(ss, tok, ',')) {
    std::stringstream ts(tok);
    std::string part;
    while (ts >> part) {
      try {
        std::size_t used = 0;
        const double v = std::stod(part, &used);
        if (used != part.size() || !std::isfinite(v)) throw std::invalid_argument(part);
        out.push_back(v);
      } catch (const std::exception&) {
        fail(ErrorCode::ConfigError, what + ": '" + part + "' is not a number");
      }
    }
  }
  return out;
}

}  // namespace cfinsler
