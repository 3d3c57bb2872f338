// cfinsler: norm queries, field integration, acceptance checks, figures and
// oracle certification.
//
// Exit codes: 0 ok, 2 configuration / input error, 3 domain error
// (domain exit, point outside the window or domain), 4 verification failure.

#include "cfinsler/cfinsler.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <future>
#include <iostream>

namespace cf = cfinsler;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;
constexpr int kExitVerify = 4;

int exit_code_for(cf::ErrorCode c) {
  switch (c) {
    case cf::ErrorCode::OutOfDomain:
    case cf::ErrorCode::OutOfWindow:
    case cf::ErrorCode::Unreachable:
      return kExitDomain;
    case cf::ErrorCode::NoProgress:
    case cf::ErrorCode::NonConstantHamiltonian:
      return kExitVerify;
    default:
      return kExitConfig;
  }
}

// Fills options of `sub` that were not given on the command line from a JSON
// object whose keys are long option names (underscores allowed). Arrays
// become comma-separated lists; field / norm objects stay inline JSON.
void apply_config(CLI::App* sub, const std::string& path) {
  const cf::json j = cf::load_json_file(path);
  if (!j.is_object()) cf::fail(cf::ErrorCode::ConfigError, path + ": field '/': expected an object");
  for (const auto& [key, v] : j.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = sub->get_option_no_throw("--" + name);
    if (opt == nullptr || name == "config") {
      cf::fail(cf::ErrorCode::ConfigError, path + ": field '/" + key + "': not an option of '" + sub->get_name() + "'");
    }
    if (opt->count() > 0) continue;  // command line wins
    std::string value;
    if (v.is_string()) {
      value = v.get<std::string>();
    } else if (v.is_boolean()) {
      value = v.get<bool>() ? "true" : "false";
    } else if (v.is_number()) {
      value = cf::format_double(v.get<double>());
    } else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
          cf::fail(cf::ErrorCode::ConfigError, path + ": field '/" + key + "/" + std::to_string(i) + "': expected a number");
        }
        value += (i ? "," : "") + cf::format_double(v[i].get<double>());
      }
    } else if (v.is_object() && (name == "field" || name == "norm")) {
      value = v.dump();
    } else {
      cf::fail(cf::ErrorCode::ConfigError, path + ": field '/" + key + "': unsupported value");
    }
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      cf::fail(cf::ErrorCode::ConfigError, path + ": field '/" + key + "': " + e.what());
    }
  }
}

cf::Vector parse_vector(const std::string& s, const std::string& what) {
  const auto v = cf::parse_number_list(s, what);
  if (v.empty()) cf::fail(cf::ErrorCode::ConfigError, what + ": expected a comma-separated list of numbers");
  return Eigen::Map<const cf::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

cf::Covector parse_covector(const std::string& s, const std::string& what) {
  return parse_vector(s, what).transpose();
}

void print_vector(const cf::Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) std::cout << (i ? " " : "") << cf::format_double(v(i));
  std::cout << '\n';
}

cf::FaceStart parse_face_start(const std::string& s) {
  if (s == "probe") return cf::FaceStart::Probe;
  if (s == "clockwise") return cf::FaceStart::Clockwise;
  if (s == "counterclockwise") return cf::FaceStart::CounterClockwise;
  cf::fail(cf::ErrorCode::ConfigError, "--face-start must be probe, clockwise or counterclockwise");
}

// ---- norm ----------------------------------------------------------------

struct NormArgs {
  std::string query;
  std::string norm = "hexagon";
  std::string arg;
};

int cmd_norm(const NormArgs& a) {
  const cf::AsymNorm n = cf::norm_from_source(a.norm);
  if (a.query == "eval") {
    std::cout << cf::format_double(cf::eval(n, parse_vector(a.arg, "--arg"))) << '\n';
  } else if (a.query == "dual") {
    std::cout << cf::format_double(cf::dual_eval(n, parse_covector(a.arg, "--arg"))) << '\n';
  } else if (a.query == "conjugate") {
    std::cout << cf::format_double(cf::fenchel_conjugate_sq(n, parse_covector(a.arg, "--arg"))) << '\n';
  } else if (a.query == "grad") {
    print_vector(cf::grad_dual_sq(n, parse_covector(a.arg, "--arg")));
  } else if (a.query == "support") {
    const auto s = cf::support_set(n, parse_covector(a.arg, "--arg"));
    if (const auto* p = std::get_if<cf::SupportPoint>(&s)) {
      std::cout << "point ";
      print_vector(p->v);
    } else {
      const auto& f = std::get<cf::SupportFace>(s);
      std::cout << "face " << f.face << '\n' << "from ";
      print_vector(f.from);
      std::cout << "to ";
      print_vector(f.to);
    }
  } else {
    cf::fail(cf::ErrorCode::ConfigError, "unknown norm query '" + a.query + "' (eval, dual, support, conjugate, grad)");
  }
  return kExitOk;
}

// ---- integrate -----------------------------------------------------------

struct IntegrateArgs {
  std::string field = "hexagon";
  std::string x0 = "0,1";
  std::string alpha0 = "1,1.7320508075688772";
  double t0 = 0.0;
  double t1 = 5.0;
  double step = 1e-3;
  double tol = 1e-6;
  std::string out_csv;
  std::string out_svg;
  std::string face_start = "probe";
  bool spray = false;
  bool normalize = false;
};

int cmd_integrate(const IntegrateArgs& a) {
  if (!(a.step > 0.0)) cf::fail(cf::ErrorCode::ConfigError, "--step must be positive");
  if (!(a.tol > 0.0)) cf::fail(cf::ErrorCode::ConfigError, "--tol must be positive");
  const cf::FinslerField f = cf::field_from_source(a.field);
  cf::CotangentState z{parse_vector(a.x0, "--x0"), parse_covector(a.alpha0, "--alpha0")};
  if (z.x.size() != f.dimension() || z.alpha.size() != f.dimension()) {
    cf::fail(cf::ErrorCode::ConfigError, "--x0 / --alpha0 must have " + std::to_string(f.dimension()) + " components");
  }
  f.require_inside(z.x);
  if (a.normalize) z = cf::normalize_covector(f, z);
  cf::IntegrationOptions o;
  o.step = a.step;
  o.drift_tolerance = a.tol;
  o.face_start = parse_face_start(a.face_start);
  cf::Trajectory tr = a.spray ? cf::reparameterize_to_unit(cf::integrate_spray_product(f, z, a.t0, a.t1, o), a.tol)
                              : cf::integrate_E(f, z, a.t0, a.t1, o);

  std::cout << "C0 " << cf::format_double(tr.C0) << '\n';
  std::cout << "span " << cf::format_double(tr.t_begin()) << ' ' << cf::format_double(tr.t_end()) << '\n';
  std::cout << "samples " << tr.sample_count() << '\n';
  bool exited = false;
  for (const auto& e : tr.events) {
    std::cout << cf::to_string(e.kind) << ' ' << cf::format_double(e.t) << ' ' << cf::regime_id(e.from) << " -> "
              << cf::regime_id(e.to) << '\n';
    exited = exited || e.kind == cf::EventKind::DomainExit;
  }
  std::cout << "drift " << cf::format_double(tr.max_drift) << '\n';
  std::cout << "length " << cf::format_double(cf::path_length(f, tr)) << '\n';
  if (!a.out_csv.empty()) cf::save_trajectory_csv(a.out_csv, tr);
  if (!a.out_svg.empty()) cf::save_svg(a.out_svg, {cf::svg_series(tr)}, a.field);
  if (exited) {
    for (const auto& e : tr.events) {
      if (e.kind == cf::EventKind::DomainExit) std::cerr << "domain exit at t = " << cf::format_double(e.t) << '\n';
    }
    return kExitDomain;
  }
  if (tr.max_drift > a.tol) {
    std::cerr << "Hamiltonian drift " << cf::format_double(tr.max_drift) << " exceeds --tol\n";
    return kExitVerify;
  }
  return kExitOk;
}

// ---- verify --------------------------------------------------------------

struct VerifyArgs {
  std::string scenario = "all";
  bool json = false;
  int jobs = 1;
};

int cmd_verify(const VerifyArgs& a) {
  if (a.jobs < 1) cf::fail(cf::ErrorCode::ConfigError, "--jobs must be positive");
  std::vector<std::string> names;
  if (a.scenario == "all") {
    for (std::size_t i = 0; i < cf::kAcceptanceCount; ++i) names.push_back(cf::scenario_registry()[i].name);
  } else {
    names.push_back(a.scenario);
  }
  // scenarios are independent; run them in waves of --jobs workers
  std::vector<cf::CriterionResult> results;
  for (std::size_t i = 0; i < names.size(); i += static_cast<std::size_t>(a.jobs)) {
    std::vector<std::future<std::vector<cf::CriterionResult>>> wave;
    for (std::size_t k = i; k < std::min(names.size(), i + static_cast<std::size_t>(a.jobs)); ++k) {
      wave.push_back(std::async(a.jobs > 1 ? std::launch::async : std::launch::deferred,
                                [n = names[k]] { return cf::run_scenario(n); }));
    }
    for (auto& w : wave) {
      for (auto& r : w.get()) results.push_back(std::move(r));
    }
  }
  bool ok = true;
  cf::json report = cf::json::array();
  for (const auto& r : results) {
    ok = ok && r.pass;
    if (a.json) {
      cf::json m = cf::json::object();
      for (const auto& v : r.values) m[v.key] = v.value;
      report.push_back({{"criterion", r.id}, {"scenario", r.scenario}, {"pass", r.pass}, {"seconds", r.seconds},
                        {"values", m}, {"note", r.note}});
    } else {
      std::cout << cf::format_result(r) << '\n';
    }
  }
  if (a.json) std::cout << report.dump(2) << '\n';
  return ok ? kExitOk : kExitVerify;
}

// ---- figures -------------------------------------------------------------

struct FigureArgs {
  std::string out_dir = ".";
  double step = 1e-2;
};

int cmd_figures(const FigureArgs& a) {
  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  const double s3 = std::sqrt(3.0);

  // half hexagon: minimizing geodesic between (0,1) and (2 sqrt 3, 1), drawn
  // over the hexagon (c, 0) + s S it runs along
  const auto conn = cf::connect_hexagon(cf::vec({0.0, 1.0}), cf::vec({2.0 * s3, 1.0}), a.step);
  cf::SvgSeries outline;
  outline.color = "#bbbbbb";
  outline.label = "hexagon (c, 0) + s S";
  const auto* poly = cf::hexagon_norm().as<cf::PolyhedralNorm>();
  for (int k = 0; k <= poly->size(); ++k) {
    outline.points.push_back(cf::Point2(conn.center, 0.0) + conn.scale * poly->vertices()[k % poly->size()]);
  }
  const auto hex_path = (dir / "half_hexagon.svg").string();
  cf::save_svg(hex_path, {outline, cf::svg_series(conn.trajectory, "#1f4e9c", "geodesic")}, "half-hexagon geodesic");
  std::cout << hex_path << '\n';

  // typical S_e path: alpha0 = (1, 3) at (0, 1)
  const cf::Trajectory se = cf::se_geodesic_through(cf::vec({0.0, 1.0}), cf::covec({1.0, 3.0}), -2.5, 6.0);
  const auto se_path = (dir / "se_typical_path.svg").string();
  cf::save_svg(se_path, {cf::svg_series(se, "#1f4e9c", "S_e geodesic")}, "typical S_e path");
  std::cout << se_path << '\n';
  for (const auto& e : se.events) {
    std::cout << cf::to_string(e.kind) << ' ' << cf::format_double(e.t) << ' ' << cf::regime_id(e.from) << " -> "
              << cf::regime_id(e.to) << '\n';
  }
  return kExitOk;
}

// ---- certify -------------------------------------------------------------

struct CertifyArgs {
  std::string field = "hexagon";
  std::string x0 = "-1,1";
  std::string alpha0;
  std::string target;
  double t0 = 0.0;
  double t1 = 1.0;
  double step = 1e-3;
  double tol = cf::kCertifyAbove;
  int grid_n = 301;
  int stencil = 16;
  double cell_aspect = 1.0;
  std::string window;
};

int cmd_certify(const CertifyArgs& a) {
  if (a.grid_n < 16) cf::fail(cf::ErrorCode::ConfigError, "--grid-n must be at least 16");
  if (!(a.tol > 0.0)) cf::fail(cf::ErrorCode::ConfigError, "--tol must be positive");
  if (!(a.cell_aspect > 0.0)) cf::fail(cf::ErrorCode::ConfigError, "--cell-aspect must be positive");
  const cf::FinslerField f = cf::field_from_source(a.field);
  if (f.dimension() != 2) cf::fail(cf::ErrorCode::ConfigError, "certify needs a planar field");
  const cf::Vector p = parse_vector(a.x0, "--x0");
  if (p.size() != 2) cf::fail(cf::ErrorCode::ConfigError, "--x0 must have 2 components");

  double length = 0.0;
  cf::Vector q;
  std::vector<cf::Point2> trace;
  if (!a.target.empty()) {
    // closed-form boundary value problem for the two preset fields
    q = parse_vector(a.target, "--target");
    if (q.size() != 2) cf::fail(cf::ErrorCode::ConfigError, "--target must have 2 components");
    f.require_inside(p);
    f.require_inside(q);
    if (a.field == "hexagon") {
      const auto conn = cf::connect_hexagon(p, q, a.step);
      length = conn.length;
      for (const auto& s : cf::svg_series(conn.trajectory).points) trace.push_back(s);
    } else if (a.field == "hyperbolic") {
      if ((p - q).norm() == 0.0) cf::fail(cf::ErrorCode::IdenticalPoints, "endpoints coincide");
      length = cf::hyperbolic_distance(p, q);
      trace = {cf::as_point(p), cf::as_point(q)};
    } else {
      cf::fail(cf::ErrorCode::ConfigError, "--target is supported for the hexagon and hyperbolic presets only");
    }
  } else {
    if (a.alpha0.empty()) cf::fail(cf::ErrorCode::ConfigError, "give --alpha0 (and --t0/--t1) or --target");
    cf::IntegrationOptions o;
    o.step = a.step;
    const cf::Trajectory tr = cf::integrate_E(f, {p, parse_covector(a.alpha0, "--alpha0")}, a.t0, a.t1, o);
    for (const auto& e : tr.events) {
      if (e.kind == cf::EventKind::DomainExit) {
        std::cerr << "domain exit at t = " << cf::format_double(e.t) << '\n';
        return kExitDomain;
      }
    }
    length = cf::path_length(f, tr);
    q = tr.back().z.x;
    trace = cf::svg_series(tr).points;
  }

  cf::Vector lo(2), hi(2);
  if (!a.window.empty()) {
    const cf::Vector w = parse_vector(a.window, "--window");
    if (w.size() != 4) cf::fail(cf::ErrorCode::ConfigError, "--window takes lo1,lo2,hi1,hi2");
    lo = w.head(2);
    hi = w.tail(2);
  } else {
    // bounding box of the curve, padded; cells of the requested aspect
    cf::Point2 mn = trace.front(), mx = trace.front();
    for (const auto& t : trace) {
      mn = mn.cwiseMin(t);
      mx = mx.cwiseMax(t);
    }
    const double pad = 0.25 * std::max((mx - mn).maxCoeff(), 1e-3);
    lo = cf::vec({mn.x() - pad, mn.y() - pad});
    if (!f.domain().contains(lo)) lo(1) = 0.5 * mn.y();
    const double width = mx.x() + pad - lo(0);
    hi = cf::vec({mx.x() + pad, lo(1) + std::max(mx.y() + pad - lo(1), 0.0)});
    const double dx = width / (a.grid_n - 1);
    const double rows = std::ceil((hi(1) - lo(1)) / (a.cell_aspect * dx));
    if (rows > a.grid_n - 1) {
      const double dy = (hi(1) - lo(1)) / (a.grid_n - 1);
      hi(0) = lo(0) + dy / a.cell_aspect * (a.grid_n - 1);
    } else {
      hi(1) = lo(1) + a.cell_aspect * dx * (a.grid_n - 1);
    }
  }
  const cf::GridOracle g = cf::build_grid(f, lo, hi, a.grid_n, a.stencil);
  cf::Certificate c = cf::certify_length(length, p, q, g);
  c.pass = c.gap >= -cf::kCertifyBelow && c.gap <= a.tol;
  std::cout << "length " << cf::format_double(c.length) << '\n';
  std::cout << "oracle " << cf::format_double(c.oracle) << '\n';
  std::cout << "gap " << cf::format_double(c.gap) << '\n';
  std::cout << "snap_error " << cf::format_double(c.snap_error) << '\n';
  std::cout << (c.pass ? "PASS" : "FAIL") << '\n';
  return c.pass ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesics of C0-Finsler structures: norms, extended geodesic field, quasi-hyperbolic planes, grid oracle"};
  app.require_subcommand(1);

  NormArgs na;
  auto* norm = app.add_subcommand("norm", "Query an asymmetric norm");
  norm->add_option("query", na.query, "eval | dual | support | conjugate | grad")->required();
  norm->add_option("--norm", na.norm, "Norm: preset (hexagon, se, euclidean), inline JSON or JSON file")
      ->capture_default_str();
  norm->add_option("--arg", na.arg, "Vector (eval) or covector (others), comma-separated")->required();

  IntegrateArgs ia;
  auto* integ = app.add_subcommand("integrate", "Integrate the extended geodesic field");
  std::string integ_config;
  integ->add_option("--config", integ_config, "JSON file of option values (keys are long option names); flags override");
  integ->add_option("--field", ia.field,
                    "Field: preset (hexagon, se, hyperbolic, riemannian_hyperbolic, euclidean), inline JSON or JSON file")
      ->capture_default_str();
  integ->add_option("--x0", ia.x0, "Initial point")->capture_default_str();
  integ->add_option("--alpha0", ia.alpha0, "Initial covector")->capture_default_str();
  integ->add_option("--t0", ia.t0, "Start time")->capture_default_str();
  integ->add_option("--t1", ia.t1, "End time (below --t0 integrates backward)")->capture_default_str();
  integ->add_option("--step", ia.step, "RK4 step")->capture_default_str();
  integ->add_option("--tol", ia.tol, "Allowed relative Hamiltonian drift")->capture_default_str();
  integ->add_option("--out-csv", ia.out_csv, "Trajectory CSV (events go to <name>.events.csv)");
  integ->add_option("--out-svg", ia.out_svg, "SVG plot of the x-projection");
  integ->add_option("--face-start", ia.face_start, "Start on a face: probe | clockwise | counterclockwise")
      ->capture_default_str();
  integ->add_flag("--spray", ia.spray, "Integrate F* E and reparameterize to unit speed");
  integ->add_flag("--normalize", ia.normalize, "Rescale alpha0 so that F*(x0, alpha0) = 1");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run acceptance scenarios");
  verify->add_option("scenario", va.scenario, "Scenario name or 'all'")->capture_default_str();
  verify->add_flag("--json", va.json, "Print a JSON report");
  verify->add_option("--jobs", va.jobs, "Scenarios run concurrently")->capture_default_str();

  FigureArgs fa;
  auto* fig = app.add_subcommand("figures", "Write the half-hexagon and typical S_e path figures as SVG");
  fig->add_option("--out-dir", fa.out_dir, "Output directory")->capture_default_str();
  fig->add_option("--step", fa.step, "Sampling step of the closed-form hexagon curve")->capture_default_str();

  CertifyArgs ca;
  auto* cert = app.add_subcommand("certify", "Compare a geodesic length with the grid oracle");
  std::string cert_config;
  cert->add_option("--config", cert_config, "JSON file of option values (keys are long option names); flags override");
  cert->add_option("--field", ca.field, "Planar field (preset, inline JSON or JSON file)")->capture_default_str();
  cert->add_option("--x0", ca.x0, "Start point")->capture_default_str();
  cert->add_option("--alpha0", ca.alpha0, "Start covector: certify the E curve over [t0, t1]");
  cert->add_option("--target", ca.target, "End point: closed-form geodesic (hexagon / hyperbolic presets)");
  cert->add_option("--t0", ca.t0, "Start time")->capture_default_str();
  cert->add_option("--t1", ca.t1, "End time")->capture_default_str();
  cert->add_option("--step", ca.step, "Integration / sampling step")->capture_default_str();
  cert->add_option("--tol", ca.tol, "Largest accepted relative excess of the oracle")->capture_default_str();
  cert->add_option("--grid-n", ca.grid_n, "Grid nodes per axis")->capture_default_str();
  cert->add_option("--stencil", ca.stencil, "Neighbourhood: 4, 8, 16 or 32")->capture_default_str();
  cert->add_option("--cell-aspect", ca.cell_aspect, "Cell height / width (2/sqrt(3) suits the hexagon)")
      ->capture_default_str();
  cert->add_option("--window", ca.window, "Oracle window lo1,lo2,hi1,hi2 (default: padded bounding box)");

  try {
    app.parse(argc, argv);
    if (!integ_config.empty()) apply_config(integ, integ_config);
    if (!cert_config.empty()) apply_config(cert, cert_config);
    if (*norm) return cmd_norm(na);
    if (*integ) return cmd_integrate(ia);
    if (*verify) return cmd_verify(va);
    if (*fig) return cmd_figures(fa);
    if (*cert) return cmd_certify(ca);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const cf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
