#pragma once

// Acceptance scenarios. Each returns measured values and a verdict; shared by
// the CLI `verify` command and the acceptance binary.

#include "cfinsler/convex_analysis.hpp"
#include "cfinsler/integrator.hpp"
#include "cfinsler/metric_oracle.hpp"
#include "cfinsler/qh_plane.hpp"
#include "cfinsler/trajectory_io.hpp"

#include <chrono>
#include <functional>
#include <random>

namespace cfinsler {

struct Measurement {
  std::string key;
  double value = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string scenario;
  bool pass = false;
  double seconds = 0.0;
  std::vector<Measurement> values;
  std::string note;  // human-readable detail on failure
};

/// "PASS  3 hexagon-switching  seconds=0.41 t_switch=1.386..." on one line.
inline std::string format_result(const CriterionResult& r) {
  std::string s = r.pass ? "PASS" : "FAIL";
  s += "  " + std::string(r.id < 10 ? " " : "") + std::to_string(r.id) + " " + r.scenario;
  s += "  seconds=" + format_double(r.seconds);
  for (const auto& m : r.values) s += " " + m.key + "=" + format_double(m.value);
  if (!r.note.empty()) s += "  note=\"" + r.note + "\"";
  return s;
}

namespace scenario_detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Recorder {
  CriterionResult r;
  Clock::time_point t0 = Clock::now();
  Recorder(int id, std::string name) {
    r.id = id;
    r.scenario = std::move(name);
    r.pass = true;
  }
  void value(const std::string& k, double v) { r.values.push_back({k, v}); }
  void check(bool ok, const std::string& what) {
    if (ok) return;
    r.pass = false;
    if (!r.note.empty()) r.note += "; ";
    r.note += what;
  }
  CriterionResult finish() {
    r.seconds = seconds_since(t0);
    return r;
  }
};

inline Covector random_covector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Covector a(dim);
  do {
    for (int i = 0; i < dim; ++i) a(i) = g(rng);
  } while (a.norm() < 1e-3);
  return a;
}

struct NormFamily {
  std::string name;
  AsymNorm norm;
  double tol;
};

inline std::vector<NormFamily> identity_families() {
  Matrix aniso(2, 2);
  aniso << 4.0, 1.0, 1.0, 2.0;
  Matrix spd3(3, 3);
  spd3 << 3.0, 0.5, 0.2, 0.5, 2.0, -0.3, 0.2, -0.3, 1.5;
  const std::vector<Point2> pentagon = {{1.0, 0.0}, {0.5, 1.2}, {-0.8, 0.6}, {-0.7, -0.9}, {0.6, -1.1}};
  return {
      {"hexagon", hexagon_norm(), 1e-8},
      {"pentagon", AsymNorm::polyhedral(pentagon), 1e-8},
      {"euclidean", AsymNorm::euclidean(), 1e-8},
      {"quadratic2", AsymNorm::quadratic(aniso), 1e-8},
      {"quadratic3", AsymNorm::quadratic(spd3), 1e-8},
      {"se", se_norm(), 1e-4},
  };
}

inline CotangentState random_state(std::mt19937_64& rng, double x1_lo, double x1_hi, double x2_lo, double x2_hi) {
  std::uniform_real_distribution<double> u1(x1_lo, x1_hi), u2(x2_lo, x2_hi), mag(0.5, 2.0), ang(0.0, kTwoPi);
  const double th = ang(rng), m = mag(rng);
  return {vec({u1(rng), u2(rng)}), covec({m * std::cos(th), m * std::sin(th)})};
}

// Largest |a - b| over x and alpha at the sample times of `ref`.
inline std::pair<double, double> deviation(const Trajectory& ref, const std::function<CotangentState(double)>& other,
                                           const std::function<CotangentState(const CotangentState&)>& map) {
  double dx = 0.0, da = 0.0;
  for (const auto& p : ref.pieces) {
    for (const auto& s : p.samples) {
      const CotangentState a = map(s.z);
      const CotangentState b = other(s.t);
      dx = std::max(dx, (a.x - b.x).cwiseAbs().maxCoeff());
      da = std::max(da, (a.alpha - b.alpha).cwiseAbs().maxCoeff());
    }
  }
  return {dx, da};
}

// Sign change at q of the travel-direction projection: stops an E curve at q.
inline std::function<double(const CotangentState&)> passes_point(const Vector& q, const Vector& direction) {
  return [q, direction](const CotangentState& z) { return (z.x - q).dot(direction); };
}

}  // namespace scenario_detail

/// 1. (F^2)*(alpha) = F*(alpha)^2 / 4 on 1000 random covectors per family.
inline CriterionResult scenario_fenchel() {
  using namespace scenario_detail;
  Recorder rec(1, "fenchel");
  std::mt19937_64 rng(101);
  for (const auto& fam : identity_families()) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Covector a = random_covector(rng, fam.norm.dimension());
      const double d = dual_eval(fam.norm, a);
      worst = std::max(worst, std::abs(fenchel_conjugate_sq(fam.norm, a) - 0.25 * d * d));
    }
    rec.value(fam.name + ".max_err", worst);
    rec.check(worst <= fam.tol, fam.name + " exceeds tolerance");
  }
  const double s = seconds_since(rec.t0);
  rec.check(s < 5.0, "runtime above 5 s");
  return rec.finish();
}

/// 2. F(dF*^2(alpha)) = 2 F*(alpha) for strictly convex families.
inline CriterionResult scenario_fundamental() {
  using namespace scenario_detail;
  Recorder rec(2, "fundamental");
  std::mt19937_64 rng(202);
  for (const auto& fam : identity_families()) {
    if (!fam.norm.strictly_convex()) continue;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Covector a = random_covector(rng, fam.norm.dimension());
      worst = std::max(worst, std::abs(eval(fam.norm, grad_dual_sq(fam.norm, a)) - 2.0 * dual_eval(fam.norm, a)));
    }
    rec.value(fam.name + ".max_err", worst);
    rec.check(worst <= fam.tol, fam.name + " exceeds tolerance");
  }
  return rec.finish();
}

/// 3. Hexagon example from (0,1), (1, sqrt 3): switch at 2 ln 2, side-piece
/// coefficients, closed form vs numeric on [-5, 5].
inline CriterionResult scenario_hexagon_switching() {
  using namespace scenario_detail;
  Recorder rec(3, "hexagon-switching");
  const double s3 = std::sqrt(3.0);
  const FinslerField f = FinslerField::quasi_hyperbolic(hexagon_norm());
  const CotangentState z0{vec({0.0, 1.0}), covec({1.0, s3})};
  const Trajectory num = integrate_E_through(f, z0, 0.0, -5.0, 5.0);

  double t3 = std::numeric_limits<double>::quiet_NaN();
  for (double t : num.switch_times()) {
    if (t > 1e-6) {
      t3 = t;
      break;
    }
  }
  rec.value("t_switch", t3);
  rec.value("t_switch_err", std::abs(t3 - 2.0 * std::log(2.0)));
  rec.check(std::abs(t3 - 2.0 * std::log(2.0)) <= 1e-6, "switch time off 2 ln 2");

  // least-squares fit of the V1 piece on (0, t3):
  // x1 = A + B e^{t/2}, x2 = C e^{t/2}, alpha2 = D e^{-t/2} + E
  std::vector<const PhasePoint*> side;
  for (const auto& piece : num.pieces) {
    if (piece.t_begin >= -1e-9 && piece.t_end <= t3 + 1e-9) {
      for (const auto& s : piece.samples) side.push_back(&s);
    }
  }
  const auto m = static_cast<Eigen::Index>(side.size());
  rec.check(m >= 10, "side piece not found");
  if (m >= 10) {
    Eigen::MatrixXd A(m, 2), Ax(m, 1), Aa(m, 2);
    Eigen::VectorXd b1(m), b2(m), b3(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& s = *side[static_cast<std::size_t>(i)];
      const double e = std::exp(0.5 * s.t);
      A(i, 0) = 1.0;
      A(i, 1) = e;
      Ax(i, 0) = e;
      Aa(i, 0) = 1.0 / e;
      Aa(i, 1) = 1.0;
      b1(i) = s.z.x(0);
      b2(i) = s.z.x(1);
      b3(i) = s.z.alpha(1);
    }
    const Eigen::VectorXd c1 = A.colPivHouseholderQr().solve(b1);
    const Eigen::VectorXd c2 = Ax.colPivHouseholderQr().solve(b2);
    const Eigen::VectorXd c3 = Aa.colPivHouseholderQr().solve(b3);
    // expected from x(0) = (0, 1), alpha(0) = (1, sqrt 3) on the V1 flow
    const double err = std::max({std::abs(c1(0) - (0.0 - s3 * 1.0)), std::abs(c1(1) - s3 * 1.0), std::abs(c2(0) - 1.0),
                                 std::abs(c3(0) - 2.0 * s3), std::abs(c3(1) + s3)});
    rec.value("side_coeff_err", err);
    rec.check(err <= 1e-6, "side piece coefficients off");
  }

  const PolyhedralQHGeodesic exact(hexagon_norm(), z0, 0.0, -5.0, 5.0);
  double dev = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double t = -5.0 + 10.0 * i / 10000.0;
    const CotangentState a = exact.state_at(t), b = num.state_at(t);
    dev = std::max({dev, (a.x - b.x).cwiseAbs().maxCoeff(), (a.alpha - b.alpha).cwiseAbs().maxCoeff()});
  }
  rec.value("closed_form_dev", dev);
  rec.check(dev <= 1e-5, "closed-form deviation above 1e-5");
  const double s = seconds_since(rec.t0);
  rec.check(s < 5.0, "runtime above 5 s");
  return rec.finish();
}

/// 4. |F*(x(t), alpha(t)) - C0| / C0 <= 1e-6 at step 1e-3 over unit time.
inline CriterionResult scenario_hamiltonian() {
  using namespace scenario_detail;
  Recorder rec(4, "hamiltonian");
  Matrix aniso(2, 2);
  aniso << 2.0, 0.3, 0.3, 1.0;
  const std::vector<std::pair<std::string, FinslerField>> fields = {
      {"hexagon", FinslerField::quasi_hyperbolic(hexagon_norm())},
      {"se", FinslerField::quasi_hyperbolic(se_norm())},
      {"hyperbolic", FinslerField::quasi_hyperbolic(AsymNorm::euclidean())},
      {"riemannian_hyperbolic", FinslerField(RiemannianField::hyperbolic())},
      {"constant_quadratic", FinslerField::constant(AsymNorm::quadratic(aniso))},
  };
  std::mt19937_64 rng(404);
  for (const auto& [name, f] : fields) {
    double worst = 0.0;
    int failures = 0;
    for (int i = 0; i < 20; ++i) {
      const CotangentState z0 = random_state(rng, -1.0, 1.0, 0.5, 2.0);
      try {
        const Trajectory tr = integrate_E(f, z0, 0.0, 1.0);
        for (const auto& p : tr.pieces) {
          for (const auto& s : p.samples) {
            worst = std::max(worst, std::abs(dual_eval(f.norm_at(s.z.x), s.z.alpha) - tr.C0) / tr.C0);
          }
        }
      } catch (const Error&) {
        ++failures;
      }
    }
    rec.value(name + ".max_drift", worst);
    rec.check(failures == 0, name + " integration failed");
    rec.check(worst <= 1e-6, name + " drift above 1e-6");
  }
  return rec.finish();
}

/// 5. Cotangent geodesic spray of the hyperbolic metric equals F* E.
inline CriterionResult scenario_spray() {
  using namespace scenario_detail;
  Recorder rec(5, "spray");
  const RiemannianField rf = RiemannianField::hyperbolic();
  const FinslerField f(rf);
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u1(-2.0, 2.0), u2(0.2, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector x = vec({u1(rng), u2(rng)});
    const Covector a = random_covector(rng, 2);
    const PhaseVelocity g = spray_cotangent(rf, x, a);
    const PhaseVelocity p = spray_product(f, {x, a});
    worst = std::max(worst, std::sqrt((g.dx - p.dx).squaredNorm() + (g.da - p.da).squaredNorm()));
  }
  rec.value("max_diff", worst);
  rec.check(worst <= 1e-6, "spray mismatch above 1e-6");
  return rec.finish();
}

/// 6. Hyperbolic E curves from (0,1) lie on circles centred on the x1-axis;
/// elapsed time matches the classical distance.
inline CriterionResult scenario_hyperbolic() {
  using namespace scenario_detail;
  Recorder rec(6, "hyperbolic");
  const FinslerField f = FinslerField::quasi_hyperbolic(AsymNorm::euclidean());
  const Vector x0 = vec({0.0, 1.0});
  double residual = 0.0, center_err = 0.0, worst_gap = 0.0;
  for (double deg : {-150.0, -120.0, -60.0, -30.0, 0.0, 30.0, 60.0, 120.0, 150.0}) {
    const double th = deg * kPi / 180.0;
    const Covector a = covec({std::cos(th), std::sin(th)});
    const HyperbolicCircle c = hyperbolic_reference(x0, a, 5.0);
    residual = std::max(residual, c.residual);
    center_err = std::max({center_err, std::abs(c.fit_center - c.center), std::abs(c.fit_radius - c.radius)});
    const Trajectory tr = integrate_E(f, {x0, a}, 0.0, 4.0);
    for (double T : {0.5, 1.0, 2.0, 4.0}) {
      const double d = hyperbolic_distance(x0, tr.state_at(T).x);
      worst_gap = std::max(worst_gap, std::abs(d - T) / T);
    }
  }
  rec.value("max_circle_residual", residual);
  rec.value("max_center_radius_err", center_err);
  rec.value("max_rel_distance_gap", worst_gap);
  rec.check(residual <= 1e-4, "circle residual above 1e-4");
  rec.check(center_err <= 1e-4, "fitted circle differs from the predicted one");
  rec.check(worst_gap <= kCertifyBelow, "elapsed time differs from the classical distance");
  return rec.finish();
}

struct OracleCase {
  std::string field;
  Vector p, q;
  double length = 0.0;     // Finsler length of the E curve
  double reference = 0.0;  // independent closed-form distance
  double endpoint_err = 0.0;
  Certificate cert;
};

/// Oracle windows used by the acceptance pairs: 301^2 nodes from (-1.5, 0.2).
/// The hexagon grid uses cells of aspect 2/sqrt 3 so that the hexagon's
/// preferred directions are grid directions.
inline GridOracle hexagon_oracle_grid(int n = 301, int stencil = 16) {
  const double dy = 0.02 / std::sqrt(3.0) * 300.0 / (n - 1);
  return build_grid(FinslerField::quasi_hyperbolic(hexagon_norm()), vec({-1.5, 0.2}),
                    vec({1.5, 0.2 + dy * (n - 1)}), n, stencil);
}

inline GridOracle hyperbolic_oracle_grid(int n = 301, int stencil = 16) {
  return build_grid(FinslerField::quasi_hyperbolic(AsymNorm::euclidean()), vec({-1.5, 0.2}), vec({1.5, 3.2}), n,
                    stencil);
}

/// E curve from p to q in the hexagon field: closed-form start, numeric flow.
inline OracleCase hexagon_oracle_case(const GridOracle& g, const Vector& p, const Vector& q) {
  const FinslerField f = FinslerField::quasi_hyperbolic(hexagon_norm());
  const HexagonConnection conn = connect_hexagon(p, q);
  const Trajectory tr = integrate_E(f, conn.start, 0.0, conn.length);
  OracleCase c;
  c.field = "hexagon";
  c.p = p;
  c.q = q;
  c.length = path_length(f, tr);
  c.reference = conn.length;
  c.endpoint_err = (tr.back().z.x - q).norm();
  c.cert = certify_length(c.length, p, q, g);
  return c;
}

/// Start covector of the hyperbolic geodesic from p to q (C0 = 1) and the
/// travel direction at q.
inline std::pair<CotangentState, Vector> hyperbolic_start(const Vector& p, const Vector& q) {
  if (p(0) == q(0)) {
    const double up = q(1) > p(1) ? 1.0 : -1.0;
    return {{p, covec({0.0, up / p(1)})}, vec({0.0, up})};
  }
  const double c = (q.squaredNorm() - p.squaredNorm()) / (2.0 * (q(0) - p(0)));
  const double sgn = p(0) < q(0) ? 1.0 : -1.0;  // clockwise when moving right
  auto tangent = [&](const Vector& z) {
    const Vector r = z - vec({c, 0.0});
    return Vector(sgn * vec({r(1), -r(0)}) / r.norm());
  };
  const Vector tp = tangent(p);
  return {{p, covec({tp(0), tp(1)}) / p(1)}, tangent(q)};
}

inline OracleCase hyperbolic_oracle_case(const GridOracle& g, const Vector& p, const Vector& q) {
  const FinslerField f = FinslerField::quasi_hyperbolic(AsymNorm::euclidean());
  const auto [z0, tq] = hyperbolic_start(p, q);
  IntegrationOptions o;
  o.stop_event = scenario_detail::passes_point(q, tq);
  const double d = hyperbolic_distance(p, q);
  const Trajectory tr = integrate_E(f, z0, 0.0, 2.0 * d + 1.0, o);
  OracleCase c;
  c.field = "hyperbolic";
  c.p = p;
  c.q = q;
  c.length = path_length(f, tr);
  c.reference = d;
  c.endpoint_err = (tr.back().z.x - q).norm();
  c.cert = certify_length(c.length, p, q, g);
  return c;
}

/// Grid-node index pairs (i_p, j_p, i_q, j_q) of the acceptance pairs.
inline const std::vector<std::array<int, 4>>& hexagon_oracle_pairs() {
  static const std::vector<std::array<int, 4>> v = {
      {50, 69, 250, 69}, {100, 60, 270, 120}, {150, 20, 150, 150}, {250, 100, 50, 40}, {30, 30, 180, 200}};
  return v;
}

inline const std::vector<std::array<int, 4>>& hyperbolic_oracle_pairs() {
  static const std::vector<std::array<int, 4>> v = {
      {50, 80, 250, 80}, {100, 60, 270, 120}, {150, 20, 150, 150}, {250, 100, 50, 40}, {30, 30, 180, 200}};
  return v;
}

namespace scenario_detail {

inline void oracle_block(Recorder& rec, const std::string& tag, const GridOracle& g,
                         const std::vector<std::array<int, 4>>& pairs,
                         const std::function<OracleCase(const GridOracle&, const Vector&, const Vector&)>& run) {
  double gap_lo = std::numeric_limits<double>::infinity(), gap_hi = -gap_lo, ref_err = 0.0, end_err = 0.0;
  for (const auto& [ip, jp, iq, jq] : pairs) {
    const Vector p = g.position(static_cast<std::size_t>(ip + g.n * jp));
    const Vector q = g.position(static_cast<std::size_t>(iq + g.n * jq));
    const OracleCase c = run(g, p, q);
    gap_lo = std::min(gap_lo, c.cert.gap);
    gap_hi = std::max(gap_hi, c.cert.gap);
    ref_err = std::max(ref_err, std::abs(c.length - c.reference) / c.reference);
    end_err = std::max(end_err, c.endpoint_err);
    rec.check(c.cert.pass, tag + " pair outside [-0.1%, +3%]");
  }
  rec.value(tag + ".min_gap", gap_lo);
  rec.value(tag + ".max_gap", gap_hi);
  rec.value(tag + ".length_vs_closed_form", ref_err);
  rec.value(tag + ".endpoint_err", end_err);
  rec.check(end_err <= 1e-6, tag + " curve misses its target");
  rec.check(ref_err <= 1e-6, tag + " length differs from the closed form");
}

}  // namespace scenario_detail

/// 7. Dijkstra distance vs E-curve length on 301^2 grids, 16-direction stencil.
inline CriterionResult scenario_oracle(bool hexagon = true, bool hyperbolic = true) {
  using namespace scenario_detail;
  Recorder rec(7, hexagon && hyperbolic ? "oracle" : (hexagon ? "oracle-hexagon" : "oracle-hyperbolic"));
  if (hexagon) oracle_block(rec, "hexagon", hexagon_oracle_grid(), hexagon_oracle_pairs(), hexagon_oracle_case);
  if (hyperbolic) {
    oracle_block(rec, "hyperbolic", hyperbolic_oracle_grid(), hyperbolic_oracle_pairs(), hyperbolic_oracle_case);
  }
  const double s = seconds_since(rec.t0);
  rec.check(s < 60.0, "runtime above 60 s");
  return rec.finish();
}

/// True when y and z lie on one face of a polygonal unit sphere.
inline bool same_face(const PolyhedralNorm& poly, double factor, const Vector& y, const Vector& z) {
  const Point2 a = as_point(y) / factor, b = as_point(z) / factor;
  const double sa = poly.eval(a), sb = poly.eval(b);
  if (sa <= 0.0 || sb <= 0.0) return false;
  for (const auto& nrm : poly.face_normals()) {
    if (std::abs(nrm.dot(a) / sa - 1.0) < 1e-9 && std::abs(nrm.dot(b) / sb - 1.0) < 1e-9) return true;
  }
  return false;
}

/// 8. Euclidean passes with c = 1, the hexagon fails with a same-face
/// witness for every c tried, S_e passes with a bisected c > 0.
inline CriterionResult scenario_strong_convexity() {
  using namespace scenario_detail;
  Recorder rec(8, "strong-convexity");
  const auto eu = check_strong_convexity(AsymNorm::euclidean(), 1.0, 10000);
  rec.value("euclidean.worst_margin", eu.worst_margin);
  rec.check(eu.pass, "euclidean fails with c = 1");

  const AsymNorm hex = hexagon_norm();
  const auto* poly = hex.as<PolyhedralNorm>();
  for (double c : {1.0, 1e-2, 1e-4, 1e-6}) {
    const auto rep = check_strong_convexity(hex, c, 10000);
    const bool witness = !rep.pass && same_face(*poly, hex.factor(), rep.y, rep.z);
    rec.check(witness, "hexagon lacks a same-face witness at c = " + format_double(c));
    if (c == 1e-6) rec.value("hexagon.witness_margin", rep.worst_margin);
  }

  const auto se = strong_convexity_constant(se_norm(), 10000);
  rec.value("se.c", se.c);
  rec.value("se.worst_margin", se.report.worst_margin);
  rec.check(se.c > 0.0 && se.report.pass, "S_e has no positive constant");
  return rec.finish();
}

/// 9. (C1 x1 + C2, C1 x2, alpha) maps E curves of the QH plane to E curves.
inline CriterionResult scenario_affine_symmetry() {
  using namespace scenario_detail;
  Recorder rec(9, "affine-symmetry");
  const std::vector<std::pair<std::string, FinslerField>> fields = {
      {"hexagon", FinslerField::quasi_hyperbolic(hexagon_norm())},
      {"se", FinslerField::quasi_hyperbolic(se_norm())},
      {"hyperbolic", FinslerField::quasi_hyperbolic(AsymNorm::euclidean())},
  };
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> uc1(0.5, 2.0), uc2(-2.0, 2.0);
  for (const auto& [name, f] : fields) {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double C1 = uc1(rng), C2 = uc2(rng);
      const CotangentState z0 = random_state(rng, -1.0, 1.0, 0.5, 2.0);
      auto map = [&](const CotangentState& z) {
        return CotangentState{vec({C1 * z.x(0) + C2, C1 * z.x(1)}), z.alpha};
      };
      const Trajectory a = integrate_E(f, z0, 0.0, 1.0);
      const Trajectory b = integrate_E(f, map(z0), 0.0, 1.0);
      const auto [dx, da] = deviation(a, [&](double t) { return b.state_at(t); }, map);
      worst = std::max({worst, dx, da});
    }
    rec.value(name + ".max_dev", worst);
    rec.check(worst <= 1e-6, name + " deviation above 1e-6");
  }
  return rec.finish();
}

/// 10. k1 = 2, k2 = 1/2 against a brute-force argmax over 1e5 boundary points.
inline CriterionResult scenario_se_thresholds() {
  using namespace scenario_detail;
  Recorder rec(10, "se-thresholds");
  const AsymNorm n = se_norm();
  const SeThresholds th = se_thresholds();
  rec.value("k1", th.k1);
  rec.value("k2", th.k2);
  rec.check(std::abs(th.k1 - 2.0) <= 1e-12 && std::abs(th.k2 - 0.5) <= 1e-12, "analytic thresholds off");

  constexpr int kSamples = 100000;
  std::vector<Point2> pts(kSamples);
  for (int i = 0; i < kSamples; ++i) pts[i] = as_point(boundary_point(n, kTwoPi * i / kSamples));
  auto nearest = [&](const Point2& c) {
    int best = 0;
    for (int i = 1; i < kSamples; ++i) {
      if ((pts[i] - c).squaredNorm() < (pts[best] - c).squaredNorm()) best = i;
    }
    return best;
  };
  auto argmax = [&](const Point2& a) {
    int best = 0;
    for (int i = 1; i < kSamples; ++i) {
      if (a.dot(pts[i]) > a.dot(pts[best])) best = i;
    }
    return best;
  };
  const int top = nearest({0.0, 1.0}), right = nearest({1.0, 0.0});
  // k1: smallest slope at which (0,1) wins; k2: largest slope at which (1,0) wins
  double lo = 0.5, hi = 10.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (argmax({1.0, mid}) == top ? hi : lo) = mid;
  }
  const double k1 = hi;
  lo = 0.0;
  hi = 2.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (argmax({1.0, mid}) == right ? lo : hi) = mid;
  }
  const double k2 = lo;
  rec.value("k1_sweep", k1);
  rec.value("k2_sweep", k2);
  rec.check(std::abs(k1 - th.k1) <= 1e-4, "sweep k1 differs by more than 1e-4");
  rec.check(std::abs(k2 - th.k2) <= 1e-4, "sweep k2 differs by more than 1e-4");

  // support set jumps onto / off the corners across the thresholds
  auto is_corner = [&](const Covector& a) {
    const auto rs = regimes_at(n, a);
    return rs.size() == 1 && rs.front().kind == RegimeKind::Corner;
  };
  const bool jumps = is_corner(covec({1.0, th.k1 + 1e-6})) && !is_corner(covec({1.0, th.k1 - 1e-6})) &&
                     is_corner(covec({1.0, th.k2 - 1e-6})) && !is_corner(covec({1.0, th.k2 + 1e-6}));
  rec.check(jumps, "support does not jump at the thresholds");
  return rec.finish();
}

/// 11. (x0, lambda alpha0) gives (x(t), lambda alpha(t)).
inline CriterionResult scenario_fiber_scaling() {
  using namespace scenario_detail;
  Recorder rec(11, "fiber-scaling");
  const std::vector<std::pair<std::string, FinslerField>> fields = {
      {"hexagon", FinslerField::quasi_hyperbolic(hexagon_norm())},
      {"se", FinslerField::quasi_hyperbolic(se_norm())},
      {"hyperbolic", FinslerField::quasi_hyperbolic(AsymNorm::euclidean())},
      {"riemannian_hyperbolic", FinslerField(RiemannianField::hyperbolic())},
  };
  std::mt19937_64 rng(1111);
  for (const auto& [name, f] : fields) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      const CotangentState z0 = random_state(rng, -1.0, 1.0, 0.5, 2.0);
      const Trajectory base = integrate_E(f, z0, 0.0, 1.0);
      for (double lambda : {0.1, 3.0, 10.0}) {
        const Trajectory scaled = integrate_E(f, {z0.x, lambda * z0.alpha}, 0.0, 1.0);
        const auto [dx, da] = deviation(
            base,
            [&](double t) {
              CotangentState z = scaled.state_at(t);
              z.alpha /= lambda;
              return z;
            },
            [](const CotangentState& z) { return z; });
        worst = std::max({worst, dx, da});
      }
    }
    rec.value(name + ".max_dev", worst);
    rec.check(worst <= 1e-8, name + " deviation above 1e-8");
  }
  return rec.finish();
}

struct ScenarioEntry {
  std::string name;
  std::function<CriterionResult()> run;
};

/// Registered scenarios; the first eleven are the acceptance criteria in order.
inline const std::vector<ScenarioEntry>& scenario_registry() {
  static const std::vector<ScenarioEntry> v = {
      {"fenchel", scenario_fenchel},
      {"fundamental", scenario_fundamental},
      {"hexagon-switching", scenario_hexagon_switching},
      {"hamiltonian", scenario_hamiltonian},
      {"spray", scenario_spray},
      {"hyperbolic", scenario_hyperbolic},
      {"oracle", [] { return scenario_oracle(true, true); }},
      {"strong-convexity", scenario_strong_convexity},
      {"affine-symmetry", scenario_affine_symmetry},
      {"se-thresholds", scenario_se_thresholds},
      {"fiber-scaling", scenario_fiber_scaling},
      {"oracle-hexagon", [] { return scenario_oracle(true, false); }},
      {"oracle-hyperbolic", [] { return scenario_oracle(false, true); }},
  };
  return v;
}

inline constexpr std::size_t kAcceptanceCount = 11;

/// Runs one scenario by name; "all" runs the acceptance set. Library errors
/// inside a scenario count as failures. Throws UnknownScenario.
inline std::vector<CriterionResult> run_scenario(const std::string& name) {
  const auto& reg = scenario_registry();
  auto guarded = [](const ScenarioEntry& e, int id) {
    try {
      return e.run();
    } catch (const Error& err) {
      CriterionResult r;
      r.id = id;
      r.scenario = e.name;
      r.note = std::string(to_string(err.code())) + ": " + err.what();
      return r;
    }
  };
  std::vector<CriterionResult> out;
  if (name == "all") {
    for (std::size_t i = 0; i < kAcceptanceCount; ++i) out.push_back(guarded(reg[i], static_cast<int>(i + 1)));
    return out;
  }
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (reg[i].name == name) {
      out.push_back(guarded(reg[i], i < kAcceptanceCount ? static_cast<int>(i + 1) : 7));
      return out;
    }
  }
  std::string known;
  for (const auto& e : reg) known += (known.empty() ? "" : ", ") + e.name;
  fail(ErrorCode::UnknownScenario, "unknown scenario '" + name + "' (all, " + known + ")");
}

}  // namespace cfinsler
