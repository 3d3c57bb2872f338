#include "cfinsler/integrator.hpp"
#include "cfinsler/qh_plane.hpp"
#include "support.hpp"

#include <random>

namespace cf = cfinsler;
using cf::testing::kSqrt3;

namespace {

cf::FinslerField qh_hexagon() { return cf::FinslerField::quasi_hyperbolic(cf::hexagon_norm()); }
cf::FinslerField qh_se() { return cf::FinslerField::quasi_hyperbolic(cf::se_norm()); }

}  // namespace

TEST(HexagonGeodesic, VerticalLine) {
  const auto tr = cf::hexagon_geodesic(cf::vec({0, 1}), cf::covec({0, 1}), -2, 2);
  for (double t : {-2.0, -0.5, 0.0, 1.3, 2.0}) {
    const auto z = tr.state_at(t);
    EXPECT_NEAR(z.x(0), 0.0, 1e-15);
    EXPECT_NEAR(z.x(1), std::exp(t), 1e-12 * std::exp(t));
    EXPECT_NEAR(z.alpha(1), std::exp(-t), 1e-12 * std::exp(-t));
  }
  EXPECT_TRUE(tr.events.empty());
}

TEST(HexagonGeodesic, ConeBoundaryStartSwitchesAtTwoLogTwo) {
  const cf::PolyhedralQHGeodesic g(cf::hexagon_norm(), {cf::vec({0, 1}), cf::covec({1, kSqrt3})}, 0, 0, 3);
  ASSERT_GE(g.switch_times().size(), 1u);
  EXPECT_NEAR(g.switch_times()[0], 2 * std::log(2.0), 1e-14);
  EXPECT_NEAR(g.C0(), kSqrt3, 1e-15);
  // side piece Euclidean length 2 C0 / (sqrt3 alpha1) = 2
  const auto a = g.state_at(0).x, b = g.state_at(2 * std::log(2.0)).x;
  EXPECT_NEAR((b - a).norm(), 2.0 * g.C0() / (kSqrt3 * 1.0), 1e-13);
}

TEST(HexagonGeodesic, SwitchTimeFormulaInVertexRegime) {
  // in the V1 regime with alpha2 >= alpha1/sqrt3: e^{t/2} = (sqrt3 a1 + a2) / (sqrt3 a1)
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> a1(0.2, 2.0), r(1.0 / kSqrt3, kSqrt3);
  for (int i = 0; i < 20; ++i) {
    const double x = a1(rng), y = x * r(rng);
    const cf::PolyhedralQHGeodesic g(cf::hexagon_norm(), {cf::vec({0, 1}), cf::covec({x, y})}, 0, 0, 10);
    ASSERT_EQ(g.pieces().front().vertex, 1);
    EXPECT_NEAR(g.switch_times()[0], 2 * std::log((kSqrt3 * x + y) / (kSqrt3 * x)), 1e-12);
  }
}

TEST(HexagonGeodesic, AgreesWithIntegratorOnRandomStates) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1), h(0.5, 2);
  cf::IntegrationOptions o;
  o.step = 1e-3;
  for (int i = 0; i < 20; ++i) {
    const cf::CotangentState z0{cf::vec({u(rng), h(rng)}), cf::covec({u(rng), u(rng)})};
    const auto exact = cf::PolyhedralQHGeodesic(cf::hexagon_norm(), z0, 0, -5, 5);
    const auto num = cf::integrate_E_through(qh_hexagon(), z0, 0, -5, 5, o);
    double worst = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double t = -5 + 0.05 * k;
      const auto a = exact.state_at(t), b = num.state_at(t);
      worst = std::max(worst, (a.x - b.x).norm() / std::max(1.0, a.x.norm()));
    }
    EXPECT_LT(worst, 1e-5) << z0.x.transpose() << " / " << z0.alpha;
  }
}

TEST(HexagonGeodesic, TraceSidesAreEqualAndPreferred) {
  // alpha1 fixed, alpha2 sweeps all of R: vertical ray, two sides, vertical ray
  for (const double a1 : {1.0, -0.7}) {
    const cf::PolyhedralQHGeodesic g(cf::hexagon_norm(), {cf::vec({0, 1}), cf::covec({a1, 0.2})}, 0, -40, 40);
    const auto sw = g.switch_times();
    ASSERT_EQ(sw.size(), 3u);
    std::vector<double> sides;
    for (std::size_t i = 0; i + 1 < sw.size(); ++i) {
      const cf::Vector a = g.state_at(sw[i]).x, b = g.state_at(sw[i + 1]).x;
      sides.push_back((b - a).norm());
      const cf::Point2 d = cf::as_point(cf::Vector(b - a)).normalized();
      double best = 1.0;
      for (const auto& v : cf::hexagon_norm().as<cf::PolyhedralNorm>()->vertices()) {
        best = std::min(best, std::abs(cf::cross2(d, v.normalized())));
      }
      EXPECT_LT(best, 1e-10);
    }
    EXPECT_NEAR(sides[0], sides[1], 1e-8 * sides[0]);
    EXPECT_NEAR(sides[0], 2 * g.C0() / (kSqrt3 * std::abs(a1)), 1e-8 * sides[0]);
  }
}

TEST(HexagonGeodesic, SampleIncludesSwitches) {
  const auto tr = cf::hexagon_geodesic(cf::vec({0, 1}), cf::covec({1, kSqrt3}), 0, 3, 0.1);
  ASSERT_EQ(tr.events.size(), 2u);
  EXPECT_NEAR(tr.events[0].t, 2 * std::log(2.0), 1e-14);
  EXPECT_NEAR(tr.events[1].t, 4 * std::log(2.0), 1e-14);
  EXPECT_EQ(tr.kind, cf::TrajectoryKind::Analytic);
}

TEST(HexagonGeodesic, Errors) {
  EXPECT_CODE(cf::hexagon_geodesic(cf::vec({0, -1}), cf::covec({0, 1}), 0, 1), OutOfDomain);
  EXPECT_CODE(cf::hexagon_geodesic(cf::vec({0, 1}), cf::covec({0, 0}), 0, 1), ZeroCovector);
  EXPECT_CODE(cf::PolyhedralQHGeodesic(cf::se_norm(), {cf::vec({0, 1}), cf::covec({0, 1})}, 0, 0, 1),
              InvalidArgument);
}

TEST(ConnectHexagon, VerticalSegment) {
  const auto c = cf::connect_hexagon(cf::vec({0, 1}), cf::vec({0, 2}));
  EXPECT_TRUE(c.vertical);
  EXPECT_NEAR(c.length, std::log(2.0), 1e-12);
  EXPECT_LT((c.trajectory.back().z.x - cf::vec({0, 2})).norm(), 1e-12);
}

TEST(ConnectHexagon, SymmetricHalfHexagon) {
  const auto c = cf::connect_hexagon(cf::vec({-1, 1}), cf::vec({1, 1}));
  EXPECT_FALSE(c.vertical);
  EXPECT_NEAR(c.center, 0.0, 1e-14);
  EXPECT_LT((c.trajectory.back().z.x - cf::vec({1, 1})).norm(), 1e-10);
  EXPECT_NEAR(cf::dual_eval(qh_hexagon().norm_at(c.start.x), c.start.alpha), 1.0, 1e-14);
  EXPECT_NEAR(cf::path_length(qh_hexagon(), c.trajectory), c.length, 1e-6);
  // apex of the trace sits above the centre
  double top = 0.0, top_x = 0.0;
  for (const auto& p : c.trajectory.pieces) {
    for (const auto& s : p.samples) {
      if (s.z.x(1) > top) top = s.z.x(1), top_x = s.z.x(0);
    }
  }
  EXPECT_NEAR(top, c.scale, 1e-9);
  EXPECT_LT(std::abs(top_x), c.scale / 2 + 1e-9);
}

TEST(ConnectHexagon, ShootingCrossCheck) {
  // shooting on alpha2(0) with alpha1 fixed: only the closed-form start hits q
  const cf::Vector p = cf::vec({-0.5, 0.6}), q = cf::vec({0.7, 1.1});
  const auto c = cf::connect_hexagon(p, q);
  const double a1 = c.start.alpha(0);
  auto miss = [&](double a2) {
    const cf::PolyhedralQHGeodesic g(cf::hexagon_norm(), {p, cf::covec({a1, a2})}, 0, 0, 20);
    double best = 1e300;
    for (int k = 1; k <= 20000; ++k) best = std::min(best, (g.state_at(k * 1e-3).x - q).norm());
    return best;
  };
  EXPECT_LT(miss(c.start.alpha(1)), 1e-3);
  EXPECT_GT(miss(c.start.alpha(1) + 0.2), 1e-2);
  EXPECT_GT(miss(c.start.alpha(1) - 0.2), 1e-2);
}

TEST(ConnectHexagon, ReachesTargetOnRandomPairs) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-2, 2), h(0.3, 2);
  for (int i = 0; i < 20; ++i) {
    const cf::Vector p = cf::vec({u(rng), h(rng)}), q = cf::vec({u(rng), h(rng)});
    const auto c = cf::connect_hexagon(p, q);
    EXPECT_LT((c.trajectory.back().z.x - q).norm(), 1e-9);
    EXPECT_NEAR(cf::path_length(qh_hexagon(), c.trajectory), c.length, 1e-6 * c.length);
  }
}

TEST(ConnectHexagon, ConvergesToSegmentAlongPreferredDirection) {
  const cf::Vector p = cf::vec({0, 1});
  const cf::Vector dir = cf::vec({kSqrt3 / 2, 0.5});
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto c = cf::connect_hexagon(p, p + eps * dir);
    double dev = 0.0;
    for (const auto& piece : c.trajectory.pieces) {
      for (const auto& s : piece.samples) {
        dev = std::max(dev, std::abs(cf::cross2(cf::as_point(cf::Vector(s.z.x - p)), cf::as_point(dir))));
      }
    }
    EXPECT_LT(dev, 1e-9) << eps;
    EXPECT_NEAR(c.length, cf::polyline_length(qh_hexagon(), {p, p + eps * dir}), 1e-9);
  }
}

TEST(ConnectHexagon, Errors) {
  EXPECT_CODE(cf::connect_hexagon(cf::vec({0, 1}), cf::vec({0, 1})), IdenticalPoints);
  EXPECT_CODE(cf::connect_hexagon(cf::vec({0, 1}), cf::vec({0, -1})), OutOfDomain);
}

TEST(SeNorm, CornersAndThresholds) {
  const auto n = cf::se_norm();
  const auto* c = n.as<cf::ArcCompositeNorm>();
  std::vector<cf::Point2> corners;
  for (int k = 0; k < c->size(); ++k) {
    if (c->has_corner(k)) corners.push_back(c->arc_start(k));
  }
  ASSERT_EQ(corners.size(), 4u);
  for (const auto& want : {cf::Point2(1, 0), cf::Point2(0, 1), cf::Point2(-1, 0), cf::Point2(0, -1)}) {
    bool found = false;
    for (const auto& p : corners) found = found || (p - want).norm() < 1e-12;
    EXPECT_TRUE(found) << want.transpose();
  }
  const auto th = cf::se_thresholds();
  EXPECT_NEAR(th.k1, 2.0, 1e-12);
  EXPECT_NEAR(th.k2, 0.5, 1e-12);
}

TEST(SeNorm, ThresholdsMatchBoundaryArgmax) {
  // support point jumps across the corner (0, 1) at alpha2 / alpha1 = k1
  const auto n = cf::se_norm();
  auto argmax = [&](const cf::Covector& a) {
    cf::Vector best;
    double bv = -1e300;
    for (int i = 0; i < 100000; ++i) {
      const cf::Vector p = cf::boundary_point(n, cf::kTwoPi * i / 100000);
      if (cf::pair(a, p) > bv) bv = cf::pair(a, p), best = p;
    }
    return best;
  };
  EXPECT_LT((argmax(cf::covec({1, 2.01})) - cf::vec({0, 1})).norm(), 1e-4);
  EXPECT_GT((argmax(cf::covec({1, 1.9})) - cf::vec({0, 1})).norm(), 1e-3);
  EXPECT_LT((argmax(cf::covec({1, 0.49})) - cf::vec({1, 0})).norm(), 1e-4);
  EXPECT_GT((argmax(cf::covec({1, 0.6})) - cf::vec({1, 0})).norm(), 1e-3);
}

TEST(SeGeodesic, VerticalLine) {
  const auto tr = cf::se_geodesic(cf::vec({0.5, 1}), cf::covec({0, 1}), 0, 2);
  EXPECT_NEAR(tr.back().z.x(0), 0.5, 1e-14);
  EXPECT_NEAR(tr.back().z.x(1), std::exp(2.0), 1e-10);
  EXPECT_NEAR(tr.back().z.alpha(1), std::exp(-2.0), 1e-12);
}

TEST(SeGeodesic, HorizontalRegimeInterval) {
  const auto tr = cf::se_geodesic_through(cf::vec({0, 1}), cf::covec({1, 0}), -0.5, 0.5);
  ASSERT_EQ(tr.pieces.size(), 1u);
  for (double t : {-0.5, -0.2, 0.3, 0.5}) {
    const auto z = tr.state_at(t);
    EXPECT_NEAR(z.x(0), t, 1e-12);
    EXPECT_NEAR(z.x(1), 1.0, 1e-15);
    EXPECT_NEAR(z.alpha(1), -t, 1e-12);
  }
  // slightly longer: the horizontal piece ends at the predicted times
  const auto wide = cf::se_geodesic_through(cf::vec({0, 1}), cf::covec({1, 0}), -1, 1);
  const auto sw = wide.switch_times();
  ASSERT_EQ(sw.size(), 2u);
  EXPECT_NEAR(sw[0], -0.5, 1e-9);
  EXPECT_NEAR(sw[1], 0.5, 1e-9);
}

TEST(SeGeodesic, TypicalPathShape) {
  const auto tr = cf::se_geodesic_through(cf::vec({0, 1}), cf::covec({1, 3}), -2.5, 6);
  std::vector<std::string> ids;
  for (const auto& p : tr.pieces) ids.push_back(cf::regime_id(p.control));
  const std::vector<std::string> want = {"C1", "A0", "C0", "A3", "C3"};
  EXPECT_EQ(ids, want);
  // monotone x1 and unimodal x2
  double prev_x1 = -1e300;
  int rises = 0, falls = 0;
  double prev_x2 = -1;
  bool falling = false;
  for (const auto& p : tr.pieces) {
    for (const auto& s : p.samples) {
      EXPECT_GE(s.z.x(0), prev_x1 - 1e-12);
      prev_x1 = s.z.x(0);
      if (prev_x2 >= 0) {
        if (s.z.x(1) > prev_x2 + 1e-12) {
          ++rises;
          EXPECT_FALSE(falling);
        } else if (s.z.x(1) < prev_x2 - 1e-12) {
          ++falls;
          falling = true;
        }
      }
      prev_x2 = s.z.x(1);
    }
  }
  EXPECT_GT(rises, 0);
  EXPECT_GT(falls, 0);
}

TEST(SeGeodesic, AgreesWithGenericIntegrator) {
  const cf::CotangentState z0{cf::vec({0, 1}), cf::covec({1, 3})};
  const auto a = cf::se_geodesic(z0.x, z0.alpha, 0, 5);
  const auto b = cf::integrate_E(qh_se(), z0, 0, 5);
  for (double t : {0.5, 1.5, 2.5, 4.0, 5.0}) EXPECT_LT((a.state_at(t).x - b.state_at(t).x).norm(), 1e-6) << t;
}

TEST(SeGeodesic, EmpiricalUniqueness) {
  const cf::Vector x0 = cf::vec({0, 1});
  const auto a = cf::integrate_E(qh_se(), {x0, cf::covec({1, 1})}, 0, 1);
  const auto b = cf::integrate_E(qh_se(), {x0, cf::covec({1, 1 + 1e-9})}, 0, 1);
  for (double t : {0.25, 0.5, 1.0}) EXPECT_LT((a.state_at(t).x - b.state_at(t).x).norm(), 1e-5);
}

TEST(SeGeodesic, Errors) {
  EXPECT_CODE(cf::se_geodesic(cf::vec({0, -1}), cf::covec({1, 0}), 0, 1), OutOfDomain);
  EXPECT_CODE(cf::se_geodesic(cf::vec({0, 1}), cf::covec({0, 0}), 0, 1), ZeroCovector);
}

TEST(HyperbolicReference, Examples) {
  auto c = cf::hyperbolic_reference(cf::vec({0, 1}), cf::covec({1, 0}));
  EXPECT_NEAR(c.center, 0.0, 1e-15);
  EXPECT_NEAR(c.radius, 1.0, 1e-15);
  EXPECT_NEAR(c.fit_center, 0.0, 1e-8);
  EXPECT_NEAR(c.fit_radius, 1.0, 1e-8);
  EXPECT_LT(c.residual, 1e-4);
  c = cf::hyperbolic_reference(cf::vec({1, 1}), cf::covec({1, 0}));
  EXPECT_NEAR(c.center, 1.0, 1e-15);
  EXPECT_NEAR(c.radius, 1.0, 1e-15);
  EXPECT_CODE(cf::hyperbolic_reference(cf::vec({0, 1}), cf::covec({0, 1})), VerticalGeodesic);
}

TEST(HyperbolicReference, ElapsedTimeIsHyperbolicDistance) {
  const auto f = cf::FinslerField::quasi_hyperbolic(cf::AsymNorm::euclidean());
  const cf::Vector x0 = cf::vec({0.3, 0.8});
  const auto tr = cf::integrate_E(f, {x0, cf::covec({0.4, -0.9})}, 0, 1.7);
  EXPECT_NEAR(cf::hyperbolic_distance(x0, tr.back().z.x), 1.7, 1e-8);
  EXPECT_NEAR(cf::hyperbolic_distance(cf::vec({0, 1}), cf::vec({0, std::exp(2.0)})), 2.0, 1e-14);
}
