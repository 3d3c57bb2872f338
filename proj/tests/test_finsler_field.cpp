#include "cfinsler/finsler_field.hpp"
#include "cfinsler/qh_plane.hpp"
#include "support.hpp"

#include <random>

namespace cf = cfinsler;
using cf::testing::kSqrt3;

namespace {

cf::FinslerField qh_hexagon() { return cf::FinslerField::quasi_hyperbolic(cf::hexagon_norm()); }
cf::FinslerField euclid() { return cf::FinslerField::constant(cf::AsymNorm::euclidean()); }

cf::Covector fd_horizontal(const cf::FinslerField& f, const cf::Vector& x, const cf::Vector& y, double h = 1e-6) {
  cf::Covector d(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    cf::Vector p = x, m = x;
    p(i) += h;
    m(i) -= h;
    d(i) = (cf::field_eval(f, p, y) - cf::field_eval(f, m, y)) / (2 * h);
  }
  return d;
}

double quad_h(const cf::RiemannianField& rf, const cf::Vector& x, const cf::Covector& a) {
  return 0.5 * (a * cf::fundamental_tensor(rf, x).g_inv * a.transpose())(0);
}

}  // namespace

TEST(FieldEval, Examples) {
  EXPECT_NEAR(cf::field_eval(qh_hexagon(), cf::vec({0, 1}), cf::vec({0, 1})), 1.0, 1e-15);
  EXPECT_NEAR(cf::field_eval(qh_hexagon(), cf::vec({5, 2}), cf::vec({0, 1})), 0.5, 1e-15);
  EXPECT_NEAR(cf::field_eval(euclid(), cf::vec({-7, 3}), cf::vec({3, 4})), 5.0, 1e-15);
}

TEST(FieldEval, OutsideDomainThrows) {
  EXPECT_CODE(cf::field_eval(qh_hexagon(), cf::vec({0, -1}), cf::vec({0, 1})), OutOfDomain);
  EXPECT_CODE(cf::field_eval(qh_hexagon(), cf::vec({0, 0}), cf::vec({0, 1})), OutOfDomain);
  const cf::FinslerField boxed(cf::ConstantField{cf::AsymNorm::euclidean(),
                                                 cf::ChartDomain::box(cf::vec({-1, -1}), cf::vec({1, 1}))});
  EXPECT_CODE(cf::field_eval(boxed, cf::vec({2, 0}), cf::vec({1, 0})), OutOfDomain);
  EXPECT_NEAR(cf::field_eval(boxed, cf::vec({0.5, 0}), cf::vec({1, 0})), 1.0, 1e-15);
}

TEST(FieldEval, NormAtMatchesPointwiseEval) {
  const auto f = cf::FinslerField::quasi_hyperbolic(cf::se_norm());
  const cf::Vector x = cf::vec({0.3, 1.7}), y = cf::vec({-0.4, 0.9});
  EXPECT_NEAR(cf::eval(f.norm_at(x), y), cf::field_eval(f, x, y), 1e-15);
  const cf::FinslerField r(cf::RiemannianField::hyperbolic());
  EXPECT_NEAR(cf::eval(r.norm_at(x), y), cf::field_eval(r, x, y), 1e-15);
}

TEST(UnitVector, Examples) {
  EXPECT_LT((cf::unit_vector(qh_hexagon(), cf::vec({0, 2}), cf::vec({0, 1})) - cf::vec({0, 2})).norm(), 1e-15);
  EXPECT_LT((cf::unit_vector(euclid(), cf::vec({0, 0}), cf::vec({3, 4})) - cf::vec({0.6, 0.8})).norm(), 1e-15);
  EXPECT_LT((cf::unit_vector(qh_hexagon(), cf::vec({0, 1}), cf::vec({kSqrt3, 1})) - cf::vec({kSqrt3 / 2, 0.5})).norm(),
            1e-15);
}

TEST(UnitVector, HasUnitLengthAndRejectsZero) {
  const auto f = cf::FinslerField::quasi_hyperbolic(cf::se_norm());
  const cf::Vector x = cf::vec({1, 0.4});
  EXPECT_NEAR(cf::field_eval(f, x, cf::unit_vector(f, x, cf::vec({0.2, -3}))), 1.0, 1e-14);
  EXPECT_CODE(cf::unit_vector(f, x, cf::vec({0, 0})), ZeroControl);
}

TEST(HorizontalDerivative, Examples) {
  EXPECT_LT((cf::horizontal_derivative(qh_hexagon(), cf::vec({0, 1}), cf::vec({0, 1})) - cf::covec({0, -1})).norm(),
            1e-15);
  EXPECT_LT((cf::horizontal_derivative(qh_hexagon(), cf::vec({0, 2}), cf::vec({0, 1})) - cf::covec({0, -0.25})).norm(),
            1e-15);
  EXPECT_EQ(cf::horizontal_derivative(euclid(), cf::vec({1, 2}), cf::vec({3, 4})).norm(), 0.0);
}

TEST(HorizontalDerivative, MatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2), h(0.3, 3);
  const std::vector<cf::FinslerField> fields = {qh_hexagon(), cf::FinslerField::quasi_hyperbolic(cf::se_norm()),
                                                cf::FinslerField(cf::RiemannianField::hyperbolic())};
  for (const auto& f : fields) {
    for (int i = 0; i < 40; ++i) {
      const cf::Vector x = cf::vec({u(rng), h(rng)}), y = cf::vec({u(rng), u(rng)});
      const cf::Covector fd = fd_horizontal(f, x, y);
      EXPECT_LT((cf::horizontal_derivative(f, x, y) - fd).norm(), 1e-7 * (1 + fd.norm()));
    }
  }
}

TEST(FundamentalTensor, Examples) {
  const auto rh = cf::RiemannianField::hyperbolic();
  const auto t = cf::fundamental_tensor(rh, cf::vec({0, 2}));
  EXPECT_LT(cf::testing::max_abs(t.g - 0.25 * cf::Matrix::Identity(2, 2)), 1e-15);
  EXPECT_LT(cf::testing::max_abs(t.g_inv - 4.0 * cf::Matrix::Identity(2, 2)), 1e-14);
  EXPECT_LT(cf::testing::max_abs(cf::fundamental_tensor(rh, cf::vec({3, 1})).g - cf::Matrix::Identity(2, 2)), 1e-15);
  const auto re = cf::RiemannianField::euclidean(3);
  EXPECT_EQ(cf::testing::max_abs(cf::fundamental_tensor(re, cf::vec({1, 2, 3})).g - cf::Matrix::Identity(3, 3)), 0.0);
  EXPECT_CODE(cf::fundamental_tensor(rh, cf::vec({0, -1})), OutOfDomain);
}

TEST(FundamentalTensor, IsHalfHessianOfFSquared) {
  const cf::FinslerField f(cf::RiemannianField::hyperbolic());
  const cf::Vector x = cf::vec({0.5, 1.5}), y = cf::vec({0.3, -0.7});
  const double h = 1e-4;
  auto f2 = [&](const cf::Vector& v) { return std::pow(cf::field_eval(f, x, v), 2); };
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      cf::Vector ea = cf::Vector::Zero(2), eb = cf::Vector::Zero(2);
      ea(a) = h;
      eb(b) = h;
      const double hess = (f2(y + ea + eb) - f2(y + ea - eb) - f2(y - ea + eb) + f2(y - ea - eb)) / (4 * h * h);
      EXPECT_NEAR(0.5 * hess, cf::fundamental_tensor(*f.as<cf::RiemannianField>(), x).g(a, b), 1e-7);
    }
  }
}

TEST(SprayCotangent, Examples) {
  const auto rh = cf::RiemannianField::hyperbolic();
  auto v = cf::spray_cotangent(rh, cf::vec({0, 1}), cf::covec({1, 0}));
  EXPECT_LT((v.dx - cf::vec({1, 0})).norm(), 1e-15);
  EXPECT_LT((v.da - cf::covec({0, -1})).norm(), 1e-15);
  v = cf::spray_cotangent(rh, cf::vec({0, 2}), cf::covec({0, 1}));
  EXPECT_LT((v.dx - cf::vec({0, 4})).norm(), 1e-14);
  EXPECT_LT((v.da - cf::covec({0, -2})).norm(), 1e-14);
  v = cf::spray_cotangent(cf::RiemannianField::euclidean(), cf::vec({5, 5}), cf::covec({2, -3}));
  EXPECT_LT((v.dx - cf::vec({2, -3})).norm(), 1e-15);
  EXPECT_EQ(v.da.norm(), 0.0);
  EXPECT_CODE(cf::spray_cotangent(rh, cf::vec({0, 1}), cf::covec({0, 0})), ZeroCovector);
}

TEST(SprayCotangent, IsHamiltonianFlowOfQuadraticHamiltonian) {
  // dx = dH/dalpha, dalpha = -dH/dx by central differences
  const auto rh = cf::RiemannianField::hyperbolic();
  const cf::Vector x = cf::vec({0.2, 1.3});
  const cf::Covector a = cf::covec({0.7, -0.4});
  const double h = 1e-6;
  const auto v = cf::spray_cotangent(rh, x, a);
  for (int i = 0; i < 2; ++i) {
    cf::Vector xp = x, xm = x;
    cf::Covector ap = a, am = a;
    xp(i) += h;
    xm(i) -= h;
    ap(i) += h;
    am(i) -= h;
    EXPECT_NEAR(v.dx(i), (quad_h(rh, x, ap) - quad_h(rh, x, am)) / (2 * h), 1e-8);
    EXPECT_NEAR(v.da(i), -(quad_h(rh, xp, a) - quad_h(rh, xm, a)) / (2 * h), 1e-8);
  }
}

TEST(SprayCotangent, ConservesHamiltonianUnderRk4) {
  const auto rh = cf::RiemannianField::hyperbolic();
  cf::Vector x = cf::vec({0, 1});
  cf::Covector a = cf::covec({0.6, 0.8});
  const double h0 = quad_h(rh, x, a), dt = 1e-3;
  for (int k = 0; k < 2000; ++k) {
    const auto k1 = cf::spray_cotangent(rh, x, a);
    const auto k2 = cf::spray_cotangent(rh, x + 0.5 * dt * k1.dx, a + 0.5 * dt * k1.da);
    const auto k3 = cf::spray_cotangent(rh, x + 0.5 * dt * k2.dx, a + 0.5 * dt * k2.da);
    const auto k4 = cf::spray_cotangent(rh, x + dt * k3.dx, a + dt * k3.da);
    x += dt / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
    a += dt / 6 * (k1.da + 2 * k2.da + 2 * k3.da + k4.da);
  }
  EXPECT_NEAR(quad_h(rh, x, a), h0, 1e-10);
  // trace stays on the circle centred at (4/3, 0) through (0, 1)
  EXPECT_NEAR((cf::as_point(x) - cf::Point2(4.0 / 3.0, 0)).norm(), 5.0 / 3.0, 1e-9);
}

TEST(LipschitzConstants, ConstantFieldHasNoHorizontalVariation) {
  const auto r = cf::lipschitz_constants_report(euclid(), cf::vec({-1, -1}), cf::vec({1, 1}), 5, 90);
  EXPECT_EQ(r.C1, 0.0);
  EXPECT_NEAR(r.C2, 1.0, 1e-14);
}

TEST(LipschitzConstants, QuasiHyperbolicEuclideanOnUnitStrip) {
  const auto f = cf::FinslerField::quasi_hyperbolic(cf::AsymNorm::euclidean());
  const auto r = cf::lipschitz_constants_report(f, cf::vec({-1, 1}), cf::vec({1, 2}));
  EXPECT_NEAR(r.C1, 2.0, 1e-12);
  EXPECT_NEAR(r.C2, 2.0, 1e-12);
}

TEST(LipschitzConstants, RiemannianHyperbolicMatchesQuasiHyperbolic) {
  const cf::FinslerField rf(cf::RiemannianField::hyperbolic());
  const auto r = cf::lipschitz_constants_report(rf, cf::vec({-1, 1}), cf::vec({1, 2}), 5, 60);
  EXPECT_NEAR(r.C1, 2.0, 1e-12);
  EXPECT_NEAR(r.C2, 2.0, 1e-12);
}

TEST(LipschitzConstants, WindowOutsideDomainThrows) {
  EXPECT_CODE(cf::lipschitz_constants_report(qh_hexagon(), cf::vec({-1, -1}), cf::vec({1, 1})), OutOfDomain);
}

TEST(Invariance, GroupActionPreservesField) {
  for (const auto& f : {qh_hexagon(), cf::FinslerField::quasi_hyperbolic(cf::se_norm())}) {
    EXPECT_TRUE(cf::invariance_check(f, 0.0, 1.0, 100).pass);
    EXPECT_TRUE(cf::invariance_check(f, 3.0, 2.0, 500).pass);
    EXPECT_TRUE(cf::invariance_check(f, -1.0, 0.5, 500).pass);
  }
}

TEST(Invariance, Errors) {
  EXPECT_CODE(cf::invariance_check(qh_hexagon(), 0.0, 0.0, 10), InvalidGroupElement);
  EXPECT_CODE(cf::invariance_check(qh_hexagon(), 0.0, -2.0, 10), InvalidGroupElement);
  EXPECT_CODE(cf::invariance_check(euclid(), 0.0, 1.0, 10), InvalidArgument);
}
