#pragma once

// Fields of asymmetric norms x -> F(x, .) over a single chart box.

#include "cfinsler/asym_norm.hpp"

#include <functional>
#include <random>

namespace cfinsler {

/// Open box in R^n with an optional extra constraint. The constraint returns
/// a signed margin: positive strictly inside.
struct ChartDomain {
  Vector lower;
  Vector upper;
  std::function<double(const Vector&)> constraint;
  double safety = 1e-9;

  static ChartDomain whole(int n) {
    const double inf = std::numeric_limits<double>::infinity();
    return {Vector::Constant(n, -inf), Vector::Constant(n, inf), {}, 1e-9};
  }
  static ChartDomain upper_half_plane() {
    ChartDomain d = whole(2);
    d.lower(1) = 0.0;
    return d;
  }
  static ChartDomain box(Vector lo, Vector hi) {
    if (lo.size() != hi.size() || lo.size() < 1) fail(ErrorCode::InvalidArgument, "box bounds of unequal dimension");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (!(lo(i) < hi(i))) fail(ErrorCode::InvalidArgument, "empty box domain");
    }
    return {std::move(lo), std::move(hi), {}, 1e-9};
  }

  int dimension() const { return static_cast<int>(lower.size()); }

  /// Signed distance-like margin; the point is admissible iff margin > safety.
  double margin(const Vector& x) const {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      m = std::min({m, x(i) - lower(i), upper(i) - x(i)});
    }
    if (constraint) m = std::min(m, constraint(x));
    return m;
  }
  bool contains(const Vector& x) const { return x.size() == lower.size() && x.allFinite() && margin(x) > safety; }
};

/// F(x, y) = F_e(y) / x2 on the upper half-plane.
struct QuasiHyperbolicField {
  AsymNorm base;
};

struct ConstantField {
  AsymNorm norm;
  ChartDomain domain;
};

/// F(x, y) = sqrt(y^T g(x) y) with closed-form partials d_i g.
struct RiemannianField {
  std::function<Matrix(const Vector&)> metric;
  std::function<std::vector<Matrix>(const Vector&)> partials;
  ChartDomain domain;
  std::string name;

  /// g = I / (x2)^2 on the upper half-plane.
  static RiemannianField hyperbolic() {
    RiemannianField f;
    f.metric = [](const Vector& x) -> Matrix { return Matrix::Identity(2, 2) / (x(1) * x(1)); };
    f.partials = [](const Vector& x) -> std::vector<Matrix> {
      return {Matrix::Zero(2, 2), Matrix(-2.0 * Matrix::Identity(2, 2) / (x(1) * x(1) * x(1)))};
    };
    f.domain = ChartDomain::upper_half_plane();
    f.name = "riemannian_hyperbolic";
    return f;
  }
  static RiemannianField euclidean(int n = 2) {
    RiemannianField f;
    f.metric = [n](const Vector&) -> Matrix { return Matrix::Identity(n, n); };
    f.partials = [n](const Vector&) { return std::vector<Matrix>(n, Matrix::Zero(n, n)); };
    f.domain = ChartDomain::whole(n);
    f.name = "riemannian_euclidean";
    return f;
  }
};

class FinslerField {
 public:
  using Rep = std::variant<QuasiHyperbolicField, ConstantField, RiemannianField>;

  FinslerField(QuasiHyperbolicField f) : rep_(std::move(f)), domain_(ChartDomain::upper_half_plane()) {
    if (std::get<QuasiHyperbolicField>(rep_).base.dimension() != 2) {
      fail(ErrorCode::InvalidArgument, "quasi-hyperbolic base norm must be planar");
    }
  }
  FinslerField(ConstantField f) : rep_(f), domain_(f.domain) {
    if (f.domain.dimension() != f.norm.dimension()) fail(ErrorCode::InvalidArgument, "domain/norm dimension mismatch");
  }
  FinslerField(RiemannianField f) : rep_(f), domain_(f.domain) {}

  static FinslerField quasi_hyperbolic(AsymNorm base) { return FinslerField(QuasiHyperbolicField{std::move(base)}); }
  static FinslerField constant(AsymNorm n) {
    const int d = n.dimension();
    return FinslerField(ConstantField{std::move(n), ChartDomain::whole(d)});
  }

  const Rep& rep() const { return rep_; }
  const ChartDomain& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&rep_);
  }

  void require_inside(const Vector& x) const {
    if (!domain_.contains(x)) fail(ErrorCode::OutOfDomain, "point outside the chart domain");
  }

  /// The norm F(x, .) as a standalone AsymNorm value.
  AsymNorm norm_at(const Vector& x) const {
    require_inside(x);
    if (const auto* q = as<QuasiHyperbolicField>()) return q->base.scaled(x(1));
    if (const auto* c = as<ConstantField>()) return c->norm;
    return AsymNorm::quadratic(std::get<RiemannianField>(rep_).metric(x));
  }

  /// Whether every F(x, .) has a strictly convex unit ball.
  bool strictly_convex() const {
    if (const auto* q = as<QuasiHyperbolicField>()) return q->base.strictly_convex();
    if (const auto* c = as<ConstantField>()) return c->norm.strictly_convex();
    return true;
  }

 private:
  Rep rep_;
  ChartDomain domain_;
};

inline double field_eval(const FinslerField& f, const Vector& x, const Vector& y) {
  f.require_inside(x);
  if (y.size() != f.dimension()) fail(ErrorCode::InvalidArgument, "tangent vector dimension mismatch");
  if (const auto* q = f.as<QuasiHyperbolicField>()) return eval(q->base, y) / x(1);
  if (const auto* c = f.as<ConstantField>()) return eval(c->norm, y);
  const Matrix g = f.as<RiemannianField>()->metric(x);
  return std::sqrt(std::max(0.0, y.dot(g * y)));
}

/// X_u(x) = u / F(x, u). Throws ZeroControl for u = 0.
inline Vector unit_vector(const FinslerField& f, const Vector& x, const Vector& u) {
  if (u.size() != f.dimension()) fail(ErrorCode::InvalidArgument, "control dimension mismatch");
  if (u.norm() == 0.0) fail(ErrorCode::ZeroControl, "zero control vector");
  return u / field_eval(f, x, u);
}

/// Components dF/dx^i (x, y), closed form for every family.
inline Covector horizontal_derivative(const FinslerField& f, const Vector& x, const Vector& y) {
  f.require_inside(x);
  const int n = f.dimension();
  Covector d = Covector::Zero(n);
  if (const auto* q = f.as<QuasiHyperbolicField>()) {
    d(1) = -eval(q->base, y) / (x(1) * x(1));
  } else if (const auto* r = f.as<RiemannianField>()) {
    const Matrix g = r->metric(x);
    const double fv = std::sqrt(std::max(0.0, y.dot(g * y)));
    if (fv == 0.0) return d;
    const auto dg = r->partials(x);
    for (int i = 0; i < n; ++i) d(i) = y.dot(dg[i] * y) / (2.0 * fv);
  }
  return d;
}

struct FundamentalTensor {
  Matrix g;
  Matrix g_inv;
};

inline FundamentalTensor fundamental_tensor(const RiemannianField& rf, const Vector& x) {
  if (!rf.domain.contains(x)) fail(ErrorCode::OutOfDomain, "point outside the chart domain");
  FundamentalTensor t;
  t.g = rf.metric(x);
  t.g_inv = t.g.llt().solve(Matrix::Identity(t.g.rows(), t.g.cols()));
  return t;
}

struct PhaseVelocity {
  Vector dx;
  Covector da;
};

/// Cogeodesic spray of the quadratic Hamiltonian g^{jk} a_j a_k / 2:
///   dx = g^-1 a,  da_i = (g^-1 a)^T (d_i g) (g^-1 a) / 2.
inline PhaseVelocity spray_cotangent(const RiemannianField& rf, const Vector& x, const Covector& alpha) {
  if (alpha.norm() == 0.0) fail(ErrorCode::ZeroCovector, "spray at the zero covector");
  const auto t = fundamental_tensor(rf, x);
  const Vector w = t.g_inv * alpha.transpose();
  const auto dg = rf.partials(x);
  Covector da(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) da(i) = 0.5 * w.dot(dg[i] * w);
  return {w, da};
}

struct LipschitzConstants {
  double C1 = 0.0;  // sup F*(x, d_hF(x, y)) / F(x, y)^2
  double C2 = 0.0;  // sup 1 / F(x, y)
};

/// Empirical suprema over a grid on the window times the Euclidean unit
/// circle (planar fields) or random unit directions. d_hF is measured in the
/// dual norm of F(x, .).
inline LipschitzConstants lipschitz_constants_report(const FinslerField& f, const Vector& lo, const Vector& hi,
                                                     int per_axis = 21, int directions = 360) {
  const int n = f.dimension();
  if (lo.size() != n || hi.size() != n) fail(ErrorCode::InvalidArgument, "window dimension mismatch");
  LipschitzConstants out;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<Vector> dirs;
  for (int k = 0; k < directions; ++k) {
    if (n == 2) {
      const double th = kTwoPi * k / directions;
      dirs.push_back(vec({std::cos(th), std::sin(th)}));
    } else {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = g(rng);
      dirs.push_back(v / v.norm());
    }
  }
  std::vector<int> idx(n, 0);
  while (true) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = lo(i) + (hi(i) - lo(i)) * idx[i] / std::max(1, per_axis - 1);
    if (!f.domain().contains(x)) fail(ErrorCode::OutOfDomain, "window leaves the chart domain");
    for (const auto& y : dirs) {
      const double fv = field_eval(f, x, y);
      const Covector dh = horizontal_derivative(f, x, y);
      const double dual = dh.norm() == 0.0 ? 0.0 : std::max(dual_eval(f.norm_at(x), dh), dual_eval(f.norm_at(x), -dh));
      out.C1 = std::max(out.C1, dual / (fv * fv));
      out.C2 = std::max(out.C2, 1.0 / fv);
    }
    int i = 0;
    while (i < n && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == n) break;
  }
  return out;
}

struct InvarianceReport {
  bool pass = true;
  double worst = 0.0;
};

/// Checks F(g.x, b y) = F(x, y) for the affine group element g = (a, b)
/// acting by x -> (b x1 + a, b x2). Throws InvalidGroupElement for b <= 0.
inline InvarianceReport invariance_check(const FinslerField& f, double a, double b, int samples,
                                         std::uint64_t seed = 5) {
  if (!f.as<QuasiHyperbolicField>()) fail(ErrorCode::InvalidArgument, "invariance check needs a quasi-hyperbolic field");
  if (!(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) fail(ErrorCode::InvalidGroupElement, "group element needs b > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0), h(0.05, 5.0);
  InvarianceReport rep;
  for (int i = 0; i < samples; ++i) {
    const Vector x = vec({u(rng), h(rng)});
    const Vector y = vec({u(rng), u(rng)});
    const Vector gx = vec({b * x(0) + a, b * x(1)});
    const double lhs = field_eval(f, gx, b * y), rhs = field_eval(f, x, y);
    const double err = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
    rep.worst = std::max(rep.worst, err);
    if (err > 1e-12) rep.pass = false;
  }
  return rep;
}

}  // namespace cfinsler
