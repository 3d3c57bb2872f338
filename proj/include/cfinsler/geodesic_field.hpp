#pragma once

// The extended geodesic field E on the slit cotangent bundle and its
// Hamiltonian. With y* a unit maximizer of alpha in F(x, .):
//   dx = y*,   da = H * d_hF(x, y*),   H = alpha(y*) = F*(x, alpha).

#include "cfinsler/finsler_field.hpp"

namespace cfinsler {

struct CotangentState {
  Vector x;
  Covector alpha;
};

/// H_u(x, alpha) = alpha(X_u(x)).
inline double hamiltonian(const FinslerField& f, const Vector& x, const Covector& alpha, const Vector& u) {
  return pair(alpha, unit_vector(f, x, u));
}

struct MaxHamiltonian {
  double value = 0.0;
  SupportSet support;
};

inline MaxHamiltonian max_hamiltonian(const FinslerField& f, const Vector& x, const Covector& alpha) {
  const AsymNorm n = f.norm_at(x);
  return {dual_eval(n, alpha), support_set(n, alpha)};
}

/// Phase velocity of E for the unit control y (|y|_F = 1 at x).
inline PhaseVelocity velocity_for_control(const FinslerField& f, const CotangentState& s, const Vector& y) {
  const double h = pair(s.alpha, y);
  return {y, h * horizontal_derivative(f, s.x, y)};
}

/// E restricted to a fixed control regime (smoothly extended past its cone).
inline PhaseVelocity regime_velocity(const FinslerField& f, const CotangentState& s, const Regime& r) {
  return velocity_for_control(f, s, regime_point(f.norm_at(s.x), r, s.alpha));
}

/// Set-valued E on a polygon face: the face plus both extreme velocities.
struct FaceSelection {
  SupportFace face;
  PhaseVelocity from;
  PhaseVelocity to;
};

using ExtendedValue = std::variant<PhaseVelocity, FaceSelection>;

inline ExtendedValue extended_field(const FinslerField& f, const CotangentState& s) {
  if (s.alpha.norm() == 0.0) fail(ErrorCode::ZeroCovector, "extended field on the zero section");
  const auto sup = support_set(f.norm_at(s.x), s.alpha);
  if (const auto* p = std::get_if<SupportPoint>(&sup)) return velocity_for_control(f, s, p->v);
  const auto& face = std::get<SupportFace>(sup);
  return FaceSelection{face, velocity_for_control(f, s, face.from), velocity_for_control(f, s, face.to)};
}

/// G = F* . E for strictly convex fields (single-valued).
inline PhaseVelocity spray_product(const FinslerField& f, const CotangentState& s) {
  const auto e = extended_field(f, s);
  const auto* v = std::get_if<PhaseVelocity>(&e);
  if (!v) fail(ErrorCode::NotStrictlyConvex, "F*.E is set-valued on a polygon face");
  const double fs = dual_eval(f.norm_at(s.x), s.alpha);
  return {fs * v->dx, fs * v->da};
}

}  // namespace cfinsler
