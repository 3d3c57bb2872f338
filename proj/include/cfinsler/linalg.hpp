#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <numbers>

namespace cfinsler {

// Tangent vectors are columns, covectors are rows. Keeping them as distinct
// Eigen types means a covector can never be passed where a vector is expected.
using Vector = Eigen::VectorXd;
using Covector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;
using Point2 = Eigen::Vector2d;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Covector covec(std::initializer_list<double> xs) {
  Covector a(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) a(i++) = x;
  return a;
}

/// Natural pairing alpha(y).
inline double pair(const Covector& alpha, const Vector& y) { return (alpha * y)(0); }

inline double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }
inline double cross2(const Point2& a, const Point2& b) { return cross2(a.x(), a.y(), b.x(), b.y()); }

inline Point2 as_point(const Vector& y) { return {y(0), y(1)}; }
inline Point2 as_point(const Covector& a) { return {a(0), a(1)}; }
inline Vector as_vector(const Point2& p) { return vec({p.x(), p.y()}); }
inline Covector as_covector(const Point2& p) { return covec({p.x(), p.y()}); }

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [base, base + 2pi).
inline double wrap_angle(double theta, double base = 0.0) {
  double t = std::fmod(theta - base, kTwoPi);
  if (t < 0) t += kTwoPi;
  return base + t;
}

}  // namespace cfinsler
