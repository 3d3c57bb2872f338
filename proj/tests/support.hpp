#pragma once

#include "cfinsler/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

#include <gtest/gtest.h>

namespace cfinsler::testing {

// Runs fn and reports whether it threw an Error with the given code.
template <class Fn>
::testing::AssertionResult throws_code(Fn&& fn, ErrorCode code) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == code) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "threw " << to_string(e.code()) << " (" << e.what() << ")";
  }
  return ::testing::AssertionFailure() << "did not throw " << to_string(code);
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline const double kSqrt3 = std::sqrt(3.0);

}  // namespace cfinsler::testing

#define EXPECT_CODE(stmt, code) EXPECT_TRUE(::cfinsler::testing::throws_code([&] { (void)(stmt); }, ::cfinsler::ErrorCode::code))
