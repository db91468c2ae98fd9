// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "doctest.h"
#include "nsfold/errors.hpp"
#include "nsfold/linalg.hpp"
#include "oracles.hpp"

namespace th {

inline nsfold::SquareMatrix M(const oracle::Mat& a) { return nsfold::SquareMatrix::from_rows(a); }
inline nsfold::Vector V(const std::vector<double>& v) { return nsfold::Vector(v); }

inline double max_diff(const nsfold::Vector& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double max_diff(const nsfold::Vector& a, const nsfold::Vector& b) { return max_diff(a, b.std_vector()); }
inline double max_diff(const nsfold::Vector& a, std::initializer_list<double> b) {
  return max_diff(a, std::vector<double>(b));
}

template <class F>
nsfold::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const nsfold::Error& e) {
    return e.code();
  }
  FAIL("expected an nsfold::Error");
  return nsfold::ErrorCode::InvalidArgument;
}

}  // namespace th
