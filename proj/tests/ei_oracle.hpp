#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

// Power series for Ei in 160-digit arithmetic; the alternating sum at x = -100 loses about 90 digits.
using ei_big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160>>;

inline ei_big ei_oracle_big(const ei_big& x) {
  ei_big term = 1;
  ei_big sum = 0;
  const ei_big stop("1e-120");
  for (int n = 1; n < 4000; ++n) {
    term *= x / n;
    const ei_big add = term / n;
    sum += add;
    if (n > abs(x) && abs(add) < stop) break;
  }
  return boost::math::constants::euler<ei_big>() + log(abs(x)) + sum;
}

inline double ei_oracle(double x) { return static_cast<double>(ei_oracle_big(ei_big(x))); }

// exp(x) Ei(-x) - exp(-x) Ei(x) without cancellation.
inline double ei_kernel_oracle(double xd) {
  const ei_big x = xd;
  return static_cast<double>(exp(x) * ei_oracle_big(-x) - exp(-x) * ei_oracle_big(x));
}
