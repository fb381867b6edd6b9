#pragma once

namespace nhgeo {

/// Principal-value exponential integral Ei(x), x != 0.
/// Throws std::overflow_error beyond the double range (x > ~709.78).
double exp_integral_ei(double x);

/// exp(x) Ei(-x) - exp(-x) Ei(x) for x >= 0, evaluated without overflow (value 0 at x = 0).
double ei_kernel(double x);

}  // namespace nhgeo
