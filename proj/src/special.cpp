#include "nhgeo/special.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nhgeo {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Positive zero of Ei.
constexpr double kEiRoot = 0.37250741078136663446;

// sum_{n>=1} x^n / (n n!)
double ei_series_tail(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int n = 1; n < 500; ++n) {
    term *= x / n;
    const double add = term / n;
    sum += add;
    if (std::abs(add) <= kEps * std::abs(sum)) break;
  }
  return sum;
}

double ei_series(double x) { return std::numbers::egamma + std::log(std::abs(x)) + ei_series_tail(x); }

// E1(x) for x > 1 by the modified Lentz continued fraction.
double e1_continued_fraction(double x) {
  const double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  return h * std::exp(-x);
}

// sum_n s^n n!/x^n, truncated at the smallest term.
double asymptotic_sum(double x, double s) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 200; ++n) {
    const double next = term * n / x;
    if (next >= term) break;
    term = next;
    sum += (n % 2 == 0 ? 1.0 : s) * term;
    if (term <= kEps * std::abs(sum)) break;
  }
  return sum;
}

double ei_near_root(double x) {
  using boost::math::quadrature::gauss;
  return gauss<double, 20>::integrate([](double t) { return std::exp(t) / t; }, kEiRoot, x);
}

}  // namespace

double exp_integral_ei(double x) {
  if (std::isnan(x)) throw std::domain_error("exp_integral_ei: NaN argument");
  if (x == 0.0) throw std::domain_error("exp_integral_ei: logarithmic singularity at x = 0");
  if (x < 0.0) {
    const double a = -x;
    if (a <= 1.0) return ei_series(x);
    return -e1_continued_fraction(a);
  }
  if (x > std::log(std::numeric_limits<double>::max()) + std::log(x))
    throw std::overflow_error("exp_integral_ei: result exceeds double range");
  if (std::abs(x - kEiRoot) < 0.15) return ei_near_root(x);
  if (x <= 40.0) return ei_series(x);
  const double v = std::exp(x - std::log(x)) * asymptotic_sum(x, 1.0);
  if (!std::isfinite(v)) throw std::overflow_error("exp_integral_ei: result exceeds double range");
  return v;
}

double ei_kernel(double x) {
  if (x < 0.0 || std::isnan(x)) throw std::domain_error("ei_kernel: argument must be non-negative");
  if (x == 0.0) return 0.0;
  if (x > 40.0) {
    // The odd terms of the two asymptotic series cancel.
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 200; ++n) {
      const double next = term * n / x;
      if (next >= term) break;
      term = next;
      if (n % 2 == 0) sum += term;
      if (term <= kEps * sum) break;
    }
    return -2.0 / x * sum;
  }
  if (x <= 1.0) {
    // The logarithms of Ei(x) and Ei(-x) nearly cancel for small x.
    return 2.0 * std::sinh(x) * (std::numbers::egamma + std::log(x)) + std::exp(x) * ei_series_tail(-x) -
           std::exp(-x) * ei_series_tail(x);
  }
  return std::exp(x) * exp_integral_ei(-x) - std::exp(-x) * exp_integral_ei(x);
}

}  // namespace nhgeo
