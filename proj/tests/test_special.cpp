#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <numbers>

#include "ei_oracle.hpp"
#include "nhgeo/special.hpp"

using namespace nhgeo;

TEST_CASE("reference values") {
  CHECK(std::abs(exp_integral_ei(1.0) / 1.8951178163559368 - 1.0) < 1e-15);
  CHECK(std::abs(exp_integral_ei(-1.0) / -0.21938393439552028 - 1.0) < 1e-14);
  CHECK(std::abs(exp_integral_ei(-100.0) / ei_oracle(-100.0) - 1.0) < 1e-12);
}

TEST_CASE("small-argument behaviour Ei(x) - ln|x| - gamma ~ x") {
  for (double x : {1e-3, 1e-4, 1e-5, -1e-4}) {
    const double rest = exp_integral_ei(x) - std::log(std::abs(x)) - std::numbers::egamma;
    CHECK(rest / x == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("relative accuracy over |x| in [1e-6, 700]") {
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double a = std::pow(10.0, -6.0 + 8.845 * i / 200.0);
    for (double x : {a, -a}) {
      if (std::abs(x) > 700.0) continue;
      double ref;
      if (std::abs(x) <= 100.0)
        ref = ei_oracle(x);
      else
        ref = boost::math::expint(x);
      const double got = exp_integral_ei(x);
      // Relative error measured against |Ei| except right at the positive root.
      worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("near the positive root") {
  const double x0 = 0.37250741078136663;
  for (double d : {1e-3, 1e-5, -1e-4, 0.1, -0.1}) {
    const double x = x0 + d;
    CHECK(std::abs(exp_integral_ei(x) - ei_oracle(x)) <= 1e-10 * std::abs(ei_oracle(x)));
  }
}

TEST_CASE("domain and overflow") {
  CHECK_THROWS_AS(exp_integral_ei(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_ei(720.0), std::overflow_error);
  CHECK(std::isfinite(exp_integral_ei(710.0)));
  CHECK(exp_integral_ei(710.0) == doctest::Approx(boost::math::expint(710.0)).epsilon(1e-12));
  CHECK(exp_integral_ei(-745.0) <= 0.0);
}

TEST_CASE("kernel exp(x)Ei(-x) - exp(-x)Ei(x)") {
  CHECK(ei_kernel(0.0) == 0.0);
  for (double x : {1e-6, 0.2, 1.0, 7.5, 30.0, 39.99, 40.01, 55.0, 100.0}) {
    const double direct = ei_kernel_oracle(x);
    CHECK(std::abs(ei_kernel(x) - direct) <= 1e-12 * std::abs(direct));
  }
  // Large-argument limit -2/x.
  CHECK(ei_kernel(1e4) * 1e4 == doctest::Approx(-2.0).epsilon(1e-7));
  CHECK_THROWS_AS(ei_kernel(-1.0), std::domain_error);
}
