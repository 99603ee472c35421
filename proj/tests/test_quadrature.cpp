#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sublin/quadrature.hpp"

using namespace sublin;

TEST_CASE("zero integrand") {
  const auto r = integrate([](double) { return 0.0; }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("linear integrand") {
  const auto r = integrate([](double x) { return x; }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(r.value - 0.5) < 1e-12);
}

TEST_CASE("sine over a full arch") {
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-10);
  CHECK(std::abs(r.value - 2.0) < 1e-10);
}

TEST_CASE("breakpoints keep discontinuities out of panels") {
  // step function: exact value recovered when the jump is a panel boundary
  const double bp[] = {0.3};
  const auto r = integrate([](double x) { return x < 0.3 ? 1.0 : 5.0; }, 0.0,
                           1.0, 1e-12, bp);
  CHECK(std::abs(r.value - (0.3 + 5.0 * 0.7)) < 1e-12);
}

TEST_CASE("reversed orientation flips the sign") {
  const auto r = integrate([](double x) { return x * x; }, 1.0, 0.0, 1e-12);
  CHECK(std::abs(r.value + 1.0 / 3.0) < 1e-12);
}

TEST_CASE("error estimate is reported") {
  const auto r = integrate([](double x) { return std::exp(x); }, 0.0, 2.0, 1e-10);
  CHECK(std::abs(r.value - (std::exp(2.0) - 1.0)) <= 1e-9);
  CHECK(r.error_estimate >= 0.0);
}
