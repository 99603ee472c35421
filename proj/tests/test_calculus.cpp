#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sublin/calculus.hpp"

using namespace sublin;

namespace {

Problem step_problem(double eta, double cval = 0.0, double p = 0.5) {
  return make_problem(0.0, 1.0, Coefficient::constant(0.0, 0.0, 1.0),
                      Coefficient::constant(cval, 0.0, 1.0),
                      Coefficient::step(-eta, 1.0, -eta, 0.0, 0.4, 0.6, 1.0), p);
}

}  // namespace

TEST_CASE("cumulative table matches antiderivative") {
  CumulativeTable T([](double x) { return std::cos(x); }, 0.0, 2.0);
  for (int i = 0; i <= 1000; ++i) {
    const double x = 2.0 * i / 1000.0;
    CHECK(std::abs(T(x) - std::sin(x)) <= 1e-12);
  }
  CHECK(std::abs(T.total() - std::sin(2.0)) <= 1e-12);
}

TEST_CASE("integrating factors are reciprocal") {
  const double lin[] = {0.0, 2.0};  // b(x) = 2x
  const auto F = exp_factors(Coefficient::poly(lin, 0.0, 1.0));
  for (int i = 0; i <= 10000; ++i) {
    const double x = i / 10000.0;
    CHECK(std::abs(F.Bbar(x) * F.Bunder(x) - 1.0) <= 1e-13);
  }
  // int_0^1 2x = 1, so Bbar(1) = e
  CHECK(std::abs(F.Bbar(1.0) - std::exp(1.0)) <= 1e-10);
}

TEST_CASE("constant drift factor") {
  const auto F = exp_factors(Coefficient::constant(2.0, 0.0, 1.0));
  CHECK(std::abs(F.Bbar(1.0) - std::exp(2.0)) <= 1e-10);
  CHECK(std::abs(F.Bbar(0.5) - std::exp(1.0)) <= 1e-10);
  CHECK(std::abs(F.Bunder(1.0) - std::exp(-2.0)) <= 1e-12);
}

TEST_CASE("sublinearity constant identities") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.01, 0.99);
  for (int i = 0; i < 100; ++i) {
    const double p = U(rng);
    const double Cp = constant_Cp(p);
    CHECK(Cp == doctest::Approx(2.0 * (1.0 + p) / ((1.0 - p) * (1.0 - p)))
                    .epsilon(1e-15));
    const double k = 2.0 / (1.0 - p);
    CHECK(k * (k - 1.0) == doctest::Approx(Cp).epsilon(1e-14));
    CHECK(k * p == doctest::Approx(k - 2.0).epsilon(1e-13));
  }
  // increasing in p
  CHECK(constant_Cp(0.2) < constant_Cp(0.5));
  CHECK(constant_Cp(0.5) < constant_Cp(0.9));
}

TEST_CASE("a priori integral for constant positive weight") {
  // b = 0, m = 1: J+ = int_0^1 x dx = 1/2
  Problem p = make_problem(0.0, 1.0, Coefficient::constant(0.0, 0.0, 1.0),
                           Coefficient::constant(0.0, 0.0, 1.0),
                           Coefficient::constant(1.0, 0.0, 1.0), 0.5);
  const auto F = exp_factors(p.b);
  const auto d = decompose_weight(p.m);
  const auto J = apriori_integral(p, F, d);
  CHECK(std::abs(J.value - 0.5) <= 1e-8);
}

TEST_CASE("a priori integral for the step weight") {
  // m+ = 1 on (0.4,0.6): J+ = int_0.4^0.6 (x-0.4) dx + 0.2*0.4 = 0.1
  Problem p = step_problem(0.5);
  const auto F = exp_factors(p.b);
  const auto d = decompose_weight(p.m);
  const auto J = apriori_integral(p, F, d);
  CHECK(std::abs(J.value - 0.1) <= 1e-8);
}

TEST_CASE("derived constants for the step problem") {
  Problem p = step_problem(1.0);
  const Interval I{0.4, 0.6};
  const auto dc = derived_constants(p, I);
  CHECK(std::abs(dc.Cp - constant_Cp(0.5)) <= 1e-15);
  CHECK(std::abs(dc.J_plus - 0.1) <= 1e-8);
  // gamma = max{beta - x0, x1 - alpha} = max{0.6, 0.6}
  CHECK(std::abs(dc.gamma - 0.6) <= 1e-12);
  // b = 0 so the drift-weighted radius equals gamma
  CHECK(std::abs(dc.gamma_b - 0.6) <= 1e-10);
  CHECK(std::abs(dc.M_script - 0.16) <= 1e-7);
  CHECK(std::abs(dc.K_b - 2.0 / 3.0) <= 1e-7);
  CHECK(dc.quadrature_error >= 0.0);
}

TEST_CASE("derived constants scale linearly in the negative part") {
  const Interval I{0.4, 0.6};
  const auto d1 = derived_constants(step_problem(0.25), I);
  const auto d4 = derived_constants(step_problem(1.0), I);
  CHECK(std::abs(d4.M_script - 4.0 * d1.M_script) <= 1e-7);
  // J+ only sees m+, which is unchanged
  CHECK(std::abs(d4.J_plus - d1.J_plus) <= 1e-10);
}

TEST_CASE("a priori bound with and without zero order term") {
  Problem p = make_problem(0.0, 1.0, Coefficient::constant(0.0, 0.0, 1.0),
                           Coefficient::constant(0.0, 0.0, 1.0),
                           Coefficient::constant(1.0, 0.0, 1.0), 0.5);
  const auto b0 = apriori_bound(p);
  CHECK(std::abs(b0.inerte - 0.25) <= 1e-7);  // (1/2)^2
  CHECK_FALSE(b0.has_dudu);
  CHECK(std::abs(b0.bound - b0.inerte) <= 1e-15);

  p.c = Coefficient::constant(0.5, 0.0, 1.0);
  const auto b1 = apriori_bound(p);
  REQUIRE(b1.has_dudu);
  CHECK(std::abs(b1.dudu - 4.0) <= 1e-7);  // (1/0.5)^2
  CHECK(std::abs(b1.bound - 0.25) <= 1e-7);
}

TEST_CASE("sup of m over c skips vanishing c") {
  Problem p = step_problem(0.5, 0.0);
  const auto d = decompose_weight(p.m);
  CHECK_FALSE(sup_mplus_over_c(p, d).has_value());
  p.c = Coefficient::constant(2.0, 0.0, 1.0);
  const auto s = sup_mplus_over_c(p, d);
  REQUIRE(s.has_value());
  CHECK(std::abs(*s - 0.5) <= 1e-9);
}
