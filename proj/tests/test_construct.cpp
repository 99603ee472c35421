#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sublin/construct.hpp"

using namespace sublin;

namespace {

Problem step_problem(double eta, double cval, double p) {
  return make_problem(0.0, 1.0, Coefficient::constant(0.0, 0.0, 1.0),
                      Coefficient::constant(cval, 0.0, 1.0),
                      Coefficient::step(-eta, 1.0, -eta, 0.0, 0.4, 0.6, 1.0), p);
}

const Interval kMid{0.4, 0.6};

// build + glue + verify for a fixed method; returns the spec
SubsolutionSpec pipeline(const Problem& p, Method method, double tau,
                         VerificationReport* rep = nullptr) {
  const auto outer = build_outer_pieces(p, kMid, tau, method);
  const auto eig = principal_eigenpair(p, kMid);
  auto spec = glue(outer, eig, p, tau, method);
  if (rep) *rep = verify_subsolution(spec, p, p.m.scaled(tau));
  return spec;
}

}  // namespace

TEST_CASE("sinh outer pieces satisfy the construction identity") {
  // base f = A sinh(omega (x-alpha)); C_p (f')^2 - |c| f^2 = tau |m^-| exactly
  const Problem p = step_problem(0.1, 1.0, 0.5);
  const double tau = 1.1 * (25.0 * M_PI * M_PI + 1.0);
  const auto outer = build_outer_pieces(p, kMid, tau, Method::Sinh);
  REQUIRE(outer.u1.has_value());
  REQUIRE(outer.u3.has_value());
  CHECK(outer.k == doctest::Approx(4.0));  // 2/(1-p)
  const double Cp = 12.0;
  const auto& u1 = *outer.u1;
  // recover f = u1^{1/k} and check the identity via u1's derivatives:
  // u1 = f^k, u1' = k f^{k-1} f', so Cp (u1'/(k f^{k-1}))^2 - f^2 = tau eta
  for (int i = 1; i < 1000; ++i) {
    const double x = 0.4 * i / 1000.0;
    const double f = std::pow(u1(x), 1.0 / 4.0);
    const double fp = u1.d1(x) / (4.0 * std::pow(f, 3.0));
    const double lhsv = Cp * fp * fp - 1.0 * f * f;
    CHECK(std::abs(lhsv - tau * 0.1) <= 1e-10 * tau * 0.1);
  }
  CHECK(u1(0.0) == doctest::Approx(0.0));
  CHECK((*outer.u3)(1.0) == doctest::Approx(0.0));
}

TEST_CASE("cosh outer pieces satisfy their differential identity") {
  // base f = A (cosh(omega (x-alpha)) - 1); k f'' - |c| f = ... >= tau |m^-|
  const Problem p = step_problem(0.03, 1.0, 0.5);
  const double tau = 1.1 * (25.0 * M_PI * M_PI + 1.0);
  const auto outer = build_outer_pieces(p, kMid, tau, Method::Cosh);
  const double k = 2.0;  // 1/(1-p) for the cosh family
  const double A = tau * 0.03 / 1.0;
  const double om = std::sqrt(1.0 / k);
  for (int i = 1; i < 1000; ++i) {
    const double x = 0.4 * i / 1000.0;
    const double f = A * (std::cosh(om * x) - 1.0);
    const double fpp = A * om * om * std::cosh(om * x);
    CHECK(k * fpp - 1.0 * f >= tau * 0.03 - 1e-9);
    CHECK(std::abs((*outer.u1)(x) - std::pow(f, k)) <= 1e-10 * std::max(1.0, std::pow(f, k)));
  }
}

TEST_CASE("glued sinh subsolution verifies for the step problem") {
  const Problem p = step_problem(0.1, 1.0, 0.5);
  const auto cert = certify(p);
  REQUIRE(cert.verdict == Verdict::Exists);
  REQUIRE(cert.witness.has_value());
  VerificationReport rep;
  const auto spec = pipeline(p, Method::Sinh, cert.witness->tau, &rep);
  CHECK(rep.pass);
  CHECK(rep.max_violation <= rep.tolerance);
  // junctions sit inside the positivity interval, symmetric problem
  CHECK(spec.x_under0 > 0.4);
  CHECK(spec.x_over1 < 0.6);
  CHECK(spec.x_under0 < spec.x_over1);
  CHECK(std::abs(spec.x_under0 + spec.x_over1 - 1.0) <= 1e-6);
  // glued function is continuous, zero at the boundary, positive inside
  CHECK(spec.glued(0.0) == doctest::Approx(0.0));
  CHECK(spec.glued(1.0) == doctest::Approx(0.0));
  for (int i = 1; i < 100; ++i) CHECK(spec.glued(i / 100.0) > 0.0);
}

TEST_CASE("cosh and i1 constructions verify as well") {
  for (const Method method : {Method::Cosh, Method::I1}) {
    const Problem p = step_problem(0.03, 1.0, 0.5);
    const double tau = 1.1 * (25.0 * M_PI * M_PI + 1.0);
    VerificationReport rep;
    pipeline(p, method, tau, &rep);
    CHECK(rep.pass);
  }
}

TEST_CASE("i2 construction verifies when c vanishes") {
  const Problem p = step_problem(0.04, 0.0, 0.5);
  const auto r = check_theorem_bien(p, kMid, TheoremBienVariant::i2);
  REQUIRE(r.holds);
  REQUIRE(r.tau_window.has_value());
  const double tau = std::sqrt(r.tau_window->lo * r.tau_window->hi);
  VerificationReport rep;
  const auto spec = pipeline(p, Method::I2, tau, &rep);
  CHECK(rep.pass);
  CHECK(spec.epsilon > 0.0);
}

TEST_CASE("degenerate weight without negative part") {
  Problem p = step_problem(0.1, 0.0, 0.5);
  p.m = Coefficient::constant(1.0, 0.0, 1.0);
  const Interval I{0.0, 1.0};
  const double tau = 1.1 * M_PI * M_PI;
  const auto outer = build_outer_pieces(p, I, tau, Method::Sinh);
  CHECK(outer.degenerate);
  const auto eig = principal_eigenpair(p, I);
  const auto spec = glue(outer, eig, p, tau, Method::Sinh);
  CHECK(spec.degenerate);
  const auto rep = verify_subsolution(spec, p, p.m.scaled(tau));
  CHECK(rep.pass);
}

TEST_CASE("verification rejects a non-subsolution") {
  // same glued function checked against a much smaller weight must fail:
  // on the middle interval the eigenfunction needs tau >= lambda1
  const Problem p = step_problem(0.1, 1.0, 0.5);
  const auto cert = certify(p);
  VerificationReport rep;
  const auto spec = pipeline(p, Method::Sinh, cert.witness->tau, &rep);
  REQUIRE(rep.pass);
  const auto bad = verify_subsolution(spec, p, p.m.scaled(0.1 * cert.witness->tau));
  CHECK_FALSE(bad.pass);
}

TEST_CASE("tau outside the admissible window is rejected") {
  const Problem p = step_problem(0.1, 1.0, 0.5);
  CHECK_THROWS_AS(
      build_outer_pieces(p, kMid, 1e6, Method::Sinh),
      ConstructError);
  // allow_tall disables only the height admissibility check
  ConstructOptions opts;
  opts.allow_tall = true;
  CHECK_NOTHROW(build_outer_pieces(p, kMid, 1e6, Method::Sinh, opts));
}

TEST_CASE("supersolution for the pure laplacian") {
  // L phi = 1 with b=c=0: phi = x(1-x)/2, k = (1/8+1)^{p/(1-p)} = 9/8 at p=1/2
  const Problem p = make_problem(0.0, 1.0, Coefficient::constant(0.0, 0.0, 1.0),
                                 Coefficient::constant(0.0, 0.0, 1.0),
                                 Coefficient::constant(1.0, 0.0, 1.0), 0.5);
  const auto sup = build_supersolution(p, p.m);
  CHECK(std::abs(sup.k_super - 9.0 / 8.0) <= 1e-5);
  CHECK(std::abs(sup.value(0.5) - 9.0 / 8.0 * (1.0 + 1.0 / 8.0)) <= 1e-5);
  CHECK(std::abs(sup.value(0.0) - sup.k_super) <= 1e-12);
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    CHECK(std::abs(sup.value(x) - 9.0 / 8.0 * (1.0 + x * (1.0 - x) / 2.0)) <= 1e-5);
  }
}
