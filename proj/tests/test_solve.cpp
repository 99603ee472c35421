#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sublin/solve.hpp"

using namespace sublin;

namespace {

Problem step_problem(double eta, double cval, double p) {
  return make_problem(0.0, 1.0, Coefficient::constant(0.0, 0.0, 1.0),
                      Coefficient::constant(cval, 0.0, 1.0),
                      Coefficient::step(-eta, 1.0, -eta, 0.0, 0.4, 0.6, 1.0), p);
}

double ustar(double x) {
  return std::sin(M_PI * x) * (1.0 + 0.5 * std::cos(M_PI * x));
}

// -u'' = m u^{1/2} with u = ustar; m changes sign at x = 2/3
Problem manufactured() {
  auto mf = [](double x) {
    const double num =
        M_PI * M_PI * std::sin(M_PI * x) * (1.0 + 2.0 * std::cos(M_PI * x));
    const double den = std::sqrt(std::max(ustar(x), 1e-300));
    return num / den;
  };
  return make_problem(0.0, 1.0, Coefficient::constant(0.0, 0.0, 1.0),
                      Coefficient::constant(0.0, 0.0, 1.0),
                      Coefficient::callable(mf, 0.0, 1.0), 0.5);
}

double linf_vs_ustar(const SolveResult& r) {
  double e = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    e = std::max(e, std::abs(r.u[i] - ustar(r.x[i])));
  return e;
}

}  // namespace

TEST_CASE("linear solver is exact on quadratics") {
  const Problem p = step_problem(0.0, 0.0, 0.5);
  const Grid g = Grid::make(p, 200);
  std::vector<double> rhs(g.n, 2.0);  // u = x(1-x)
  const auto u = solve_linear(p, rhs, g);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.node(i);
    CHECK(std::abs(u[i] - x * (1.0 - x)) <= 1e-13);
  }
}

TEST_CASE("linear solver second-order accurate with drift and potential") {
  // u = sin(pi x), b = 1, c = 1
  const Problem p = make_problem(0.0, 1.0, Coefficient::constant(1.0, 0.0, 1.0),
                                 Coefficient::constant(1.0, 0.0, 1.0),
                                 Coefficient::constant(1.0, 0.0, 1.0), 0.5);
  auto err_at = [&](int n) {
    const Grid g = Grid::make(p, n);
    std::vector<double> rhs(g.n);
    for (int i = 0; i < g.n; ++i) {
      const double x = g.node(i);
      rhs[i] = (M_PI * M_PI + 1.0) * std::sin(M_PI * x) +
               M_PI * std::cos(M_PI * x);
    }
    const auto u = solve_linear(p, rhs, g);
    double e = 0.0;
    for (int i = 0; i < g.n; ++i)
      e = std::max(e, std::abs(u[i] - std::sin(M_PI * g.node(i))));
    return e;
  };
  const double e1 = err_at(500);
  const double e2 = err_at(1000);
  CHECK(e1 <= 1e-5);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("grid refuses to break the M-matrix condition") {
  const Problem p = make_problem(0.0, 1.0, Coefficient::constant(300.0, 0.0, 1.0),
                                 Coefficient::constant(0.0, 0.0, 1.0),
                                 Coefficient::constant(1.0, 0.0, 1.0), 0.5);
  const Grid g = Grid::make(p, 100);
  CHECK(g.h * 300.0 / 2.0 < 1.0);
  CHECK(g.n > 100);
}

TEST_CASE("pipeline recovers the manufactured solution") {
  PipelineOptions opts;
  opts.grid_n = 2000;
  const auto out = run_pipeline(manufactured(), opts);
  REQUIRE(out.verdict == Verdict::Exists);
  REQUIRE(out.solution.has_value());
  CHECK(out.solution->converged);
  CHECK(out.solution->min_interior > 0.0);
  CHECK(linf_vs_ustar(*out.solution) <= 5e-6);
}

TEST_CASE("pipeline error decays at second order") {
  PipelineOptions o1, o2;
  o1.grid_n = 500;
  o2.grid_n = 1000;
  const auto r1 = run_pipeline(manufactured(), o1);
  const auto r2 = run_pipeline(manufactured(), o2);
  REQUIRE(r1.solution.has_value());
  REQUIRE(r2.solution.has_value());
  const double e1 = linf_vs_ustar(*r1.solution);
  const double e2 = linf_vs_ustar(*r2.solution);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("monotone iteration increases from the subsolution") {
  const auto out = run_pipeline(step_problem(0.1, 1.0, 0.5));
  REQUIRE(out.verdict == Verdict::Exists);
  REQUIRE(out.tau_frame.has_value());
  const auto& tr = out.tau_frame->monotone_trace;
  REQUIRE(tr.size() >= 2);
  CHECK(tr.back() <= 1e-12 * std::max(1.0, out.tau_frame->u[out.tau_frame->u.size() / 2]));
  CHECK(tr.front() > tr.back());
}

TEST_CASE("solutions transform correctly under weight scaling") {
  // weight s*m: u_s = s^{1/(1-p)} u_1, p = 1/2 -> factor s^2
  const Problem p1 = step_problem(0.1, 1.0, 0.5);
  Problem p3 = p1;
  p3.m = p1.m.scaled(3.0);
  const auto r1 = run_pipeline(p1);
  const auto r3 = run_pipeline(p3);
  REQUIRE(r1.solution.has_value());
  REQUIRE(r3.solution.has_value());
  REQUIRE(r1.solution->u.size() == r3.solution->u.size());
  double rel = 0.0, scale = 9.0;
  for (std::size_t i = 0; i < r1.solution->u.size(); ++i)
    rel = std::max(rel, std::abs(r3.solution->u[i] - scale * r1.solution->u[i]));
  CHECK(rel <= 1e-6 * scale);
}

TEST_CASE("rescaling divides out the weight scale exactly") {
  SolveResult r;
  r.x = {0.25, 0.5, 0.75};
  r.u = {1.0, 2.0, 1.0};
  r.residual_inf = 0.5;
  r.min_interior = 1.0;
  const auto s = rescale_solution(r, 16.0, 0.5);
  CHECK(s.u[1] == doctest::Approx(2.0 / 256.0));  // 16^{1/(1-p)} = 256
  CHECK(s.min_interior == doctest::Approx(1.0 / 256.0));
}

TEST_CASE("exponent lifting produces a discrete subsolution") {
  // v = u^2 is a subsolution for q = 3/4 and weight 2m
  const auto out = run_pipeline(manufactured());
  REQUIRE(out.solution.has_value());
  const Grid g = Grid::make(manufactured(), 2000);
  const auto lift = lift_exponent(manufactured(), *out.solution, g, 0.75);
  CHECK(lift.gamma == doctest::Approx(2.0));
  CHECK(lift.pass);
}

TEST_CASE("pstar for a nonnegative weight") {
  const Problem p = make_problem(0.0, 1.0, Coefficient::constant(0.0, 0.0, 1.0),
                                 Coefficient::constant(0.0, 0.0, 1.0),
                                 Coefficient::constant(1.0, 0.0, 1.0), 0.5);
  const auto r = pstar_search(p);
  CHECK(r.p_lo == 0.0);
  CHECK(r.p_hi <= 0.31);
  CHECK_FALSE(r.all_notexists);
  CHECK_FALSE(r.probes.empty());
}

TEST_CASE("pstar for a nonpositive weight") {
  const Problem p = make_problem(0.0, 1.0, Coefficient::constant(0.0, 0.0, 1.0),
                                 Coefficient::constant(0.0, 0.0, 1.0),
                                 Coefficient::constant(-1.0, 0.0, 1.0), 0.5);
  const auto r = pstar_search(p);
  CHECK(r.all_notexists);
  CHECK(r.upper_open);
}

TEST_CASE("general nonlinearity f(u) = sqrt(u)(1 + sin(10u)/2)") {
  NonlinearitySpec spec;
  spec.f = [](double xi) {
    return std::sqrt(std::max(xi, 0.0)) * (1.0 + 0.5 * std::sin(10.0 * xi));
  };
  spec.k1 = 0.5;
  spec.k2 = 1.5;
  spec.k3 = 1.5;
  spec.q = 0.5;
  const auto out = solve_general_f(step_problem(0.05, 1.0, 0.5), spec);
  CHECK(out.result.converged);
  CHECK(out.result.min_interior > 0.0);
  CHECK(out.result.residual_inf <= 1e-6);
  CHECK(out.k_ceiling > 0.0);
}
