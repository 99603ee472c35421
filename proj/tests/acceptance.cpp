#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sublin/config.hpp"

using namespace sublin;

namespace {

void line(int n, bool ok, const char* desc) {
  std::printf("criterion %d: %s - %s\n", n, ok ? "PASS" : "FAIL", desc);
  std::fflush(stdout);
}

Coefficient cconst(double v) { return Coefficient::constant(v, 0.0, 1.0); }

Problem step_problem(double eta, double cval, double p) {
  return make_problem(0.0, 1.0, cconst(0.0), cconst(cval),
                      Coefficient::step(-eta, 1.0, -eta, 0.0, 0.4, 0.6, 1.0), p);
}

double ustar(double x) {
  return std::sin(M_PI * x) * (1.0 + 0.5 * std::cos(M_PI * x));
}

Problem manufactured() {
  auto mf = [](double x) {
    const double num =
        M_PI * M_PI * std::sin(M_PI * x) * (1.0 + 2.0 * std::cos(M_PI * x));
    return num / std::sqrt(std::max(ustar(x), 1e-300));
  };
  return make_problem(0.0, 1.0, cconst(0.0), cconst(0.0),
                      Coefficient::callable(mf, 0.0, 1.0), 0.5);
}

// five representative problems exercising all certification routes
std::vector<Problem> catalogue() {
  ClosedForm sf;
  sf.trig.push_back({TrigTerm::Kind::Sin, 1.0, 3.0 * M_PI});
  Problem drift = make_problem(0.0, 1.0, cconst(1.0), cconst(0.0),
                               Coefficient::step(-0.02, 1.0, -0.02, 0.0, 0.4,
                                                 0.6, 1.0),
                               0.5);
  return {
      step_problem(0.05, 1.0, 0.5),                   // seno route
      step_problem(0.03, 1.0, 0.3),                   // small eta, p below 1/2
      step_problem(0.04, 0.0, 0.5),                   // c = 0: lap/i1/i2 routes
      make_problem(0.0, 1.0, cconst(0.0), cconst(0.0),
                   Coefficient({Piece{0.0, 1.0, sf}}), 0.5),  // sine weight
      drift,                                          // nonzero drift: i1 route
  };
}

double critical_eta(TheoremAaVariant v, double cval, double p) {
  const Interval I{0.4, 0.6};
  double lo = 1e-4, hi = 0.5;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto r = check_theorem_aa(step_problem(mid, cval, p), I, v);
    (r.applied && r.holds ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double critical_eta_i1(double cval, double p) {
  const Interval I{0.4, 0.6};
  double lo = 1e-4, hi = 0.5;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto r =
        check_theorem_bien(step_problem(mid, cval, p), I, TheoremBienVariant::i1);
    (r.applied && r.holds ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("criterion 1: eigenvalue oracles") {
  bool ok = true;
  const auto e1 = principal_eigenpair(
      make_problem(0.0, 1.0, cconst(0.0), cconst(0.0), cconst(1.0), 0.5),
      {0.0, 1.0}, 1e-10);
  ok = ok && std::abs(e1.lambda1 - M_PI * M_PI) <= 1e-8;

  const auto e2 = principal_eigenpair(
      make_problem(0.0, 1.0, cconst(0.0), cconst(1.0), cconst(1.0), 0.5),
      {0.4, 0.6}, 1e-10);
  const double ref2 = 25.0 * M_PI * M_PI + 1.0;
  ok = ok && std::abs(e2.lambda1 - ref2) <= 1e-6 * ref2;

  const auto e3 = principal_eigenpair(
      make_problem(0.0, 1.0, cconst(4.0), cconst(0.0), cconst(1.0), 0.5),
      {0.0, 1.0}, 1e-10);
  const double ref3 = M_PI * M_PI + 4.0;
  ok = ok && std::abs(e3.lambda1 - ref3) <= 1e-6 * ref3;

  line(1, ok, "principal eigenvalues match the three closed-form oracles");
  CHECK(ok);
}

TEST_CASE("criterion 2: condition thresholds on the step problem") {
  const double seno_c = critical_eta(TheoremAaVariant::seno, 1.0, 0.5);
  const double expo_c = critical_eta(TheoremAaVariant::expo, 1.0, 0.5);
  const double i1_c = critical_eta_i1(1.0, 0.5);
  bool ok = std::abs(seno_c - 0.1332) <= 1e-3 && std::abs(expo_c - 0.0444) <= 1e-3 &&
            std::abs(i1_c - 0.1305) <= 1e-3 && seno_c > i1_c;
  line(2, ok, "critical eta for seno/expo/i1 and their ordering");
  CHECK(ok);
}

TEST_CASE("criterion 3: non-comparability witnesses") {
  const Interval I{0.4, 0.6};
  const Problem w1 = step_problem(0.09, 1.0, 0.5);
  const auto s1 = check_theorem_aa(w1, I, TheoremAaVariant::seno);
  const auto x1 = check_theorem_aa(w1, I, TheoremAaVariant::expo);
  const bool first = s1.holds && !x1.holds;

  const Problem w2 = step_problem(0.0215, 1.0, 0.01);
  const auto s2 = check_theorem_aa(w2, I, TheoremAaVariant::seno);
  const auto x2 = check_theorem_aa(w2, I, TheoremAaVariant::expo);
  const bool second = x2.holds && !s2.holds;

  bool ineq = true;
  for (int i = 1; i <= 100; ++i) {
    const double x = 10.0 * i / 100.0;
    const double l = std::sinh(x / std::sqrt(2.0));
    ineq = ineq && (l * l > std::cosh(x) - 1.0);
  }
  const bool ok = first && second && ineq;
  std::printf(
      "  [witness (p=0.5, eta=0.09): seno holds %d, expo holds %d;"
      " witness (p=0.01, eta=0.0215): seno holds %d, expo holds %d]\n",
      (int)s1.holds, (int)x1.holds, (int)s2.holds, (int)x2.holds);
  line(3, ok, "seno/expo each hold where the other fails; hyperbolic inequality");
  CHECK(ok);
}

TEST_CASE("criterion 4: scaling invariance") {
  bool ok = true;
  for (const Problem& p : catalogue()) {
    const auto base = certify(p);
    for (const double tau : {0.1, 10.0}) {
      Problem q = p;
      q.m = p.m.scaled(tau);
      const auto scaled = certify(q);
      ok = ok && scaled.verdict == base.verdict &&
           scaled.reports.size() == base.reports.size();
      for (std::size_t i = 0; ok && i < base.reports.size(); ++i) {
        ok = base.reports[i].name == scaled.reports[i].name &&
             base.reports[i].applied == scaled.reports[i].applied &&
             base.reports[i].holds == scaled.reports[i].holds;
      }
      // lambda1(tau m) = lambda1(m)/tau on the first candidate interval
      try {
        const auto cands = candidate_intervals(decompose_weight(p.m));
        const auto e0 = principal_eigenpair(p, cands.front());
        const auto e1 = principal_eigenpair(q, cands.front());
        ok = ok &&
             std::abs(e1.lambda1 - e0.lambda1 / tau) <= 1e-8 * e0.lambda1 / tau;
      } catch (const ModelError&) {
      }
    }
  }
  line(4, ok, "checker verdicts and lambda1 scaling under m -> tau m");
  CHECK(ok);
}

TEST_CASE("criterion 5: end-to-end soundness of Exists certificates") {
  bool ok = true;
  int granted = 0;
  for (const Problem& p : catalogue()) {
    PipelineOptions opts;
    const auto out = run_pipeline(p, opts);
    if (out.certificate.verdict != Verdict::Exists) continue;
    ++granted;
    ok = ok && out.verdict == Verdict::Exists;
    ok = ok && out.verification.has_value() && out.verification->pass;
    if (out.verification)
      ok = ok && out.verification->max_violation <= out.verification->tolerance;
    ok = ok && out.tau_frame.has_value() && out.tau_frame->converged &&
         out.tau_frame->residual_inf <= 1e-6 && out.tau_frame->min_interior > 0.0;
    ok = ok && out.solution.has_value() && out.solution->min_interior > 0.0;
  }
  ok = ok && granted >= 3;
  line(5, ok, "certified subsolutions verify and the solver converges");
  CHECK(ok);
}

TEST_CASE("criterion 6: a priori bounds on converged solutions") {
  bool ok = true;
  std::vector<Problem> probs = catalogue();
  probs.push_back(manufactured());
  for (const Problem& p : probs) {
    const auto out = run_pipeline(p);
    if (out.verdict != Verdict::Exists || !out.solution) continue;
    const auto bound = apriori_bound(normalize(p));
    double umax = 0.0;
    for (double v : out.solution->u) umax = std::max(umax, v);
    ok = ok && umax <= bound.inerte * (1.0 + 1e-6);
    if (bound.has_dudu) ok = ok && umax <= bound.dudu * (1.0 + 1e-6);
  }
  line(6, ok, "solutions respect the sup-norm a priori bounds");
  CHECK(ok);
}

TEST_CASE("criterion 7: manufactured solution recovery") {
  auto err_at = [](int n) {
    PipelineOptions opts;
    opts.grid_n = n;
    const auto out = run_pipeline(manufactured(), opts);
    REQUIRE(out.solution.has_value());
    double e = 0.0;
    for (std::size_t i = 0; i < out.solution->x.size(); ++i)
      e = std::max(e, std::abs(out.solution->u[i] - ustar(out.solution->x[i])));
    return e;
  };
  const double e2000 = err_at(2000);
  const double e500 = err_at(500);
  const double e1000 = err_at(1000);
  const double ratio = e500 / e1000;
  const bool ok = e2000 <= 5e-6 && ratio >= 3.5 && ratio <= 4.5;
  line(7, ok, "L-infinity recovery at n=2000 and second-order decay");
  CHECK(ok);
}

TEST_CASE("criterion 8: nonexistence and the exponent bracket") {
  const Problem hard = step_problem(100.0, 1.0, 0.3);
  const auto cert = certify(hard);
  const ConditionReport* nec = nullptr;
  for (const auto& r : cert.reports)
    if (r.name == ConditionName::nec) nec = &r;
  const bool notexists = cert.verdict == Verdict::NotExists && nec &&
                         std::abs(nec->lhs - 4.0) <= 0.05 &&
                         std::abs(nec->rhs - 0.5306) <= 0.01;

  PipelineOptions opts;
  opts.grid_n = 800;
  const auto br = pstar_search(hard, 0.02, opts);
  const bool lower_edge = br.p_lo >= 0.70;
  const bool exists_probe = !br.upper_open && br.p_hi < 1.0;
  const bool width = (br.p_hi - br.p_lo) <= 0.02;
  const bool ok = notexists && lower_edge && exists_probe && width;
  std::printf(
      "  [notexists@0.3: %d; bracket: p_lo=%.4f (>=0.70: %d) p_hi=%.4f"
      " (exists probe: %d) width=%.4f (<=0.02: %d)]\n",
      (int)notexists, br.p_lo, (int)lower_edge, br.p_hi, (int)exists_probe,
      br.p_hi - br.p_lo, (int)width);
  line(8, ok, "kappa=100 NotExists at p=0.3; pstar bracket edges and width");
  CHECK(ok);
}

TEST_CASE("criterion 9: exponent lifting") {
  const Problem p = manufactured();
  const auto out = run_pipeline(p);
  REQUIRE(out.solution.has_value());
  const Grid g = Grid::make(p, 2000);
  const auto lift = lift_exponent(p, *out.solution, g, 0.75);
  const bool ok = lift.gamma == 2.0 && lift.pass;
  line(9, ok, "p=1/2 solution lifted with gamma=2 is a discrete q=3/4 subsolution");
  CHECK(ok);
}

TEST_CASE("criterion 10: general nonlinearity") {
  NonlinearitySpec spec;
  spec.f = [](double xi) {
    return std::sqrt(std::max(xi, 0.0)) * (1.0 + 0.5 * std::sin(10.0 * xi));
  };
  spec.k1 = 0.5;
  spec.k2 = 1.5;
  spec.k3 = 1.5;
  spec.q = 0.5;
  const auto out = solve_general_f(step_problem(0.05, 1.0, 0.5), spec);
  const bool ok = out.result.converged && out.result.min_interior > 0.0 &&
                  out.result.residual_inf <= 1e-6;
  line(10, ok, "positive solution of Lu = m f(u) with small residual");
  CHECK(ok);
}

TEST_CASE("criterion 11: CLI determinism") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sublin_acceptance";
  fs::create_directories(dir);
  const fs::path cfg = dir / "step.json";
  {
    std::ofstream f(cfg);
    f << R"({"interval": [0.0, 1.0],
             "c": {"pieces": [{"range": [0.0, 1.0], "poly": [1.0]}]},
             "m": {"pieces": [
               {"range": [0.0, 0.4], "poly": [-0.05]},
               {"range": [0.4, 0.6], "poly": [1.0]},
               {"range": [0.6, 1.0], "poly": [-0.05]}]},
             "p": 0.5})";
  }
  auto once = [&](const fs::path& out) {
    RunConfig rc;
    rc.subcommand = "certify";
    rc.config_path = cfg;
    rc.out_dir = out;
    return run(rc);
  };
  const int c1 = once(dir / "a");
  const int c2 = once(dir / "b");
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string r1 = slurp(dir / "a" / "report.json");
  const std::string r2 = slurp(dir / "b" / "report.json");
  const bool ok = c1 == 0 && c2 == 0 && !r1.empty() && r1 == r2 &&
                  r1.find("\"verdict\": \"Exists\"") != std::string::npos;
  line(11, ok, "identical configs give byte-identical reports; exit matches verdict");
  CHECK(ok);
}
