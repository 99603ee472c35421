#include "sublin/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace sublin {

using json = nlohmann::ordered_json;

namespace {

Coefficient parse_coefficient(const json& j, double alpha, double beta) {
  if (j.contains("builtin")) {
    const std::string name = j.at("builtin").get<std::string>();
    if (name == "manufactured_weight") {
      // weight whose exact solution is sin(pi x)(1 + cos(pi x)/2) at p = 1/2
      auto f = [](double x) {
        const double s = std::sin(M_PI * x);
        const double ustar = s * (1.0 + 0.5 * std::cos(M_PI * x));
        const double num = M_PI * M_PI * s * (1.0 + 2.0 * std::cos(M_PI * x));
        return num / std::sqrt(std::max(ustar, 1e-300));
      };
      return Coefficient::callable(f, alpha, beta);
    }
    throw ConfigError("unknown builtin coefficient: " + name);
  }
  if (!j.contains("pieces")) throw ConfigError("coefficient: missing 'pieces'");
  std::vector<Piece> pieces;
  for (const auto& pj : j.at("pieces")) {
    Piece p;
    const auto& range = pj.at("range");
    p.lo = range.at(0).get<double>();
    p.hi = range.at(1).get<double>();
    ClosedForm cf;
    if (pj.contains("poly")) {
      const auto& poly = pj.at("poly");
      if (poly.size() > 6) throw ConfigError("coefficient: poly degree > 5");
      for (std::size_t i = 0; i < poly.size(); ++i)
        cf.poly[i] = poly.at(i).get<double>();
    }
    if (pj.contains("trig")) {
      const auto& tj = pj.at("trig");
      TrigTerm t;
      const std::string kind = tj.at("kind").get<std::string>();
      if (kind == "sin")
        t.kind = TrigTerm::Kind::Sin;
      else if (kind == "cos")
        t.kind = TrigTerm::Kind::Cos;
      else if (kind == "exp")
        t.kind = TrigTerm::Kind::Exp;
      else
        throw ConfigError("coefficient: trig kind must be sin/cos/exp");
      t.amplitude = tj.at("amplitude").get<double>();
      t.rate = tj.contains("frequency") ? tj.at("frequency").get<double>()
                                        : tj.at("rate").get<double>();
      cf.trig.push_back(t);
    }
    p.form = std::move(cf);
    pieces.push_back(std::move(p));
  }
  return Coefficient(std::move(pieces));
}

NonlinearitySpec parse_nonlinearity(const json& j, double p) {
  NonlinearitySpec s;
  s.k1 = j.value("k1", 1.0);
  s.k2 = j.value("k2", 1.0);
  s.k3 = j.value("k3", 1.0);
  s.q = j.value("q", p);
  s.K_over = j.value("K_over", 1.0);
  const std::string kind = j.value("kind", "power");
  if (kind == "power") {
    s.f = [p](double xi) { return std::pow(std::max(0.0, xi), p); };
  } else if (kind == "power_sin") {
    const double amp = j.value("amplitude", 0.5);
    const double freq = j.value("frequency", 10.0);
    s.f = [p, amp, freq](double xi) {
      return std::pow(std::max(0.0, xi), p) * (1.0 + amp * std::sin(freq * xi));
    };
  } else {
    throw ConfigError("nonlinearity: kind must be power or power_sin");
  }
  return s;
}

ParsedConfig parse_json(const json& doc) {
  ParsedConfig out;
  try {
    const auto& iv = doc.at("interval");
    const double alpha = iv.at(0).get<double>();
    const double beta = iv.at(1).get<double>();
    Problem pr;
    pr.alpha = alpha;
    pr.beta = beta;
    pr.p = doc.at("p").get<double>();
    pr.a = doc.contains("a") ? parse_coefficient(doc.at("a"), alpha, beta)
                             : Coefficient::constant(1.0, alpha, beta);
    pr.b = doc.contains("b") ? parse_coefficient(doc.at("b"), alpha, beta)
                             : Coefficient::constant(0.0, alpha, beta);
    pr.c = doc.contains("c") ? parse_coefficient(doc.at("c"), alpha, beta)
                             : Coefficient::constant(0.0, alpha, beta);
    if (!doc.contains("m")) throw ConfigError("config: missing weight 'm'");
    pr.m = parse_coefficient(doc.at("m"), alpha, beta);
    pr.validate();
    out.problem = pr;
    if (doc.contains("tolerances")) {
      const auto& t = doc.at("tolerances");
      out.quadrature_tol = t.value("quadrature", 1e-10);
      out.solver_tol = t.value("solver", 1e-6);
      out.p_bracket_tol = t.value("p_bracket", 0.02);
    }
    out.grid = doc.value("grid", 2000);
    if (doc.contains("nonlinearity"))
      out.nonlinearity = parse_nonlinearity(doc.at("nonlinearity"), pr.p);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ModelError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return out;
}

json report_condition(const ConditionReport& r) {
  json j;
  j["name"] = to_string(r.name);
  j["applied"] = r.applied;
  if (!r.applied) {
    j["skip_reason"] = r.skip_reason;
    return j;
  }
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["margin"] = r.margin;
  j["holds"] = r.holds;
  j["strict"] = r.strict;
  j["quadrature_error"] = r.quadrature_error;
  if (r.tau_window)
    j["tau_window"] = {r.tau_window->lo, r.tau_window->hi};
  if (r.interval) j["interval"] = {r.interval->lo, r.interval->hi};
  return j;
}

json report_certificate(const Certificate& cert) {
  json j;
  j["verdict"] = to_string(cert.verdict);
  json conds = json::array();
  for (const auto& r : cert.reports) conds.push_back(report_condition(r));
  j["conditions"] = conds;
  if (cert.witness) {
    json w;
    w["condition"] = to_string(cert.witness->condition);
    w["interval"] = {cert.witness->I.lo, cert.witness->I.hi};
    w["tau"] = cert.witness->tau;
    w["weight_scale"] = cert.witness->weight_scale;
    j["witness"] = w;
  }
  return j;
}

std::string csv_num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_conditions_csv(const std::filesystem::path& path,
                          const std::vector<ConditionReport>& reports) {
  std::ofstream f(path);
  f << "name,lhs,rhs,margin,holds\n";
  for (const auto& r : reports) {
    if (!r.applied) continue;
    f << to_string(r.name) << ',' << csv_num(r.lhs) << ',' << csv_num(r.rhs)
      << ',' << csv_num(r.margin) << ',' << (r.holds ? 1 : 0) << '\n';
  }
}

void write_solution_csv(const std::filesystem::path& path, const Problem& P,
                        const std::vector<double>& x, const std::vector<double>& u,
                        const std::function<double(double, double)>& rhs_fn) {
  std::ofstream f(path);
  f << "x,u,Lu,rhs,residual\n";
  const std::size_t n = x.size();
  const double h = n > 1 ? x[1] - x[0] : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double um = i > 0 ? u[i - 1] : 0.0;
    const double up = i + 1 < n ? u[i + 1] : 0.0;
    const double Lu = -(up - 2.0 * u[i] + um) / (h * h) +
                      P.b(x[i]) * (up - um) / (2.0 * h) + P.c(x[i]) * u[i];
    const double rhs = rhs_fn(x[i], u[i]);
    f << csv_num(x[i]) << ',' << csv_num(u[i]) << ',' << csv_num(Lu) << ','
      << csv_num(rhs) << ',' << csv_num(Lu - rhs) << '\n';
  }
}

void write_subsolution_csv(const std::filesystem::path& path, const Problem& P,
                           const SubsolutionSpec& spec, double weight_scale) {
  std::ofstream f(path);
  f << "x,u,Lu,rhs,residual\n";
  const std::size_t N = 2000;
  for (std::size_t i = 1; i < N; ++i) {
    const double x = P.alpha + (P.beta - P.alpha) * i / static_cast<double>(N);
    const double u = std::max(0.0, spec.glued(x));
    const double Lu = -spec.glued.d2(x) + P.b(x) * spec.glued.d1(x) + P.c(x) * u;
    const double rhs = weight_scale * P.m(x) * std::pow(u, P.p);
    f << csv_num(x) << ',' << csv_num(u) << ',' << csv_num(Lu) << ','
      << csv_num(rhs) << ',' << csv_num(Lu - rhs) << '\n';
  }
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Exists: return 0;
    case Verdict::NotExists: return 1;
    case Verdict::Inconclusive: return 2;
  }
  return 2;
}

int run_single(const std::string& subcommand, const ParsedConfig& cfg,
               const std::filesystem::path& out_dir, double p_bracket_tol) {
  std::filesystem::create_directories(out_dir);
  json report;
  report["subcommand"] = subcommand;
  int exit_code = 2;

  PipelineOptions opts;
  opts.grid_n = cfg.grid;
  opts.solver_tol = cfg.solver_tol;

  if (subcommand == "certify") {
    const Certificate cert = certify(cfg.problem);
    report["certificate"] = report_certificate(cert);
    report["verdict"] = to_string(cert.verdict);
    write_conditions_csv(out_dir / "conditions.csv", cert.reports);
    exit_code = verdict_exit(cert.verdict);
  } else if (subcommand == "solve" || subcommand == "subsolution") {
    const PipelineOutcome o = run_pipeline(cfg.problem, opts);
    report["certificate"] = report_certificate(o.certificate);
    report["verdict"] = to_string(o.verdict);
    write_conditions_csv(out_dir / "conditions.csv", o.certificate.reports);
    if (o.subsolution) {
      json s;
      s["tau"] = o.tau;
      s["weight_scale"] = o.weight_scale;
      s["x_under0"] = o.subsolution->x_under0;
      s["x_over1"] = o.subsolution->x_over1;
      s["k"] = o.subsolution->k;
      s["sigma"] = o.subsolution->sigma;
      if (o.verification) {
        s["max_violation"] = o.verification->max_violation;
        s["tolerance"] = o.verification->tolerance;
      }
      report["subsolution"] = s;
      const Problem P = normalize(cfg.problem);
      write_subsolution_csv(out_dir / "subsolution.csv", P, *o.subsolution,
                            o.weight_scale);
    }
    if (subcommand == "solve" && o.solution) {
      json s;
      s["residual_inf"] = o.solution->residual_inf;
      s["min_interior"] = o.solution->min_interior;
      s["iterations"] = o.solution->iterations;
      report["solve"] = s;
      const Problem P = normalize(cfg.problem);
      write_solution_csv(out_dir / "solution.csv", P, o.solution->x, o.solution->u,
                         [&P](double x, double u) {
                           return P.m(x) * std::pow(std::max(0.0, u), P.p);
                         });
    }
    exit_code = verdict_exit(o.verdict);
  } else if (subcommand == "pstar") {
    const PStarResult r = pstar_search(cfg.problem, p_bracket_tol, opts);
    json s;
    s["p_lo"] = r.p_lo;
    s["p_hi"] = r.p_hi;
    s["upper_open"] = r.upper_open;
    s["all_notexists"] = r.all_notexists;
    report["pstar"] = s;
    report["verdict"] = r.all_notexists ? "NotExists" : "Exists";
    std::ofstream f(out_dir / "pstar.csv");
    f << "p,verdict,evidence\n";
    for (const auto& pr : r.probes) {
      const char* ev = pr.evidence == EvidenceKind::certificate ? "certificate"
                       : pr.evidence == EvidenceKind::numeric   ? "numeric"
                       : pr.evidence == EvidenceKind::necessary ? "necessary"
                       : pr.evidence == EvidenceKind::trivial   ? "trivial"
                                                                : "none";
      f << csv_num(pr.p) << ',' << to_string(pr.verdict) << ',' << ev << '\n';
    }
    exit_code = r.all_notexists ? 1 : 0;
  } else if (subcommand == "nonlinearity") {
    if (!cfg.nonlinearity)
      throw ConfigError("config: subcommand 'nonlinearity' needs a nonlinearity block");
    const GeneralSolveOutcome o = solve_general_f(cfg.problem, *cfg.nonlinearity, opts);
    report["verdict"] = o.result.converged ? "Exists" : "Inconclusive";
    json s;
    s["residual_inf"] = o.result.residual_inf;
    s["min_interior"] = o.result.min_interior;
    s["iterations"] = o.result.iterations;
    s["k_ceiling"] = o.k_ceiling;
    report["solve"] = s;
    const Problem P = normalize(cfg.problem);
    const auto& spec = *cfg.nonlinearity;
    write_solution_csv(out_dir / "solution.csv", P, o.result.x, o.result.u,
                       [&P, &spec](double x, double u) {
                         return P.m(x) * spec.f(std::max(0.0, u));
                       });
    exit_code = o.result.converged ? 0 : 2;
  } else {
    throw ConfigError("unknown subcommand: " + subcommand);
  }

  report["exit_code"] = exit_code;
  std::ofstream f(out_dir / "report.json");
  f << report.dump(2) << '\n';
  return exit_code;
}

}  // namespace

Problem parse_problem_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_json(doc).problem;
}

ParsedConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_json(doc);
}

int run(const RunConfig& config) {
  try {
    std::ifstream f(config.config_path);
    if (!f) throw ConfigError("config: cannot open " + config.config_path.string());
    json doc;
    try {
      doc = json::parse(f);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (config.grid > 0) doc["grid"] = config.grid;

    if (!config.sweep.empty() || config.subcommand == "sweep") {
      if (config.sweep.empty())
        throw ConfigError("sweep: missing --sweep FIELD:LO:HI:STEPS");
      // FIELD:LO:HI:STEPS with FIELD a dotted path into the config document
      std::vector<std::string> parts;
      std::stringstream ss(config.sweep);
      std::string tok;
      while (std::getline(ss, tok, ':')) parts.push_back(tok);
      if (parts.size() != 4)
        throw ConfigError("sweep: expected FIELD:LO:HI:STEPS");
      std::string ptr = "/" + parts[0];
      for (auto& ch : ptr)
        if (ch == '.') ch = '/';
      const double lo = std::stod(parts[1]);
      const double hi = std::stod(parts[2]);
      const int steps = std::stoi(parts[3]);
      if (steps < 1) throw ConfigError("sweep: steps must be >= 1");
      const json::json_pointer jp(ptr);
      if (!doc.contains(jp))
        throw ConfigError("sweep: field not present in config: " + parts[0]);

      const std::string sub =
          config.subcommand == "sweep" ? "certify" : config.subcommand;
      std::filesystem::create_directories(config.out_dir);
      std::ofstream summary(config.out_dir / "sweep.csv");
      summary << "index,value,verdict_exit\n";
      int worst = 0;
      for (int i = 0; i < steps; ++i) {
        const double v =
            steps == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(steps - 1);
        json inst = doc;
        inst[jp] = v;
        ParsedConfig cfg = parse_json(inst);
        cfg.solver_tol = config.solver_tol;
        cfg.p_bracket_tol = config.p_bracket_tol;
        std::ostringstream dir;
        dir << "sweep_" << std::setw(3) << std::setfill('0') << i;
        const int code =
            run_single(sub, cfg, config.out_dir / dir.str(), cfg.p_bracket_tol);
        summary << i << ',' << csv_num(v) << ',' << code << '\n';
        worst = std::max(worst, code == 3 ? 3 : 0);
      }
      return worst;
    }

    ParsedConfig cfg = parse_json(doc);
    cfg.solver_tol = config.solver_tol > 0 ? config.solver_tol : cfg.solver_tol;
    cfg.p_bracket_tol = config.p_bracket_tol;
    return run_single(config.subcommand, cfg, config.out_dir, cfg.p_bracket_tol);
  } catch (const ConfigError& e) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    std::ofstream err(config.out_dir / "error.txt");
    err << e.what() << '\n';
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
}

}  // namespace sublin
