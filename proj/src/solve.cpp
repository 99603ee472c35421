#include "sublin/solve.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sublin/tridiag.hpp"

namespace sublin {

Grid Grid::make(const Problem& problem, int n_request) {
  Grid g;
  g.alpha = problem.alpha;
  g.beta = problem.beta;
  g.n = std::max(16, n_request);
  const double bnorm = problem.b.sup_abs(problem.alpha, problem.beta);
  for (;;) {
    g.h = (g.beta - g.alpha) / (g.n + 1);
    if (g.h * bnorm / 2.0 < 1.0) break;  // M-matrix condition
    g.n *= 2;
  }
  return g;
}

std::vector<double> solve_linear(const Problem& problem,
                                 const std::vector<double>& rhs, const Grid& grid,
                                 const std::vector<double>* shift_diag) {
  const int n = grid.n;
  const double h = grid.h;
  std::vector<double> lo(n), di(n), up(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    const double bi = problem.b(x);
    const double ci = problem.c(x) + (shift_diag ? (*shift_diag)[i] : 0.0);
    lo[i] = -1.0 / (h * h) - bi / (2.0 * h);
    di[i] = 2.0 / (h * h) + ci;
    up[i] = -1.0 / (h * h) + bi / (2.0 * h);
  }
  return thomas_solve(lo, di, up, rhs);
}

namespace {

double fd_residual(const Problem& problem, const Grid& grid,
                   const std::vector<double>& u,
                   const std::function<double(double, double)>& reaction,
                   double* min_interior = nullptr) {
  const int n = grid.n;
  const double h = grid.h;
  double res = 0.0, mini = 1e300;
  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    const double um = i > 0 ? u[i - 1] : 0.0;
    const double up = i + 1 < n ? u[i + 1] : 0.0;
    const double Lu = -(up - 2.0 * u[i] + um) / (h * h) +
                      problem.b(x) * (up - um) / (2.0 * h) +
                      problem.c(x) * u[i];
    res = std::max(res, std::abs(Lu - reaction(x, u[i])));
    mini = std::min(mini, u[i]);
  }
  if (min_interior) *min_interior = mini;
  return res;
}

}  // namespace

SolveResult solve_sublinear(const Problem& problem, const Coefficient& weight,
                            const std::vector<double>& lower,
                            const std::vector<double>& upper, const Grid& grid,
                            double tol) {
  const int n = grid.n;
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
    throw SolveError("solve_sublinear: sample size mismatch with grid");
  const double p = problem.p;

  std::vector<double> w(n), u(n);
  for (int i = 0; i < n; ++i) {
    w[i] = weight(grid.node(i));
    u[i] = std::max(0.0, lower[i]);
    if (u[i] > upper[i] + 1e-9 * (1.0 + std::abs(upper[i])))
      throw SolveError("solve_sublinear: subsolution above supersolution");
  }

  SolveResult out;
  out.x.resize(n);
  for (int i = 0; i < n; ++i) out.x[i] = grid.node(i);

  std::vector<double> shift(n), rhs(n);
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, v);

  for (int it = 0; it < 10000; ++it) {
    for (int i = 0; i < n; ++i) {
      const double base = std::max(u[i], 1e-300);
      shift[i] = p * std::max(-w[i], 0.0) * std::pow(base, p - 1.0);
      rhs[i] = w[i] * std::pow(std::max(0.0, u[i]), p) + shift[i] * u[i];
    }
    std::vector<double> unew = solve_linear(problem, rhs, grid, &shift);
    double dsup = 0.0, dmin = 0.0;
    for (int i = 0; i < n; ++i) {
      dsup = std::max(dsup, std::abs(unew[i] - u[i]));
      dmin = std::min(dmin, unew[i] - u[i]);
      if (unew[i] > upper[i] + 1e-6 * (1.0 + std::abs(upper[i])))
        throw SolveError(
            "solve_sublinear: iterate escaped the supersolution ceiling; "
            "refine the grid");
    }
    if (dmin < -1e-9 * std::max(1.0, umax))
      throw SolveError("solve_sublinear: monotonicity of iterates violated");
    out.monotone_trace.push_back(dsup);
    u.swap(unew);
    umax = 0.0;
    for (double v : u) umax = std::max(umax, v);
    out.iterations = it + 1;
    if (dsup <= 1e-13 * std::max(1.0, umax)) break;
    if (it == 9999)
      throw SolveError("solve_sublinear: no convergence in 10^4 iterations");
  }

  out.u = u;
  out.residual_inf = fd_residual(
      problem, grid, u,
      [&](double x, double ui) { return weight(x) * std::pow(std::max(0.0, ui), p); },
      &out.min_interior);
  out.converged = out.residual_inf <= tol && out.min_interior > 0.0;
  return out;
}

SolveResult rescale_solution(const SolveResult& r, double s, double p) {
  SolveResult out = r;
  const double scale = std::pow(s, -1.0 / (1.0 - p));
  for (double& v : out.u) v *= scale;
  out.residual_inf *= scale;
  out.min_interior *= scale;
  for (double& v : out.monotone_trace) v *= scale;
  return out;
}

LiftResult lift_exponent(const Problem& problem, const SolveResult& u,
                         const Grid& grid, double q) {
  if (!(q > problem.p && q < 1.0))
    throw SolveError("lift_exponent: need p < q < 1");
  LiftResult out;
  out.gamma = (1.0 - problem.p) / (1.0 - q);
  const int n = grid.n;
  out.v.resize(n);
  double vmax = 0.0;
  for (int i = 0; i < n; ++i) {
    out.v[i] = std::pow(std::max(0.0, u.u[i]), out.gamma);
    vmax = std::max(vmax, out.v[i]);
  }
  const double wnorm =
      out.gamma * problem.m.sup_abs(problem.alpha, problem.beta);
  // O(h^2) discretization allowance for the finite-difference check
  out.tolerance = 50.0 * grid.h * grid.h * (1.0 + wnorm) * std::max(1.0, vmax);
  out.max_violation = fd_residual(
      problem, grid, out.v,
      [&](double x, double vi) {
        return out.gamma * problem.m(x) * std::pow(std::max(0.0, vi), q);
      });
  // one-sided: only positive residual (Lv - gamma m v^q > 0) counts
  {
    const int nn = grid.n;
    const double h = grid.h;
    double worst = -1e300;
    for (int i = 0; i < nn; ++i) {
      const double x = grid.node(i);
      const double um = i > 0 ? out.v[i - 1] : 0.0;
      const double up = i + 1 < nn ? out.v[i + 1] : 0.0;
      const double Lv = -(up - 2.0 * out.v[i] + um) / (h * h) +
                        problem.b(x) * (up - um) / (2.0 * h) +
                        problem.c(x) * out.v[i];
      const double rhs =
          out.gamma * problem.m(x) * std::pow(std::max(0.0, out.v[i]), q);
      worst = std::max(worst, Lv - rhs);
    }
    out.max_violation = worst;
  }
  out.pass = out.max_violation <= out.tolerance;
  return out;
}

// ------------------------------------------------------------------ pipeline

namespace {

struct WitnessBuild {
  SubsolutionSpec spec;
  double tau;
  double weight_scale;
};

// Build and glue for one (interval, method, tau) choice. Throws on failure.
WitnessBuild build_witness(const Problem& P, const Interval& I, double tau,
                           Method method, double c_norm, double weight_scale,
                           bool allow_tall, EigenCache& cache,
                           const Problem* frame_override = nullptr) {
  const Problem& frame = frame_override ? *frame_override : P;
  ConstructOptions copts;
  copts.c_norm = c_norm;
  copts.allow_tall = allow_tall;
  const EigenPair& eig =
      frame_override ? principal_eigenpair(frame, I) : cache.get(P, I);
  OuterPieces outer = build_outer_pieces(frame, I, tau, method, copts);
  WitnessBuild wb{glue(outer, eig, frame, tau, method), tau, weight_scale};
  return wb;
}

bool try_solve(PipelineOutcome& out, const Problem& P, const WitnessBuild& wb,
               const PipelineOptions& opts) {
  const double s = wb.tau * wb.weight_scale;
  const Coefficient weight = P.m.scaled(s);
  VerificationReport rep = verify_subsolution(wb.spec, P, weight);
  if (!rep.pass) return false;

  Grid grid = Grid::make(P, opts.grid_n);
  SupersolutionSpec super = build_supersolution(P, weight);
  std::vector<double> lower(grid.n), upper(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    lower[i] = std::max(0.0, wb.spec.glued(grid.node(i)));
    upper[i] = super.value(grid.node(i));
  }
  // arbitrarily large supersolutions are admissible: raise the ceiling if the
  // subsolution pokes above it
  for (int doubling = 0; doubling < 60; ++doubling) {
    bool ok = true;
    for (int i = 0; i < grid.n; ++i)
      if (lower[i] > upper[i]) {
        ok = false;
        break;
      }
    if (ok) break;
    for (auto& v : upper) v *= 2.0;
  }

  SolveResult tf;
  try {
    tf = solve_sublinear(P, weight, lower, upper, grid, opts.solver_tol);
  } catch (const SolveError&) {
    return false;
  }
  if (!tf.converged) return false;

  out.subsolution = wb.spec;
  out.verification = rep;
  out.tau = wb.tau;
  out.weight_scale = s;
  out.tau_frame = tf;
  out.solution = rescale_solution(tf, s, P.p);
  out.verdict = Verdict::Exists;
  return true;
}

}  // namespace

PipelineOutcome run_pipeline(const Problem& problem, const PipelineOptions& opts,
                             EigenCache* cache) {
  EigenCache local;
  if (!cache) cache = &local;
  const Problem P = normalize(problem);

  PipelineOutcome out;
  out.certificate = certify(P, cache);

  if (out.certificate.verdict == Verdict::NotExists) {
    out.verdict = Verdict::NotExists;
    bool trivial = false;
    for (const auto& r : out.certificate.reports)
      if (r.name == ConditionName::trivial_mplus && !r.holds) trivial = true;
    out.evidence = trivial ? EvidenceKind::trivial : EvidenceKind::necessary;
    return out;
  }

  if (out.certificate.verdict == Verdict::Exists && out.certificate.witness) {
    const Witness& w = *out.certificate.witness;
    try {
      if (w.condition == ConditionName::puf) {
        Problem mod = P;
        mod.c = Coefficient::constant(0.0, P.alpha, P.beta);
        mod.m = combine(P.m.scaled(w.weight_scale), 1.0, P.c, -1.0);
        WitnessBuild wb = build_witness(P, w.I, w.tau, w.method, 0.0,
                                        w.weight_scale, false, *cache, &mod);
        if (try_solve(out, P, wb, opts)) {
          out.evidence = EvidenceKind::certificate;
          return out;
        }
      } else {
        WitnessBuild wb = build_witness(P, w.I, w.tau, w.method, w.c_norm, 1.0,
                                        false, *cache);
        if (try_solve(out, P, wb, opts)) {
          out.evidence = EvidenceKind::certificate;
          return out;
        }
      }
    } catch (const ConstructError&) {
      // fall through to the numeric witness attempt below
    }
  }

  if (opts.allow_numeric_witness) {
    const bool c_zero = P.c.is_identically(0.0, 1e-14);
    const double c_norm = P.c.sup(P.alpha, P.beta);
    std::vector<Method> methods =
        c_zero ? std::vector<Method>{Method::I1, Method::I2}
               : std::vector<Method>{Method::Sinh, Method::Cosh};
    std::vector<Interval> cands;
    try {
      cands = candidate_intervals(decompose_weight(P.m));
    } catch (const ModelError&) {
      cands.clear();
    }
    std::sort(cands.begin(), cands.end(), [&](const Interval& A, const Interval& B) {
      return cache->get(P, A).lambda1 < cache->get(P, B).lambda1;
    });
    for (const auto& I : cands) {
      const double lam = cache->get(P, I).lambda1;
      for (Method method : methods) {
        for (double mult : opts.tau_ladder) {
          try {
            WitnessBuild wb =
                build_witness(P, I, mult * lam, method, c_norm, 1.0, true, *cache);
            if (try_solve(out, P, wb, opts)) {
              out.evidence = EvidenceKind::numeric;
              return out;
            }
          } catch (const ConstructError&) {
            continue;
          }
        }
      }
    }
  }

  if (out.verdict != Verdict::Exists) out.verdict = Verdict::Inconclusive;
  return out;
}

// --------------------------------------------------------------------- pstar

PStarResult pstar_search(const Problem& problem, double tol_p,
                         const PipelineOptions& opts) {
  PStarResult out;
  EigenCache cache;  // eigenpairs are independent of p: share across probes
  std::map<double, PStarProbe> memo;
  int budget = 40;

  auto probe = [&](double p) -> const PStarProbe& {
    auto it = memo.find(p);
    if (it != memo.end()) return it->second;
    Problem q = problem;
    q.p = p;
    PStarProbe pr;
    pr.p = p;
    if (budget <= 0) {
      pr.verdict = Verdict::Inconclusive;
      pr.evidence = EvidenceKind::none;
    } else {
      --budget;
      PipelineOutcome o = run_pipeline(q, opts, &cache);
      pr.verdict = o.verdict;
      pr.evidence = o.evidence;
    }
    auto res = memo.emplace(p, pr).first;
    out.probes.push_back(pr);
    return res->second;
  };

  double lo_ne = 0.0;
  bool have_ne = false;
  double hi_ex = 1.0;
  bool have_ex = false;

  for (double p : {0.3, 0.9, 0.99, 1.0 - 1e-3}) {
    const auto& pr = probe(p);
    if (pr.verdict == Verdict::Exists) {
      hi_ex = std::min(hi_ex, p);
      have_ex = true;
      break;
    }
    if (pr.verdict == Verdict::NotExists) {
      lo_ne = std::max(lo_ne, p);
      have_ne = true;
    }
  }
  if (!have_ne && probe(0.1).verdict == Verdict::NotExists) {
    lo_ne = 0.1;
    have_ne = true;
  }

  if (!have_ex) {
    out.upper_open = true;
    out.all_notexists = have_ne && lo_ne >= 1.0 - 1e-3 - 1e-12;
  }

  // refine the Exists boundary downward
  if (have_ex) {
    double g_lo = 0.0;
    for (const auto& [p, pr] : memo)
      if (p < hi_ex && pr.verdict != Verdict::Exists) g_lo = std::max(g_lo, p);
    while (hi_ex - g_lo > tol_p && budget > 0) {
      const double mid = 0.5 * (hi_ex + g_lo);
      if (probe(mid).verdict == Verdict::Exists)
        hi_ex = mid;
      else
        g_lo = mid;
    }
  }

  // refine the NotExists boundary upward
  if (have_ne) {
    double g_hi = 1.0;
    for (const auto& [p, pr] : memo)
      if (p > lo_ne && pr.verdict != Verdict::NotExists) g_hi = std::min(g_hi, p);
    g_hi = std::min(g_hi, hi_ex);
    // NotExists probes short-circuit in certification, so this edge is cheap
    // to localize more sharply than the Exists edge
    while (g_hi - lo_ne > 0.25 * tol_p && budget > 0) {
      const double mid = 0.5 * (g_hi + lo_ne);
      if (probe(mid).verdict == Verdict::NotExists)
        lo_ne = mid;
      else
        g_hi = mid;
    }
  }

  out.p_lo = have_ne ? lo_ne : 0.0;
  out.p_hi = have_ex ? hi_ex : 1.0;
  return out;
}

// --------------------------------------------------- general nonlinearity

GeneralSolveOutcome solve_general_f(const Problem& problem, NonlinearitySpec spec,
                                    const PipelineOptions& opts) {
  const Problem P = normalize(problem);
  const auto decomp = decompose_weight(P.m);
  const CumulativeFactor factors = exp_factors(P.b);
  const double jp = apriori_integral(P, factors, decomp).value;
  spec.K_under = std::pow(std::max(0.0, spec.k1 * jp), 1.0 / (1.0 - P.p));
  if (!(spec.q > 0.0 && spec.q < 1.0))
    throw SolveError("nonlinearity: q must lie in (0,1)");

  // sampled (H1) verification
  for (int i = 0; i <= 1000; ++i) {
    const double xi = spec.K_under * i / 1000.0;
    const double fx = spec.f(xi);
    const double pw = std::pow(xi, P.p);  // 0^p := 0
    if (fx < spec.k1 * pw - 1e-12 || fx > spec.k2 * pw + 1e-12)
      throw SolveError("nonlinearity: envelope bound violated at xi=" +
                       std::to_string(xi));
  }
  for (int i = 0; i <= 1000; ++i) {
    const double xi = spec.K_over + 9.0 * spec.K_over * i / 1000.0;
    if (spec.f(xi) > spec.k3 * std::pow(xi, spec.q) + 1e-12)
      throw SolveError("nonlinearity: growth bound violated at xi=" +
                       std::to_string(xi));
  }

  // modified problem with weight k1 m+ - k2 m-
  Problem mod = P;
  mod.m = combine(decomp.m_plus, spec.k1, decomp.m_minus, -spec.k2);

  GeneralSolveOutcome out;
  out.modified = run_pipeline(mod, opts);
  if (out.modified.verdict != Verdict::Exists || !out.modified.solution)
    throw SolveError("nonlinearity: modified power problem not solvable");

  const Grid grid = Grid::make(P, opts.grid_n);
  const SolveResult& u0 = *out.modified.solution;
  if (static_cast<int>(u0.u.size()) != grid.n)
    throw SolveError("nonlinearity: grid mismatch");

  // supersolution ceiling k(phi+1), L phi = m+
  SupersolutionSpec super = build_supersolution(P, P.m);
  double phimax = 0.0;
  for (double v : super.phi) phimax = std::max(phimax, v);
  double k = std::max(spec.K_over,
                      std::pow(spec.k3 * std::pow(phimax + 1.0, spec.q),
                               1.0 / (1.0 - spec.q)));
  std::vector<double> upper(grid.n);
  for (int doubling = 0; doubling < 60; ++doubling) {
    bool ok = true;
    for (int i = 0; i < grid.n; ++i) {
      upper[i] = k * (super.value(grid.node(i)) / super.k_super);
      if (upper[i] < u0.u[i]) ok = false;
    }
    if (ok) break;
    k *= 2.0;
  }
  out.k_ceiling = k;

  // sampled Lipschitz structure of f: suffix max of |f'| on a log-spaced grid
  double delta0 = u0.min_interior;
  if (!(delta0 > 0.0))
    throw SolveError("nonlinearity: modified solution not strictly positive");
  double upmax = 0.0;
  for (double v : upper) upmax = std::max(upmax, v);
  constexpr int NL = 2048;
  std::vector<double> xi_grid(NL), fp_sufmax(NL);
  const double lxa = std::log(delta0 * 0.5), lxb = std::log(std::max(upmax, delta0));
  for (int i = 0; i < NL; ++i)
    xi_grid[i] = std::exp(lxa + (lxb - lxa) * i / (NL - 1.0));
  {
    std::vector<double> fp(NL);
    for (int i = 0; i < NL; ++i) {
      const double xi = xi_grid[i];
      const double hh = 1e-6 * std::max(xi, 1e-6);
      fp[i] = std::abs((spec.f(xi + hh) - spec.f(std::max(0.0, xi - hh))) /
                       (2.0 * hh));
    }
    fp_sufmax[NL - 1] = fp[NL - 1];
    for (int i = NL - 2; i >= 0; --i) fp_sufmax[i] = std::max(fp[i], fp_sufmax[i + 1]);
  }
  auto lip_from = [&](double lo) {
    const auto it = std::lower_bound(xi_grid.begin(), xi_grid.end(), lo);
    std::size_t i = it == xi_grid.begin()
                        ? 0
                        : static_cast<std::size_t>(it - xi_grid.begin()) - 1;
    return fp_sufmax[i];
  };

  std::vector<double> u = u0.u, w(grid.n), shift(grid.n), rhs(grid.n);
  for (int i = 0; i < grid.n; ++i) w[i] = P.m(grid.node(i));

  SolveResult res;
  res.x.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) res.x[i] = grid.node(i);
  for (int it = 0; it < 10000; ++it) {
    for (int i = 0; i < grid.n; ++i) {
      shift[i] = std::abs(w[i]) * lip_from(std::max(u[i], delta0 * 0.5));
      rhs[i] = w[i] * spec.f(std::max(0.0, u[i])) + shift[i] * u[i];
    }
    std::vector<double> unew = solve_linear(P, rhs, grid, &shift);
    double dsup = 0.0;
    for (int i = 0; i < grid.n; ++i) {
      dsup = std::max(dsup, std::abs(unew[i] - u[i]));
      if (unew[i] > upper[i] + 1e-6 * (1.0 + upper[i]))
        throw SolveError("nonlinearity: iterate escaped the ceiling");
    }
    res.monotone_trace.push_back(dsup);
    u.swap(unew);
    res.iterations = it + 1;
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, v);
    if (dsup <= 1e-13 * std::max(1.0, umax)) break;
    if (it == 9999)
      throw SolveError("nonlinearity: no convergence in 10^4 iterations");
  }

  res.u = u;
  res.residual_inf = fd_residual(
      P, grid, u,
      [&](double x, double ui) { return P.m(x) * spec.f(std::max(0.0, ui)); },
      &res.min_interior);
  res.converged = res.residual_inf <= opts.solver_tol && res.min_interior > 0.0;
  out.result = res;
  return out;
}

}  // namespace sublin
