#include "sublin/construct.hpp"

#include <algorithm>
#include <cmath>

#include "sublin/tridiag.hpp"

namespace sublin {

namespace {

double method_k(Method m, double p) {
  switch (m) {
    case Method::Sinh:
    case Method::I1:
      return 2.0 / (1.0 - p);
    case Method::Cosh:
    case Method::I2:
      return 1.0 / (1.0 - p);
  }
  return 0.0;
}

}  // namespace

OuterPieces build_outer_pieces(const Problem& problem, const Interval& I,
                               double tau, Method method,
                               const ConstructOptions& opts) {
  OuterPieces out;
  out.k = method_k(method, problem.p);
  const double Cp = constant_Cp(problem.p);
  const auto decomp = decompose_weight(problem.m);
  const double mminus = decomp.m_minus.sup(problem.alpha, problem.beta);
  const double cnorm = opts.c_norm >= 0.0
                           ? opts.c_norm
                           : problem.c.sup(problem.alpha, problem.beta);

  if (mminus <= 1e-14) {
    out.degenerate = true;
    auto zero = std::make_shared<ZeroPiece>();
    out.u1 = PiecewiseFunction({{problem.alpha, I.hi, zero}});
    out.u3 = PiecewiseFunction({{I.lo, problem.beta, zero}});
    return out;
  }

  std::shared_ptr<const FunctionPiece> base1, base3;
  switch (method) {
    case Method::Sinh: {
      if (cnorm <= 0.0)
        throw ConstructError("sinh construction needs sup |c| > 0");
      const double A = std::sqrt(tau * mminus / cnorm);
      const double omega = std::sqrt(cnorm / Cp);
      out.sigma = A;
      base1 = std::make_shared<HyperbolicBase>(HyperbolicBase::Kind::Sinh, A,
                                               omega, problem.alpha, +1.0);
      base3 = std::make_shared<HyperbolicBase>(HyperbolicBase::Kind::Sinh, A,
                                               omega, problem.beta, -1.0);
      break;
    }
    case Method::Cosh: {
      if (cnorm <= 0.0)
        throw ConstructError("cosh construction needs sup |c| > 0");
      const double A = tau * mminus / cnorm;
      const double omega = std::sqrt(cnorm / out.k);
      out.sigma = A;
      base1 = std::make_shared<HyperbolicBase>(HyperbolicBase::Kind::CoshMinusOne,
                                               A, omega, problem.alpha, +1.0);
      base3 = std::make_shared<HyperbolicBase>(HyperbolicBase::Kind::CoshMinusOne,
                                               A, omega, problem.beta, -1.0);
      break;
    }
    case Method::I1: {
      const CumulativeFactor factors = exp_factors(problem.b);
      double bunder_sup = 0.0;
      for (int i = 0; i <= 2048; ++i) {
        const double x =
            problem.alpha + (problem.beta - problem.alpha) * i / 2048.0;
        bunder_sup = std::max(bunder_sup, factors.Bunder(x));
      }
      out.sigma = bunder_sup * std::sqrt((tau * mminus + cnorm) / Cp);
      auto table = std::make_shared<CumulativeTable>(
          [factors](double x) { return factors.Bbar(x); }, problem.alpha,
          problem.beta, problem.b.breakpoints());
      auto b1 = std::make_shared<IntegralBase>(out.sigma, table, +1.0);
      auto b3 = std::make_shared<IntegralBase>(out.sigma, table, -1.0);
      b1->set_integrand_derivative(
          [factors, b = problem.b](double x) { return factors.Bbar(x) * b(x); });
      b3->set_integrand_derivative(
          [factors, b = problem.b](double x) { return factors.Bbar(x) * b(x); });
      base1 = b1;
      base3 = b3;
      break;
    }
    case Method::I2: {
      const CumulativeFactor factors = exp_factors(problem.b);
      out.sigma = tau * (1.0 - problem.p);
      const auto bp = problem.m.breakpoints();
      double eps = 1e-3;
      for (int halving = 0;; ++halving) {
        auto inner = std::make_shared<CumulativeTable>(
            [factors, mm = decomp.m_minus, eps](double t) {
              return mm(t) * factors.Bunder(t) + eps;
            },
            problem.alpha, problem.beta, bp);
        auto outer1 = std::make_shared<CumulativeTable>(
            [factors, inner](double y) { return factors.Bbar(y) * (*inner)(y); },
            problem.alpha, problem.beta, bp);
        auto outer3 = std::make_shared<CumulativeTable>(
            [factors, inner](double y) {
              return factors.Bbar(y) * (inner->total() - (*inner)(y));
            },
            problem.alpha, problem.beta, bp);
        const double sup1 = std::pow(out.sigma * (*outer1)(I.hi), out.k);
        const double sup3 =
            std::pow(out.sigma * (outer3->total() - (*outer3)(I.lo)), out.k);
        if (std::max(sup1, sup3) <= 1.0 || opts.allow_tall ||
            halving >= 60) {
          if (std::max(sup1, sup3) > 1.0 && !opts.allow_tall)
            throw ConstructError("tau outside admissible window");
          out.epsilon = eps;
          base1 = std::make_shared<IntegralBase>(out.sigma, outer1, +1.0);
          base3 = std::make_shared<IntegralBase>(out.sigma, outer3, -1.0);
          break;
        }
        eps *= 0.5;
      }
      break;
    }
  }

  auto p1 = std::make_shared<PowerPiece>(base1, out.k);
  auto p3 = std::make_shared<PowerPiece>(base3, out.k);
  out.u1 = PiecewiseFunction({{problem.alpha, I.hi, p1}});
  out.u3 = PiecewiseFunction({{I.lo, problem.beta, p3}});

  if (!opts.allow_tall) {
    const double sup1 = (*out.u1)(I.hi);       // u1 is increasing
    const double sup3 = (*out.u3)(I.lo);       // u3 is decreasing
    if (std::max(sup1, sup3) > 1.0 + 1e-9)
      throw ConstructError("tau outside admissible window");
  }
  return out;
}

namespace {

// First crossing of diff (positive at `from`) scanning toward `to`.
std::optional<double> first_crossing(const std::function<double(double)>& diff,
                                     double from, double to) {
  constexpr int N = 4096;
  double xprev = from, dprev = diff(from);
  if (dprev <= 0.0) return from;
  for (int i = 1; i <= N; ++i) {
    const double x = from + (to - from) * i / static_cast<double>(N);
    const double d = diff(x);
    if (d <= 0.0) {
      double a = xprev, b = x;  // diff(a) > 0 >= diff(b) (or b is first <= 0)
      for (int it = 0; it < 100 && std::abs(b - a) > 1e-13; ++it) {
        const double mid = 0.5 * (a + b);
        if (diff(mid) > 0.0)
          a = mid;
        else
          b = mid;
      }
      return 0.5 * (a + b);
    }
    xprev = x;
    dprev = d;
  }
  return std::nullopt;
}

}  // namespace

SubsolutionSpec glue(const OuterPieces& outer, const EigenPair& eig,
                     const Problem& problem, double tau, Method method) {
  SubsolutionSpec spec;
  spec.tau = tau;
  spec.method = method;
  spec.k = outer.k;
  spec.sigma = outer.sigma;
  spec.epsilon = outer.epsilon;
  spec.I = eig.I;
  spec.degenerate = outer.degenerate;

  const double alpha = problem.alpha, beta = problem.beta;
  const bool left_at_alpha = eig.I.lo <= alpha + 1e-12;
  const bool right_at_beta = eig.I.hi >= beta - 1e-12;

  auto u2piece = std::make_shared<SamplePiece>(eig.I.lo, eig.I.hi, eig.values);

  double xu = eig.I.lo, xo = eig.I.hi;
  if (!outer.degenerate && !left_at_alpha) {
    const auto& u1 = *outer.u1;
    auto hit = first_crossing(
        [&](double x) { return u1(x) - eig.u2(x); }, eig.I.lo, eig.I.hi);
    if (!hit)
      throw ConstructError("glue: u1 never meets u2 inside I");
    xu = *hit;
  }
  if (!outer.degenerate && !right_at_beta) {
    const auto& u3 = *outer.u3;
    auto hit = first_crossing(
        [&](double x) { return u3(x) - eig.u2(x); }, eig.I.hi, eig.I.lo);
    if (!hit)
      throw ConstructError("glue: u3 never meets u2 inside I");
    xo = *hit;
  }
  if (!(xu < xo))
    throw ConstructError("glue: junction ordering violated (x_under0 >= x_over1)");
  spec.x_under0 = xu;
  spec.x_over1 = xo;

  // Junction checks: value equality and upward derivative jump.
  if (!outer.degenerate && !left_at_alpha) {
    const auto& u1 = *outer.u1;
    if (std::abs(u1(xu) - eig.u2(xu)) > 1e-10)
      throw ConstructError("glue: junction value gap at x_under0");
    if (u1.d1(xu) > eig.u2.d1(xu) + 1e-8)
      throw ConstructError("glue: derivative ordering violated at x_under0");
  }
  if (!outer.degenerate && !right_at_beta) {
    const auto& u3 = *outer.u3;
    if (std::abs(u3(xo) - eig.u2(xo)) > 1e-10)
      throw ConstructError("glue: junction value gap at x_over1");
    if (eig.u2.d1(xo) > u3.d1(xo) + 1e-8)
      throw ConstructError("glue: derivative ordering violated at x_over1");
  }

  std::vector<PiecewiseFunction::Segment> segs;
  auto zero = std::make_shared<ZeroPiece>();
  if (!left_at_alpha && xu > alpha + 1e-13) {
    if (outer.degenerate)
      segs.push_back({alpha, xu, zero});
    else
      segs.push_back({alpha, xu, outer.u1->segment(0).fn});
  }
  segs.push_back({std::max(alpha, xu), std::min(beta, xo), u2piece});
  if (!right_at_beta && xo < beta - 1e-13) {
    if (outer.degenerate)
      segs.push_back({xo, beta, zero});
    else
      segs.push_back({xo, beta, outer.u3->segment(0).fn});
  }
  spec.glued = PiecewiseFunction(std::move(segs));
  return spec;
}

VerificationReport verify_subsolution(const SubsolutionSpec& spec,
                                      const Problem& problem,
                                      const Coefficient& weight) {
  VerificationReport rep;
  const double wnorm = weight.sup_abs(problem.alpha, problem.beta);
  rep.tolerance = 1e-8 * (1.0 + wnorm);
  rep.max_violation = -std::numeric_limits<double>::infinity();

  const auto wb = weight.breakpoints();
  for (std::size_t s = 0; s < spec.glued.size(); ++s) {
    const auto& seg = spec.glued.segment(s);
    // split at weight/coefficient breakpoints inside the segment
    std::vector<double> cuts{seg.lo, seg.hi};
    for (double t : wb)
      if (t > seg.lo + 1e-12 && t < seg.hi - 1e-12) cuts.push_back(t);
    for (double t : problem.c.breakpoints())
      if (t > seg.lo + 1e-12 && t < seg.hi - 1e-12) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      const double lo = cuts[j], hi = cuts[j + 1];
      const std::size_t N = 10000;
      for (std::size_t i = 0; i < N; ++i) {
        const double x = lo + (hi - lo) * (static_cast<double>(i) + 0.5) /
                                  static_cast<double>(N);
        const double u = std::max(0.0, seg.fn->value(x));
        const double Lu = -seg.fn->d2(x) + problem.b(x) * seg.fn->d1(x) +
                          problem.c(x) * u;
        const double rhs = weight(x) * std::pow(u, problem.p);
        const double viol = Lu - rhs;
        ++rep.nodes_checked;
        if (viol > rep.max_violation) {
          rep.max_violation = viol;
          rep.worst_x = x;
        }
      }
    }
  }
  rep.pass = rep.max_violation <= rep.tolerance;
  return rep;
}

double SupersolutionSpec::value(double xq) const {
  // linear interpolation is enough: used only as an iteration ceiling
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  if (it == x.begin()) return k_super * (phi.front() + 1.0);
  if (it == x.end()) return k_super * (phi.back() + 1.0);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double t = (xq - x[i - 1]) / (x[i] - x[i - 1]);
  return k_super * ((1.0 - t) * phi[i - 1] + t * phi[i] + 1.0);
}

SupersolutionSpec build_supersolution(const Problem& problem,
                                      const Coefficient& weight, int n) {
  const auto decomp = decompose_weight(weight);
  if (decomp.m_plus.sup(problem.alpha, problem.beta) <= 1e-14)
    throw ConstructError("supersolution: weight has no positive part");

  const double h = (problem.beta - problem.alpha) / (n + 1);
  std::vector<double> lower(n), diag(n), upper(n), rhs(n);
  for (int i = 0; i < n; ++i) {
    const double x = problem.alpha + (i + 1) * h;
    const double bi = problem.b(x), ci = problem.c(x);
    lower[i] = -1.0 / (h * h) - bi / (2.0 * h);
    diag[i] = 2.0 / (h * h) + ci;
    upper[i] = -1.0 / (h * h) + bi / (2.0 * h);
    rhs[i] = decomp.m_plus(x);
  }
  auto phi = thomas_solve(lower, diag, upper, rhs);

  SupersolutionSpec out;
  out.x.resize(n + 2);
  out.phi.resize(n + 2);
  out.x.front() = problem.alpha;
  out.phi.front() = 0.0;
  for (int i = 0; i < n; ++i) {
    out.x[i + 1] = problem.alpha + (i + 1) * h;
    out.phi[i + 1] = phi[i];
  }
  out.x.back() = problem.beta;
  out.phi.back() = 0.0;

  double phimax = 0.0;
  for (double v : out.phi) phimax = std::max(phimax, v);
  out.k_super = std::pow(phimax + 1.0, problem.p / (1.0 - problem.p));

  // discrete supersolution inequality at the nodes
  for (int i = 0; i < n; ++i) {
    const double x = out.x[i + 1];
    const double lhs =
        out.k_super * (decomp.m_plus(x) + problem.c(x));
    const double uv = out.k_super * (phi[i] + 1.0);
    const double rhsv = weight(x) * std::pow(uv, problem.p);
    if (lhs < rhsv - 1e-9 * (1.0 + std::abs(rhsv)))
      throw ConstructError("supersolution: discrete inequality failed");
  }
  return out;
}

}  // namespace sublin
