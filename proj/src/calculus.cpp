#include "sublin/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace sublin {

namespace {

// 5-point Gauss-Legendre nodes/weights on [-1,1].
constexpr double kG5x[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                            0.538469310105683, 0.906179845938664};
constexpr double kG5w[5] = {0.236926885056189, 0.478628670499366,
                            0.568888888888889, 0.478628670499366,
                            0.236926885056189};

double gauss5(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += kG5w[i] * f(c + h * kG5x[i]);
  return s * h;
}

}  // namespace

CumulativeTable::CumulativeTable(std::function<double(double)> f, double lo,
                                 double hi, std::span<const double> breakpoints,
                                 std::size_t cells)
    : f_(std::move(f)) {
  std::vector<double> grid;
  grid.reserve(cells + breakpoints.size() + 2);
  for (std::size_t i = 0; i <= cells; ++i)
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells));
  for (double b : breakpoints)
    if (b > lo && b < hi) grid.push_back(b);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  x_ = std::move(grid);
  F_.resize(x_.size());
  F_[0] = 0.0;
  for (std::size_t i = 1; i < x_.size(); ++i)
    F_[i] = F_[i - 1] + gauss5(f_, x_[i - 1], x_[i]);
}

double CumulativeTable::operator()(double x) const {
  if (x <= x_.front()) return 0.0;
  if (x >= x_.back()) return F_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  return F_[i] + gauss5(f_, x_[i], x);
}

CumulativeFactor::CumulativeFactor(const Coefficient& b) {
  const auto bp = b.breakpoints();
  cum_ = CumulativeTable([b](double x) { return b(x); }, b.lo(), b.hi(), bp);
}

double CumulativeFactor::Bbar(double x) const { return std::exp(cum_(x)); }
double CumulativeFactor::Bunder(double x) const { return std::exp(-cum_(x)); }

CumulativeFactor exp_factors(const Coefficient& b) { return CumulativeFactor(b); }

double constant_Cp(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ModelError("Cp: p must lie in (0,1)");
  return 2.0 * (1.0 + p) / ((1.0 - p) * (1.0 - p));
}

QuadResult apriori_integral(const Problem& problem, const CumulativeFactor& factors,
                            const WeightDecomposition& decomp) {
  const auto bp = problem.m.breakpoints();
  const auto& mp = decomp.m_plus;
  CumulativeTable inner([&mp, &factors](double t) { return mp(t) * factors.Bunder(t); },
                        problem.alpha, problem.beta, bp);
  return integrate(
      [&factors, &inner](double x) { return factors.Bbar(x) * inner(x); },
      problem.alpha, problem.beta, 1e-9, bp);
}

DerivedConstants derived_constants(const Problem& problem, const Interval& I) {
  problem.validate();
  DerivedConstants d;
  d.problem_hash = problem.hash();
  d.Cp = constant_Cp(problem.p);
  d.gamma = std::max(problem.beta - I.lo, I.hi - problem.alpha);

  const CumulativeFactor factors = exp_factors(problem.b);
  const auto decomp = decompose_weight(problem.m);
  const auto bp = problem.m.breakpoints();

  // gamma_b = max of the one-sided L1 norms of Bbar.
  const auto q1 = integrate([&factors](double x) { return factors.Bbar(x); },
                            problem.alpha, I.hi, 1e-10);
  const auto q2 = integrate([&factors](double x) { return factors.Bbar(x); },
                            I.lo, problem.beta, 1e-10);
  d.gamma_b = std::max(q1.value, q2.value);

  // M_script = max of the two nested window integrals over m^- Bunder.
  const auto& mm = decomp.m_minus;
  CumulativeTable neg([&mm, &factors](double t) { return mm(t) * factors.Bunder(t); },
                      problem.alpha, problem.beta, bp);
  const auto w1 = integrate(
      [&factors, &neg](double x) { return factors.Bbar(x) * (neg.total() - neg(x)); },
      I.lo, problem.beta, 1e-9, bp);
  const auto w2 = integrate(
      [&factors, &neg](double x) { return factors.Bbar(x) * neg(x); },
      problem.alpha, I.hi, 1e-9, bp);
  d.M_script = std::max(w1.value, w2.value);

  // K_b = int_alpha^beta Bbar(x) ||Bunder||_{L2(alpha,x)} dx.
  CumulativeTable bu2([&factors](double t) {
    const double v = factors.Bunder(t);
    return v * v;
  }, problem.alpha, problem.beta);
  const auto kb = integrate(
      [&factors, &bu2](double x) {
        return factors.Bbar(x) * std::sqrt(std::max(0.0, bu2(x)));
      },
      problem.alpha, problem.beta, 1e-9);
  d.K_b = kb.value;

  const auto jp = apriori_integral(problem, factors, decomp);
  d.J_plus = jp.value;
  d.quadrature_error = jp.error_estimate + w1.error_estimate + w2.error_estimate +
                       q1.error_estimate + q2.error_estimate + kb.error_estimate;
  return d;
}

std::optional<double> sup_mplus_over_c(const Problem& problem,
                                       const WeightDecomposition& decomp) {
  // Disable when c vanishes anywhere on M+ (interiors of the plus region).
  double best = 0.0;
  for (const auto& I : decomp.plus_region) {
    const double shrink = 1e-9 * (I.hi - I.lo);
    const double lo = I.lo + shrink, hi = I.hi - shrink;
    if (problem.c.inf(lo, hi) <= 0.0) return std::nullopt;
    Coefficient ratio = Coefficient::callable(
        [c = problem.c, mp = decomp.m_plus](double x) { return mp(x) / c(x); }, lo, hi);
    // refine at breakpoints of either coefficient for the per-piece search
    std::vector<double> cuts = problem.c.breakpoints();
    const auto mb = decomp.m_plus.breakpoints();
    cuts.insert(cuts.end(), mb.begin(), mb.end());
    std::vector<double> inside;
    for (double t : cuts)
      if (t > lo && t < hi) inside.push_back(t);
    best = std::max(best, ratio.refined(inside).sup(lo, hi));
  }
  return best;
}

AprioriBound apriori_bound(const Problem& problem) {
  problem.validate();
  AprioriBound out;
  const CumulativeFactor factors = exp_factors(problem.b);
  const auto decomp = decompose_weight(problem.m);
  const double jp = apriori_integral(problem, factors, decomp).value;
  const double expo = 1.0 / (1.0 - problem.p);
  out.inerte = std::pow(std::max(0.0, jp), expo);
  out.bound = out.inerte;
  if (const auto s = sup_mplus_over_c(problem, decomp)) {
    out.has_dudu = true;
    out.dudu = std::pow(std::max(0.0, *s), expo);
    out.bound = std::min(out.bound, out.dudu);
  }
  return out;
}

}  // namespace sublin
