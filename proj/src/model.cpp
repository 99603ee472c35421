#include "sublin/model.hpp"

#include <algorithm>
#include <cmath>

namespace sublin {

namespace {
constexpr double kSignTol = 1e-14;
}

void Problem::validate() const {
  if (!(alpha < beta)) throw ModelError("problem: alpha must be < beta");
  if (!(p > 0.0 && p < 1.0)) throw ModelError("problem: p must lie in (0,1)");
  if (!(ellipticity_floor > 0.0))
    throw ModelError("problem: ellipticity floor must be positive");
  for (const Coefficient* f : {&a, &b, &c, &m}) {
    if (f->empty()) throw ModelError("problem: missing coefficient");
    if (std::abs(f->lo() - alpha) > 1e-12 || std::abs(f->hi() - beta) > 1e-12)
      throw ModelError("problem: coefficient domain mismatch");
  }
  if (a.inf(alpha, beta) < ellipticity_floor - 1e-12)
    throw ModelError("problem: leading coefficient below ellipticity floor");
  if (c.inf(alpha, beta) < -1e-12)
    throw ModelError("problem: c must be nonnegative");
}

std::uint64_t Problem::hash() const {
  std::uint64_t h = a.hash();
  h = h * 1099511628211ull ^ b.hash();
  h = h * 1099511628211ull ^ c.hash();
  h = h * 1099511628211ull ^ m.hash();
  auto mixd = [&h](double v) {
    auto u = static_cast<std::uint64_t>(std::llround(v * 1e12));
    h = h * 1099511628211ull ^ u;
  };
  mixd(alpha);
  mixd(beta);
  mixd(p);
  return h;
}

Problem make_problem(double alpha, double beta, Coefficient b, Coefficient c,
                     Coefficient m, double p) {
  Problem pr;
  pr.alpha = alpha;
  pr.beta = beta;
  pr.a = Coefficient::constant(1.0, alpha, beta);
  pr.b = std::move(b);
  pr.c = std::move(c);
  pr.m = std::move(m);
  pr.p = p;
  pr.validate();
  return pr;
}

namespace {

enum class Sign { Pos, Neg, Zero };

Sign piece_sign(const Piece& p) {
  // After refinement at roots each piece is one-signed; classify by sampling.
  constexpr int N = 64;
  double mx = -1e300, mn = 1e300;
  for (int i = 0; i <= N; ++i) {
    const double x = p.lo + (p.hi - p.lo) * i / static_cast<double>(N);
    const double v = p.value(x);
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  if (mx > kSignTol && mn > -kSignTol) return Sign::Pos;
  if (mn < -kSignTol && mx < kSignTol) return Sign::Neg;
  if (std::abs(mx) <= kSignTol && std::abs(mn) <= kSignTol) return Sign::Zero;
  // Mixed sign within one refined piece: decide by the interior midpoint.
  const double v = p.value(0.5 * (p.lo + p.hi));
  return v >= 0.0 ? Sign::Pos : Sign::Neg;
}

Piece zero_like(const Piece& p) {
  return Piece{p.lo, p.hi, ClosedForm{}};
}

std::vector<Interval> merge_runs(const std::vector<Piece>& pieces,
                                 const std::vector<Sign>& signs,
                                 const std::vector<Sign>& keep) {
  std::vector<Interval> out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (std::find(keep.begin(), keep.end(), signs[i]) == keep.end()) continue;
    if (!out.empty() && std::abs(out.back().hi - pieces[i].lo) < 1e-13)
      out.back().hi = pieces[i].hi;
    else
      out.push_back({pieces[i].lo, pieces[i].hi});
  }
  return out;
}

}  // namespace

WeightDecomposition decompose_weight(const Coefficient& m) {
  const auto roots = m.sign_changes();
  const Coefficient refined = m.refined(roots);

  std::vector<Piece> plus_pieces, minus_pieces;
  std::vector<Piece> pieces(refined.pieces().begin(), refined.pieces().end());
  std::vector<Sign> signs;
  signs.reserve(pieces.size());
  for (const auto& p : pieces) signs.push_back(piece_sign(p));

  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (signs[i] == Sign::Neg) {
      plus_pieces.push_back(zero_like(pieces[i]));
      Coefficient neg = Coefficient({pieces[i]}).negated();
      minus_pieces.push_back(neg.pieces()[0]);
    } else {
      plus_pieces.push_back(pieces[i]);
      minus_pieces.push_back(zero_like(pieces[i]));
    }
  }

  WeightDecomposition d;
  d.m_plus = Coefficient(std::move(plus_pieces));
  d.m_minus = Coefficient(std::move(minus_pieces));
  d.plus_region = merge_runs(pieces, signs, {Sign::Pos, Sign::Zero});
  d.minus_region = merge_runs(pieces, signs, {Sign::Neg});
  d.nonpos_region = merge_runs(pieces, signs, {Sign::Neg, Sign::Zero});
  return d;
}

std::vector<Interval> candidate_intervals(const WeightDecomposition& d) {
  std::vector<Interval> out;
  for (const auto& I : d.plus_region) {
    if (d.m_plus.sup(I.lo, I.hi) > kSignTol) out.push_back(I);
  }
  if (out.empty())
    throw ModelError(
        "no positivity interval; no solution by the maximum principle");
  return out;
}

namespace {

bool piecewise_constant(const Coefficient& a) {
  for (const auto& p : a.pieces()) {
    const auto* cf = std::get_if<ClosedForm>(&p.form);
    if (!cf) return false;
    if (!cf->is_constant(cf->poly[0], 0.0)) return false;
  }
  return true;
}

Coefficient divide_symbolic(const Coefficient& f, const Coefficient& a) {
  // a piecewise constant: split f at a's breakpoints, scale each sub-piece.
  const auto ab = a.breakpoints();
  Coefficient split = f.refined(ab);
  std::vector<Piece> out;
  for (const auto& p : split.pieces()) {
    const double av = a(0.5 * (p.lo + p.hi));
    Coefficient one = Coefficient({p}).scaled(1.0 / av);
    out.push_back(one.pieces()[0]);
  }
  return Coefficient(std::move(out));
}

Coefficient divide_sampled(const Coefficient& f, const Coefficient& a) {
  std::vector<double> cuts = f.breakpoints();
  const auto ab = a.breakpoints();
  cuts.insert(cuts.end(), ab.begin(), ab.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-13; }),
             cuts.end());
  std::vector<Piece> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    SampledForm sf;
    sf.lo = lo;
    sf.hi = hi;
    constexpr std::size_t n = 4096;
    sf.y.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      const double x = lo + (hi - lo) * static_cast<double>(j) / n;
      sf.y[j] = f(x) / a(x);
    }
    out.push_back(Piece{lo, hi, std::move(sf)});
  }
  return Coefficient(std::move(out));
}

}  // namespace

Problem normalize(const Problem& problem) {
  problem.validate();
  if (problem.a.is_identically(1.0)) return problem;

  Problem out = problem;
  out.a = Coefficient::constant(1.0, problem.alpha, problem.beta);
  if (piecewise_constant(problem.a)) {
    out.b = divide_symbolic(problem.b, problem.a);
    out.c = divide_symbolic(problem.c, problem.a);
    out.m = divide_symbolic(problem.m, problem.a);
  } else {
    out.b = divide_sampled(problem.b, problem.a);
    out.c = divide_sampled(problem.c, problem.a);
    out.m = divide_sampled(problem.m, problem.a);
  }
  out.validate();
  return out;
}

}  // namespace sublin
