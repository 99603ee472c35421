#include "sublin/certify.hpp"

#include <algorithm>
#include <cmath>

namespace sublin {

std::string to_string(ConditionName n) {
  switch (n) {
    case ConditionName::seno: return "seno";
    case ConditionName::expo: return "expo";
    case ConditionName::lap: return "lap";
    case ConditionName::rem: return "rem";
    case ConditionName::i1: return "i1";
    case ConditionName::i2: return "i2";
    case ConditionName::puf: return "puf";
    case ConditionName::nec: return "nec";
    case ConditionName::nec_c: return "nec_c";
    case ConditionName::trivial_mplus: return "trivial_mplus";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Exists: return "Exists";
    case Verdict::NotExists: return "NotExists";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

ConditionReport ConditionReport::skipped(ConditionName n, std::string reason) {
  ConditionReport r;
  r.name = n;
  r.applied = false;
  r.skip_reason = std::move(reason);
  r.holds = false;
  return r;
}

const EigenPair& EigenCache::get(const Problem& problem, const Interval& I,
                                 double tol) {
  const auto key = std::make_pair(I.lo, I.hi);
  auto it = cache_.find(key);
  if (it == cache_.end())
    it = cache_.emplace(key, principal_eigenpair(problem, I, tol)).first;
  return it->second;
}

namespace {

double tau_pick(double lambda1, double inv_lhs) {
  // Geometric mean of the admissible window keeps slack on both sides for
  // the downstream pointwise verification.
  if (!std::isfinite(inv_lhs) || inv_lhs <= 0.0) return 2.0 * lambda1;
  return std::sqrt(lambda1 * inv_lhs);
}

void finish_sufficient(ConditionReport& r, double lambda1, double eigen_est,
                       bool strict) {
  r.applied = true;
  r.strict = strict;
  r.rhs = 1.0 / lambda1;
  r.quadrature_error += eigen_est / (lambda1 * lambda1);
  r.margin = r.rhs - r.lhs;
  r.holds = strict ? (r.lhs < r.rhs - r.quadrature_error) : (r.lhs <= r.rhs);
  if (r.holds) {
    const double inv_lhs = r.lhs > 0.0 ? 1.0 / r.lhs
                                       : std::numeric_limits<double>::infinity();
    r.tau_window = Interval{lambda1, inv_lhs};
  }
}

}  // namespace

ConditionReport check_theorem_aa(const Problem& problem, const Interval& I,
                                 TheoremAaVariant variant, EigenCache* cache) {
  EigenCache local;
  if (!cache) cache = &local;
  const ConditionName name =
      variant == TheoremAaVariant::seno   ? ConditionName::seno
      : variant == TheoremAaVariant::expo ? ConditionName::expo
      : variant == TheoremAaVariant::lap  ? ConditionName::lap
                                          : ConditionName::rem;
  if (!problem.b.is_identically(0.0, 1e-14))
    return ConditionReport::skipped(name, "drift term b not identically zero");

  const double Cp = constant_Cp(problem.p);
  const double gamma = std::max(problem.beta - I.lo, I.hi - problem.alpha);
  const auto decomp = decompose_weight(problem.m);
  const double mminus = decomp.m_minus.sup(problem.alpha, problem.beta);
  const double cnorm = problem.c.sup(problem.alpha, problem.beta);

  ConditionReport r;
  r.name = name;
  r.interval = I;

  switch (variant) {
    case TheoremAaVariant::seno: {
      if (cnorm <= 0.0)
        return ConditionReport::skipped(name, "division by sup |c|; use lap");
      const double s = std::sinh(gamma * std::sqrt(cnorm / Cp));
      r.lhs = mminus / cnorm * s * s;
      break;
    }
    case TheoremAaVariant::expo: {
      if (cnorm <= 0.0)
        return ConditionReport::skipped(name, "division by sup |c|; use lap");
      r.lhs = mminus / cnorm *
              (std::cosh(gamma * std::sqrt((1.0 - problem.p) * cnorm)) - 1.0);
      break;
    }
    case TheoremAaVariant::lap: {
      r.lhs = gamma * gamma * mminus / Cp;
      break;
    }
    case TheoremAaVariant::rem: {
      // c norm taken over M^- only; requires c <= m^+ on M^+.
      // essential sup over the open set: keep jump values at the interval
      // ends (which belong to the neighbouring piece) out of the picture
      double cneg = 0.0;
      for (const auto& J : decomp.minus_region) {
        const double shrink = 1e-9 * (J.hi - J.lo);
        cneg = std::max(cneg, problem.c.sup(J.lo + shrink, J.hi - shrink));
      }
      if (cneg <= 0.0)
        return ConditionReport::skipped(name, "c vanishes on M^-; use lap");
      // The companion hypothesis c <= m^+ on M^+ refers to the weight the
      // theorem is applied to, which is tau*m for a tau in the admissible
      // window; it therefore amounts to tau >= sup_{M^+} c/m^+, recorded
      // below by trimming the window.  Unbounded c/m^+ disables the variant.
      double s_req = 0.0;
      for (const auto& J : decomp.plus_region) {
        const double shrink = 1e-9 * (J.hi - J.lo);
        for (int i = 0; i <= 2048; ++i) {
          const double x =
              J.lo + shrink + (J.hi - J.lo - 2.0 * shrink) * i / 2048.0;
          const double cv = problem.c(x);
          if (cv <= 0.0) continue;
          const double mp = decomp.m_plus(x);
          if (mp <= 1e-14 * cv) {
            return ConditionReport::skipped(name, "c/m^+ unbounded on M^+");
          }
          s_req = std::max(s_req, cv / mp);
        }
      }
      const double s = std::sinh(gamma * std::sqrt(cneg / Cp));
      r.lhs = mminus / cneg * s * s;
      const EigenPair& eig = cache->get(problem, I);
      finish_sufficient(r, eig.lambda1, eig.error_estimate, false);
      if (r.holds && r.tau_window) {
        r.tau_window->lo = std::max(r.tau_window->lo, s_req);
        if (!(r.tau_window->lo <= r.tau_window->hi)) {
          r.holds = false;
          r.tau_window.reset();
        }
      }
      return r;
    }
  }

  const EigenPair& eig = cache->get(problem, I);
  finish_sufficient(r, eig.lambda1, eig.error_estimate, false);
  return r;
}

ConditionReport check_theorem_bien(const Problem& problem, const Interval& I,
                                   TheoremBienVariant variant, EigenCache* cache) {
  EigenCache local;
  if (!cache) cache = &local;
  const ConditionName name = variant == TheoremBienVariant::i1 ? ConditionName::i1
                             : variant == TheoremBienVariant::i2
                                 ? ConditionName::i2
                                 : ConditionName::puf;
  const double Cp = constant_Cp(problem.p);
  const auto decomp = decompose_weight(problem.m);
  ConditionReport r;
  r.name = name;
  r.interval = I;

  if (variant == TheoremBienVariant::i1) {
    const auto d = derived_constants(problem, I);
    const CumulativeFactor f = exp_factors(problem.b);
    double bunder_sup = 0.0;
    for (int i = 0; i <= 2048; ++i) {
      const double x =
          problem.alpha + (problem.beta - problem.alpha) * i / 2048.0;
      bunder_sup = std::max(bunder_sup, f.Bunder(x));
    }
    const double g = d.gamma_b * bunder_sup;
    const double den = Cp - problem.c.sup(problem.alpha, problem.beta) * g * g;
    if (den <= 0.0)
      return ConditionReport::skipped(name, "denominator nonpositive");
    const double mminus = decomp.m_minus.sup(problem.alpha, problem.beta);
    r.lhs = g * g / den * mminus;
    r.quadrature_error = d.quadrature_error;
    const EigenPair& eig = cache->get(problem, I);
    finish_sufficient(r, eig.lambda1, eig.error_estimate, false);
    return r;
  }

  if (variant == TheoremBienVariant::i2) {
    if (!problem.c.is_identically(0.0, 1e-14))
      return ConditionReport::skipped(name, "requires c identically zero");
    const auto d = derived_constants(problem, I);
    r.lhs = (1.0 - problem.p) * d.M_script;
    r.quadrature_error = d.quadrature_error;
    const EigenPair& eig = cache->get(problem, I);
    finish_sufficient(r, eig.lambda1, eig.error_estimate, true);
    return r;
  }

  // puf: i2 machinery for the modified weight m/(K_b ||m+||_2) - c with c := 0.
  const double mp_norm2 = std::sqrt(
      integrate([&decomp](double x) {
        const double v = decomp.m_plus(x);
        return v * v;
      }, problem.alpha, problem.beta, 1e-10, problem.m.breakpoints()).value);
  if (mp_norm2 <= 0.0) throw ModelError("puf: m+ identically zero");
  const auto d0 = derived_constants(problem, I);
  const double scale = 1.0 / (d0.K_b * mp_norm2);

  Problem mod = problem;
  mod.c = Coefficient::constant(0.0, problem.alpha, problem.beta);
  mod.m = combine(problem.m.scaled(scale), 1.0, problem.c, -1.0);

  const auto mdec = decompose_weight(mod.m);
  std::vector<Interval> cands;
  try {
    cands = candidate_intervals(mdec);
  } catch (const ModelError&) {
    return ConditionReport::skipped(name, "modified weight has no positivity interval");
  }
  // pick the modified candidate overlapping I most
  const Interval* bestI = nullptr;
  double best_overlap = 0.0;
  for (const auto& J : cands) {
    const double ov = std::min(J.hi, I.hi) - std::max(J.lo, I.lo);
    if (ov > best_overlap) {
      best_overlap = ov;
      bestI = &J;
    }
  }
  if (!bestI)
    return ConditionReport::skipped(name, "modified weight positive outside I");

  const auto d = derived_constants(mod, *bestI);
  r.lhs = (1.0 - problem.p) * d.M_script;
  r.quadrature_error = d.quadrature_error;
  r.interval = *bestI;
  EigenCache modcache;  // modified weight: do not reuse the caller cache
  const EigenPair& eig = modcache.get(mod, *bestI);
  finish_sufficient(r, eig.lambda1, eig.error_estimate, true);
  if (r.tau_window) {
    // downstream weight is tau * scale * m; record via the witness path
  }
  return r;
}

namespace {

// Range-maximum/minimum query structures over a fixed array (sparse table).
struct RangeExtrema {
  std::vector<std::vector<double>> mx, mn;
  explicit RangeExtrema(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::size_t levels = 1;
    while ((1u << levels) <= n) ++levels;
    mx.assign(levels, v);
    mn.assign(levels, v);
    for (std::size_t k = 1; k < levels; ++k)
      for (std::size_t i = 0; i + (1u << k) <= n; ++i) {
        mx[k][i] = std::max(mx[k - 1][i], mx[k - 1][i + (1u << (k - 1))]);
        mn[k][i] = std::min(mn[k - 1][i], mn[k - 1][i + (1u << (k - 1))]);
      }
  }
  double max(std::size_t lo, std::size_t hi) const {  // inclusive
    const std::size_t len = hi - lo + 1;
    std::size_t k = 0;
    while ((2u << k) <= len) ++k;
    return std::max(mx[k][lo], mx[k][hi + 1 - (1u << k)]);
  }
  double min(std::size_t lo, std::size_t hi) const {
    const std::size_t len = hi - lo + 1;
    std::size_t k = 0;
    while ((2u << k) <= len) ++k;
    return std::min(mn[k][lo], mn[k][hi + 1 - (1u << k)]);
  }
};

}  // namespace

std::vector<ConditionReport> check_necessary(const Problem& problem) {
  const double Cp = constant_Cp(problem.p);
  const auto decomp = decompose_weight(problem.m);
  const CumulativeFactor factors = exp_factors(problem.b);
  const auto jp = apriori_integral(problem, factors, decomp);

  // sup over the ball family of [gamma_{b,R}/sup_{I_R} Bbar]^2 * inf_{I_R} m^-
  double lhs = 0.0;
  for (const auto& J : decomp.nonpos_region) {
    constexpr std::size_t N = 4096;  // cells; 257 centers are grid-aligned
    std::vector<double> cumb(N + 1), bbar_int(N + 1), mneg(N + 1);
    const double h = (J.hi - J.lo) / N;
    for (std::size_t i = 0; i <= N; ++i) {
      const double x = J.lo + i * h;
      cumb[i] = factors.cumulative_b(x);
      mneg[i] = decomp.m_minus(x);
    }
    bbar_int[0] = 0.0;
    for (std::size_t i = 1; i <= N; ++i) {
      // Simpson on the cell midpoint for int Bbar
      const double xm = J.lo + (i - 0.5) * h;
      bbar_int[i] = bbar_int[i - 1] +
                    h / 6.0 *
                        (std::exp(cumb[i - 1]) + 4.0 * factors.Bbar(xm) +
                         std::exp(cumb[i]));
    }
    const RangeExtrema rq_cumb(cumb);
    const RangeExtrema rq_mneg(mneg);
    for (std::size_t ci = 0; ci <= 256; ++ci) {
      const std::size_t c = ci * (N / 256);
      const std::size_t rmax = std::min(c, N - c);
      if (rmax == 0) continue;
      for (std::size_t rj = 1; rj <= 128; ++rj) {
        // round outward to grid indices (conservative for inf and sup)
        const double rexact = static_cast<double>(rmax) * rj / 128.0;
        const std::size_t ri = static_cast<std::size_t>(std::ceil(rexact - 1e-9));
        const std::size_t lo = c - std::min(c, ri);
        const std::size_t hi = std::min(N, c + ri);
        const double gl = bbar_int[c] - bbar_int[lo];
        const double gr = bbar_int[hi] - bbar_int[c];
        const double gamma_bR = std::min(gl, gr);
        const double bbar_sup = std::exp(rq_cumb.max(lo, hi));
        const double infm = rq_mneg.min(lo, hi);
        const double ratio = gamma_bR / bbar_sup;
        lhs = std::max(lhs, ratio * ratio * infm);
      }
    }
  }

  ConditionReport r;
  r.name = ConditionName::nec;
  r.applied = true;
  r.lhs = lhs;
  r.rhs = Cp * jp.value;
  r.quadrature_error = Cp * jp.error_estimate;
  r.margin = r.rhs - r.lhs;
  r.holds = r.lhs <= r.rhs;
  std::vector<ConditionReport> out{r};

  if (const auto s = sup_mplus_over_c(problem, decomp)) {
    ConditionReport rc = r;
    rc.name = ConditionName::nec_c;
    rc.rhs = Cp * *s;
    rc.quadrature_error = 0.0;
    rc.margin = rc.rhs - rc.lhs;
    rc.holds = rc.lhs <= rc.rhs;
    out.push_back(rc);
  }
  return out;
}

namespace {

Method method_for(ConditionName n) {
  switch (n) {
    case ConditionName::seno:
    case ConditionName::rem:
      return Method::Sinh;
    case ConditionName::expo:
      return Method::Cosh;
    case ConditionName::lap:
    case ConditionName::i1:
      return Method::I1;
    default:
      return Method::I2;
  }
}

}  // namespace

Certificate certify(const Problem& input, EigenCache* cache) {
  const Problem problem = normalize(input);
  EigenCache local;
  if (!cache) cache = &local;

  Certificate cert;
  const auto decomp = decompose_weight(problem.m);

  // trivial m+ check
  {
    ConditionReport r;
    r.name = ConditionName::trivial_mplus;
    r.applied = true;
    const double mp = decomp.m_plus.sup(problem.alpha, problem.beta);
    r.lhs = 0.0;
    r.rhs = mp;
    r.margin = mp;
    r.holds = mp > 1e-14;  // holds = "m+ not identically zero"
    cert.reports.push_back(r);
    if (!r.holds) {
      cert.verdict = Verdict::NotExists;
      return cert;
    }
  }

  for (auto& r : check_necessary(problem)) {
    cert.reports.push_back(r);
    if (!r.holds) cert.verdict = Verdict::NotExists;
  }
  if (cert.verdict == Verdict::NotExists) return cert;

  auto cands = candidate_intervals(decomp);
  std::sort(cands.begin(), cands.end(), [&](const Interval& A, const Interval& B) {
    return cache->get(problem, A).lambda1 < cache->get(problem, B).lambda1;
  });

  const bool c_zero = problem.c.is_identically(0.0, 1e-14);
  const double cneg_check = [&] {
    double v = 0.0;
    for (const auto& J : decomp.minus_region) {
      const double shrink = 1e-9 * (J.hi - J.lo);
      v = std::max(v, problem.c.sup(J.lo + shrink, J.hi - shrink));
    }
    return v;
  }();

  for (const auto& I : cands) {
    std::vector<ConditionReport> here;
    here.push_back(check_theorem_aa(problem, I, TheoremAaVariant::seno, cache));
    here.push_back(check_theorem_aa(problem, I, TheoremAaVariant::expo, cache));
    here.push_back(check_theorem_aa(problem, I, TheoremAaVariant::lap, cache));
    here.push_back(check_theorem_aa(problem, I, TheoremAaVariant::rem, cache));
    here.push_back(check_theorem_bien(problem, I, TheoremBienVariant::i1, cache));
    here.push_back(check_theorem_bien(problem, I, TheoremBienVariant::i2, cache));
    try {
      here.push_back(check_theorem_bien(problem, I, TheoremBienVariant::puf, cache));
    } catch (const ModelError&) {
      // puf needs m+ != 0, already ensured; other failures become skips
    }
    for (auto& r : here) {
      if (!r.interval) r.interval = I;
      cert.reports.push_back(r);
    }

    if (cert.witness) continue;

    // Conditions that come with a construction we can verify end-to-end.
    // lap is sound only in the c == 0 limit; puf's construction lives in the
    // modified c-free frame, so with c > 0 both are report-only.
    std::vector<ConditionName> grant =
        c_zero ? std::vector<ConditionName>{ConditionName::lap, ConditionName::i1,
                                            ConditionName::i2, ConditionName::puf}
               : std::vector<ConditionName>{ConditionName::seno, ConditionName::expo,
                                            ConditionName::rem, ConditionName::i1};
    for (const auto& r : here) {
      if (std::find(grant.begin(), grant.end(), r.name) == grant.end()) continue;
      if (!r.applied || !r.holds) continue;
      if (!(r.margin > r.quadrature_error)) continue;  // equality-grade: inconclusive
      Witness w;
      w.I = r.interval.value_or(I);
      w.condition = r.name;
      w.method = method_for(r.name);
      const double lam = r.tau_window ? r.tau_window->lo : 0.0;
      const double inv = r.tau_window ? r.tau_window->hi : 0.0;
      w.tau = tau_pick(lam, inv);
      if (r.name == ConditionName::rem) {
        w.c_norm = cneg_check;
      } else {
        w.c_norm = problem.c.sup(problem.alpha, problem.beta);
      }
      if (r.name == ConditionName::puf) {
        // weight scale from the modified-weight definition
        const auto d0 = derived_constants(problem, I);
        const double mp_norm2 = std::sqrt(
            integrate([&decomp](double x) {
              const double v = decomp.m_plus(x);
              return v * v;
            }, problem.alpha, problem.beta, 1e-10, problem.m.breakpoints()).value);
        w.weight_scale = 1.0 / (d0.K_b * mp_norm2);
      }
      cert.witness = w;
      cert.verdict = Verdict::Exists;
      break;
    }
  }

  return cert;
}

}  // namespace sublin
