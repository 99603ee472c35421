#include "sublin/eigen.hpp"

#include <algorithm>
#include <cmath>

namespace sublin {

namespace {

struct Tridiag {
  std::vector<double> diag, off;  // symmetric: off[i] couples i and i+1
};

// LDL^T factorization of a symmetric positive definite tridiagonal matrix.
struct TridiagFactor {
  std::vector<double> d, l;
  explicit TridiagFactor(const Tridiag& A) {
    const std::size_t n = A.diag.size();
    d.resize(n);
    l.resize(n > 0 ? n - 1 : 0);
    d[0] = A.diag[0];
    for (std::size_t i = 1; i < n; ++i) {
      if (d[i - 1] <= 0.0) throw EigenError("eigen: matrix not positive definite");
      l[i - 1] = A.off[i - 1] / d[i - 1];
      d[i] = A.diag[i] - l[i - 1] * A.off[i - 1];
    }
  }
  void solve(std::vector<double>& x) const {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) x[i] -= l[i - 1] * x[i - 1];
    for (std::size_t i = 0; i < n; ++i) x[i] /= d[i];
    for (std::size_t i = n - 1; i >= 1; --i) x[i - 1] -= l[i - 1] * x[i];
  }
};

struct DiscreteEigen {
  double lambda;
  std::vector<double> v;  // interior values, positive, max 1
};

DiscreteEigen solve_once(const Problem& problem, const Interval& I, int n,
                         const CumulativeFactor& factors) {
  const double h = (I.hi - I.lo) / (n + 1);
  Tridiag A;
  A.diag.resize(n);
  A.off.resize(n - 1);
  std::vector<double> mass(n);
  bool any_mass = false;
  for (int i = 0; i < n; ++i) {
    const double x = I.lo + (i + 1) * h;
    const double bl = factors.Bunder(x - 0.5 * h);
    const double br = factors.Bunder(x + 0.5 * h);
    A.diag[i] = (bl + br) / (h * h) + factors.Bunder(x) * problem.c(x);
    if (i + 1 < n) A.off[i] = -br / (h * h);
    mass[i] = factors.Bunder(x) * std::max(0.0, problem.m(x));
    if (mass[i] > 0.0) any_mass = true;
  }
  if (!any_mass) throw EigenError("eigen: weight vanishes identically on I");

  const TridiagFactor F(A);
  std::vector<double> v(n, 1.0), w(n);
  double lam = 0.0, lam_prev2 = 0.0;
  bool converged = false;
  for (int it = 0; it < 10000; ++it) {
    for (int i = 0; i < n; ++i) w[i] = mass[i] * v[i];
    F.solve(w);
    double nrm = 0.0;
    for (double t : w) nrm = std::max(nrm, std::abs(t));
    if (nrm == 0.0) throw EigenError("eigen: iteration collapsed to zero");
    for (double& t : w) t /= nrm;
    // Rayleigh quotient lambda = v^T A v / v^T M v; extended precision keeps
    // the summation noise below the convergence threshold on fine grids
    long double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      double av = A.diag[i] * w[i];
      if (i > 0) av += A.off[i - 1] * w[i - 1];
      if (i + 1 < n) av += A.off[i] * w[i + 1];
      num += static_cast<long double>(w[i]) * av;
      den += static_cast<long double>(w[i]) * mass[i] * w[i];
    }
    const double lam_new = static_cast<double>(num / den);
    v.swap(w);
    // accept plain convergence or a rounding-induced two-cycle, where the
    // quotient alternates between two values a few ulps of the vector apart
    if (it > 0 && (std::abs(lam_new - lam) <= 1e-13 * std::abs(lam_new) ||
                   (it > 1 && std::abs(lam_new - lam_prev2) <=
                                  1e-13 * std::abs(lam_new)))) {
      lam = lam_new;
      converged = true;
      break;
    }
    lam_prev2 = lam;
    lam = lam_new;
  }
  if (!converged)
    throw EigenError("eigen: power iteration failed to converge in 10^4 steps");

  // Orient positively and normalize to sup-norm one.
  double mx = 0.0;
  for (double t : v)
    if (std::abs(t) > std::abs(mx)) mx = t;
  for (double& t : v) t /= mx;
  for (double t : v)
    if (t <= 0.0) throw EigenError("eigen: eigenvector not positive at a node");
  return {lam, std::move(v)};
}

}  // namespace

EigenPair principal_eigenpair(const Problem& problem, const Interval& I,
                              double tol, int n0) {
  if (!(I.lo >= problem.alpha - 1e-12 && I.hi <= problem.beta + 1e-12 &&
        I.lo < I.hi))
    throw EigenError("eigen: interval outside the domain");
  const CumulativeFactor factors = exp_factors(problem.b);

  // Successive Richardson extrapolations over grid doublings; the error
  // estimate compares consecutive extrapolated values (order h^4), not the
  // raw h^2 difference, which would grossly overstate the extrapolated error.
  int n = n0;
  double lam = 0.0, est = 0.0;
  DiscreteEigen coarse = solve_once(problem, I, n, factors);
  DiscreteEigen fine = solve_once(problem, I, 2 * n, factors);
  double extrap = fine.lambda + (fine.lambda - coarse.lambda) / 3.0;
  for (int attempt = 0;; ++attempt) {
    n *= 2;
    coarse = std::move(fine);
    fine = solve_once(problem, I, 2 * n, factors);
    const double extrap_new = fine.lambda + (fine.lambda - coarse.lambda) / 3.0;
    est = std::abs(extrap_new - extrap);
    lam = extrap_new;
    extrap = extrap_new;
    if (est <= tol * std::max(1.0, std::abs(lam)) || attempt >= 3) break;
  }
  if (est > tol * std::max(1.0, std::abs(lam)))
    throw EigenError("eigen: requested tolerance unreachable by grid refinement");

  EigenPair out;
  out.lambda1 = lam;
  out.I = I;
  out.n = 2 * n;
  out.error_estimate = est;
  const int nn = 2 * n;
  const double h = (I.hi - I.lo) / (nn + 1);
  out.nodes.resize(nn + 2);
  out.values.resize(nn + 2);
  out.nodes.front() = I.lo;
  out.values.front() = 0.0;
  for (int i = 0; i < nn; ++i) {
    out.nodes[i + 1] = I.lo + (i + 1) * h;
    out.values[i + 1] = fine.v[i];
  }
  out.nodes.back() = I.hi;
  out.values.back() = 0.0;

  auto piece = std::make_shared<SamplePiece>(I.lo, I.hi, out.values);
  out.u2 = PiecewiseFunction({{I.lo, I.hi, piece}});
  return out;
}

}  // namespace sublin
