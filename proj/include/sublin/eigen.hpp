#pragma once

#include "sublin/model.hpp"
#include "sublin/pwfunction.hpp"

namespace sublin {

struct EigenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EigenPair {
  double lambda1{0.0};
  PiecewiseFunction u2;          // single sampled segment over I, zero ends
  Interval I;
  int n{0};                      // interior nodes of the final grid
  double error_estimate{0.0};
  std::vector<double> nodes;     // I.lo .. I.hi inclusive
  std::vector<double> values;    // u2 at nodes, sup-norm 1
};

/// Principal eigenpair of -(Bunder u')' + Bunder c u = lambda Bunder m u on I
/// with Dirichlet ends, via inverse power iteration on the tridiagonal
/// discretization and Richardson extrapolation over n and 2n.
EigenPair principal_eigenpair(const Problem& problem, const Interval& I,
                              double tol = 1e-8, int n0 = 1000);

}  // namespace sublin
