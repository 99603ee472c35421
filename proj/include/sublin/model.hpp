#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sublin/piecewise.hpp"

namespace sublin {

struct Interval {
  double lo{0.0}, hi{0.0};
  double length() const { return hi - lo; }
};

/// Full datum of the boundary value problem
///   -a u'' + b u' + c u = m u^p  on (alpha,beta),  u = 0 on the boundary.
struct Problem {
  double alpha{0.0}, beta{1.0};
  Coefficient a, b, c, m;
  double p{0.5};
  double ellipticity_floor{1.0};

  void validate() const;  // throws ModelError
  std::uint64_t hash() const;
};

/// Convenience builder: a=1, b, c, m constants / given coefficients on (alpha,beta).
Problem make_problem(double alpha, double beta, Coefficient b, Coefficient c,
                     Coefficient m, double p);

struct WeightDecomposition {
  Coefficient m_plus, m_minus;
  std::vector<Interval> plus_region;   // maximal intervals with m >= 0
  std::vector<Interval> minus_region;  // maximal intervals with m < 0
  std::vector<Interval> nonpos_region; // maximal intervals with m <= 0 (ball search)
};

/// Split m into positive/negative parts with sign changes located to ~1e-12.
WeightDecomposition decompose_weight(const Coefficient& m);

/// Maximal open intervals where m >= 0 and m is not identically zero.
/// Throws if m_plus is identically zero (no solution by the maximum principle).
std::vector<Interval> candidate_intervals(const WeightDecomposition& d);

/// Rewrite the problem with leading coefficient one (divide through by a).
Problem normalize(const Problem& problem);

}  // namespace sublin
