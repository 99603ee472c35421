#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sublin {

struct QuadratureError : std::runtime_error {
  double best_value;
  double best_estimate;
  QuadratureError(const std::string& what, double value, double estimate)
      : std::runtime_error(what), best_value(value), best_estimate(estimate) {}
};

struct QuadResult {
  double value{0.0};
  double error_estimate{0.0};
  std::size_t panels{0};
};

/// Adaptive Gauss-Kronrod 7/15 integration of f over [lo,hi].
/// Panels are initially split at the given breakpoints so jumps in f never
/// fall inside a panel. Throws QuadratureError if tol is unreachable within
/// 10^6 panels.
QuadResult integrate(const std::function<double(double)>& f, double lo,
                     double hi, double tol = 1e-10,
                     std::span<const double> breakpoints = {});

}  // namespace sublin
