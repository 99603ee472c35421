#pragma once

#include <stdexcept>
#include <vector>

namespace sublin {

/// Thomas elimination for a (not necessarily symmetric) tridiagonal system.
/// lower[i] couples row i with i-1, upper[i] with i+1.
inline std::vector<double> thomas_solve(const std::vector<double>& lower,
                                        const std::vector<double>& diag,
                                        const std::vector<double>& upper,
                                        std::vector<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double piv = diag[0];
  if (piv == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
  c[0] = upper[0] / piv;
  rhs[0] /= piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - lower[i] * c[i - 1];
    if (piv == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
    c[i] = (i + 1 < n ? upper[i] : 0.0) / piv;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i >= 1; --i) rhs[i - 1] -= c[i - 1] * rhs[i];
  return rhs;
}

}  // namespace sublin
