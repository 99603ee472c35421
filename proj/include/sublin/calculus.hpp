#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sublin/model.hpp"
#include "sublin/quadrature.hpp"

namespace sublin {

/// Cumulative integral F(x) = int_lo^x f, tabulated on a fine grid that
/// includes the given breakpoints; evaluation finishes the last partial cell
/// with a 5-point Gauss rule, so F is smooth and accurate between nodes.
class CumulativeTable {
 public:
  CumulativeTable() = default;
  CumulativeTable(std::function<double(double)> f, double lo, double hi,
                  std::span<const double> breakpoints = {},
                  std::size_t cells = 1 << 14);

  double operator()(double x) const;
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }
  double total() const { return F_.back(); }
  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& values() const { return F_; }
  double integrand(double x) const { return f_(x); }

 private:
  std::function<double(double)> f_;
  std::vector<double> x_, F_;
};

/// Integrating factors Bbar(x) = exp(int_alpha^x b), Bunder = 1/Bbar.
class CumulativeFactor {
 public:
  CumulativeFactor() = default;
  explicit CumulativeFactor(const Coefficient& b);

  double Bbar(double x) const;
  double Bunder(double x) const;
  /// int_a^x b
  double cumulative_b(double x) const { return cum_(x); }
  double lo() const { return cum_.lo(); }
  double hi() const { return cum_.hi(); }

 private:
  CumulativeTable cum_;
};

struct DerivedConstants {
  double Cp{0.0};
  double J_plus{0.0};
  double gamma{0.0};
  double gamma_b{0.0};
  double M_script{0.0};
  double K_b{0.0};
  double quadrature_error{0.0};
  std::uint64_t problem_hash{0};
};

CumulativeFactor exp_factors(const Coefficient& b);

double constant_Cp(double p);

/// J+ = int_alpha^beta Bbar(x) * ||m+ Bunder||_L1(alpha,x) dx.
QuadResult apriori_integral(const Problem& problem, const CumulativeFactor& factors,
                            const WeightDecomposition& decomp);

DerivedConstants derived_constants(const Problem& problem, const Interval& I);

struct AprioriBound {
  double inerte{0.0};        // (J+)^{1/(1-p)}
  bool has_dudu{false};
  double dudu{0.0};          // (sup_{M+} m+/c)^{1/(1-p)} when c>0 on M+
  double bound{0.0};         // min of the applicable bounds
};

AprioriBound apriori_bound(const Problem& problem);

/// sup over M+ of m+/c, or nullopt if c vanishes somewhere on M+.
std::optional<double> sup_mplus_over_c(const Problem& problem,
                                       const WeightDecomposition& decomp);

}  // namespace sublin
