#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sublin {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One oscillatory/exponential summand of a closed-form piece.
struct TrigTerm {
  enum class Kind { Sin, Cos, Exp };
  Kind kind{Kind::Sin};
  double amplitude{0.0};
  double rate{0.0};  // angular frequency for sin/cos, exponent rate for exp

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
};

/// poly(x) + sum of trig/exp terms, with exact derivatives.
struct ClosedForm {
  std::array<double, 6> poly{};  // c0 + c1 x + ... + c5 x^5
  std::vector<TrigTerm> trig;

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

  bool is_constant(double v, double tol = 0.0) const;
};

/// Uniform samples over [lo,hi]; local 4-point cubic interpolation.
struct SampledForm {
  double lo{0.0}, hi{1.0};
  std::vector<double> y;  // at least 4 samples

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
};

/// Arbitrary evaluator; derivatives fall back to central differences.
struct CallableForm {
  std::function<double(double)> f;
  std::function<double(double)> fd1;  // optional
  std::function<double(double)> fd2;  // optional

  double value(double x) const { return f(x); }
  double d1(double x) const;
  double d2(double x) const;
};

struct Piece {
  double lo{0.0}, hi{1.0};
  std::variant<ClosedForm, SampledForm, CallableForm> form;

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  bool is_closed_form() const { return std::holds_alternative<ClosedForm>(form); }
};

/// Scalar function on [lo,hi] given piecewise by closed forms, samples or
/// callables; breakpoints are the piece boundaries.
class Coefficient {
 public:
  Coefficient() = default;
  explicit Coefficient(std::vector<Piece> pieces);

  static Coefficient constant(double v, double lo, double hi);
  static Coefficient poly(std::span<const double> coeffs, double lo, double hi);
  /// left / mid / right values on (lo,x0), (x0,x1), (x1,hi)
  static Coefficient step(double left, double mid, double right, double lo,
                          double x0, double x1, double hi);
  static Coefficient sampled(const std::function<double(double)>& f, double lo,
                             double hi, std::size_t n = 4096);
  static Coefficient callable(std::function<double(double)> f, double lo,
                              double hi);

  double lo() const { return pieces_.front().lo; }
  double hi() const { return pieces_.back().hi; }
  bool empty() const { return pieces_.empty(); }

  double operator()(double x) const;
  double d1(double x) const;
  double d2(double x) const;

  std::span<const Piece> pieces() const { return pieces_; }
  std::vector<double> breakpoints() const;

  /// Extremes over [a,b] (sampled per piece, golden-section refined).
  double sup(double a, double b) const;
  double inf(double a, double b) const;
  double sup_abs(double a, double b) const { return std::max(sup(a, b), -inf(a, b)); }
  double sup_norm() const { return sup_abs(lo(), hi()); }

  bool is_identically(double v, double tol = 1e-14) const;

  /// Same function with pieces split at the given extra points.
  Coefficient refined(std::span<const double> extra_breakpoints) const;
  Coefficient scaled(double s) const;
  Coefficient negated() const { return scaled(-1.0); }
  /// Restriction to [a,b] (must be inside the domain).
  Coefficient restricted(double a, double b) const;

  /// All sign changes in the open domain, located to ~1e-12.
  std::vector<double> sign_changes() const;

  std::uint64_t hash() const;

 private:
  std::vector<Piece> pieces_;
  std::size_t piece_index(double x) const;
};

/// sf*f + sg*g on the common domain.
Coefficient combine(const Coefficient& f, double sf, const Coefficient& g, double sg);

}  // namespace sublin
