#pragma once

#include <memory>
#include <vector>

#include "sublin/calculus.hpp"

namespace sublin {

/// One smooth piece of a constructed function, with derivatives.
class FunctionPiece {
 public:
  virtual ~FunctionPiece() = default;
  virtual double value(double x) const = 0;
  virtual double d1(double x) const = 0;
  virtual double d2(double x) const = 0;
};

class PiecewiseFunction {
 public:
  struct Segment {
    double lo, hi;
    std::shared_ptr<const FunctionPiece> fn;
  };

  PiecewiseFunction() = default;
  explicit PiecewiseFunction(std::vector<Segment> segments);

  double operator()(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  /// One-sided evaluation on a specific segment (for junction checks).
  const Segment& segment(std::size_t i) const { return segments_[i]; }
  std::size_t size() const { return segments_.size(); }
  double lo() const { return segments_.front().lo; }
  double hi() const { return segments_.back().hi; }
  double max_on_grid(std::size_t n = 4096) const;

 private:
  std::vector<Segment> segments_;
  std::size_t index(double x) const;
};

/// u = max(base,0)^k for a smooth base.
class PowerPiece : public FunctionPiece {
 public:
  PowerPiece(std::shared_ptr<const FunctionPiece> base, double k)
      : base_(std::move(base)), k_(k) {}
  double value(double x) const override;
  double d1(double x) const override;
  double d2(double x) const override;

 private:
  std::shared_ptr<const FunctionPiece> base_;
  double k_;
};

/// A*sinh(omega*s) or A*(cosh(omega*s)-1), s = orient*(x-ref), orient = +-1.
class HyperbolicBase : public FunctionPiece {
 public:
  enum class Kind { Sinh, CoshMinusOne };
  HyperbolicBase(Kind kind, double A, double omega, double ref, double orient)
      : kind_(kind), A_(A), omega_(omega), ref_(ref), orient_(orient) {}
  double value(double x) const override;
  double d1(double x) const override;
  double d2(double x) const override;

 private:
  Kind kind_;
  double A_, omega_, ref_, orient_;
};

/// sigma * G(x) where G is a cumulative table (orient=+1: from the left end;
/// orient=-1: G(total)-G(x), i.e. integral to the right end).
class IntegralBase : public FunctionPiece {
 public:
  IntegralBase(double sigma, std::shared_ptr<const CumulativeTable> table,
               double orient)
      : sigma_(sigma), table_(std::move(table)), orient_(orient) {}
  double value(double x) const override;
  double d1(double x) const override;
  double d2(double x) const override;
  /// derivative of the integrand, supplied externally
  void set_integrand_derivative(std::function<double(double)> gd) { gd_ = std::move(gd); }

 private:
  double sigma_;
  std::shared_ptr<const CumulativeTable> table_;
  double orient_;
  std::function<double(double)> gd_;
};

/// Uniform samples with precomputed fourth-order finite-difference
/// derivative tables; values interpolated by local cubics.
class SamplePiece : public FunctionPiece {
 public:
  SamplePiece(double lo, double hi, std::vector<double> y);
  double value(double x) const override;
  double d1(double x) const override;
  double d2(double x) const override;
  const std::vector<double>& samples() const { return y_; }
  double sample_lo() const { return lo_; }
  double sample_hi() const { return hi_; }
  double spacing() const;
  /// Raw derivative samples at node i.
  double d1_at(std::size_t i) const { return dy_[i]; }
  double d2_at(std::size_t i) const { return ddy_[i]; }

 private:
  double lo_, hi_;
  std::vector<double> y_, dy_, ddy_;
};

class ZeroPiece : public FunctionPiece {
 public:
  double value(double) const override { return 0.0; }
  double d1(double) const override { return 0.0; }
  double d2(double) const override { return 0.0; }
};

}  // namespace sublin
