#include "sublin/pwfunction.hpp"

#include <algorithm>
#include <cmath>

namespace sublin {

PiecewiseFunction::PiecewiseFunction(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw ModelError("piecewise function: no segments");
  for (std::size_t i = 1; i < segments_.size(); ++i)
    if (std::abs(segments_[i].lo - segments_[i - 1].hi) > 1e-12)
      throw ModelError("piecewise function: segments do not tile");
}

std::size_t PiecewiseFunction::index(double x) const {
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i)
    if (x < segments_[i].hi) return i;
  return segments_.size() - 1;
}

double PiecewiseFunction::operator()(double x) const {
  return segments_[index(x)].fn->value(x);
}
double PiecewiseFunction::d1(double x) const { return segments_[index(x)].fn->d1(x); }
double PiecewiseFunction::d2(double x) const { return segments_[index(x)].fn->d2(x); }

double PiecewiseFunction::max_on_grid(std::size_t n) const {
  double best = -1e300;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = lo() + (hi() - lo()) * static_cast<double>(i) / static_cast<double>(n);
    best = std::max(best, (*this)(x));
  }
  return best;
}

double PowerPiece::value(double x) const {
  const double b = std::max(0.0, base_->value(x));
  return std::pow(b, k_);
}

double PowerPiece::d1(double x) const {
  const double b = std::max(0.0, base_->value(x));
  if (b == 0.0) return 0.0;
  return k_ * std::pow(b, k_ - 1.0) * base_->d1(x);
}

double PowerPiece::d2(double x) const {
  const double b = std::max(0.0, base_->value(x));
  if (b == 0.0) return 0.0;
  const double b1 = base_->d1(x), b2 = base_->d2(x);
  return k_ * (k_ - 1.0) * std::pow(b, k_ - 2.0) * b1 * b1 +
         k_ * std::pow(b, k_ - 1.0) * b2;
}

double HyperbolicBase::value(double x) const {
  const double s = orient_ * (x - ref_);
  return kind_ == Kind::Sinh ? A_ * std::sinh(omega_ * s)
                             : A_ * (std::cosh(omega_ * s) - 1.0);
}

double HyperbolicBase::d1(double x) const {
  const double s = orient_ * (x - ref_);
  const double core = kind_ == Kind::Sinh ? std::cosh(omega_ * s)
                                          : std::sinh(omega_ * s);
  return A_ * omega_ * orient_ * core;
}

double HyperbolicBase::d2(double x) const {
  const double s = orient_ * (x - ref_);
  const double core = kind_ == Kind::Sinh ? std::sinh(omega_ * s)
                                          : std::cosh(omega_ * s);
  return A_ * omega_ * omega_ * core;
}

double IntegralBase::value(double x) const {
  const double G = (*table_)(x);
  return orient_ > 0 ? sigma_ * G : sigma_ * (table_->total() - G);
}

double IntegralBase::d1(double x) const {
  return sigma_ * orient_ * table_->integrand(x);
}

double IntegralBase::d2(double x) const {
  if (gd_) return sigma_ * orient_ * gd_(x);
  const double h = 1e-6;
  return sigma_ * orient_ *
         (table_->integrand(x + h) - table_->integrand(x - h)) / (2.0 * h);
}

namespace {

// Local cubic interpolation identical to the sampled coefficient form.
double cubic_eval(const std::vector<double>& y, double lo, double hi, double x) {
  const std::size_t n = y.size();
  const double h = (hi - lo) / static_cast<double>(n - 1);
  double t = (x - lo) / h;
  auto j = static_cast<std::ptrdiff_t>(std::floor(t));
  j = std::clamp<std::ptrdiff_t>(j - 1, 0, static_cast<std::ptrdiff_t>(n) - 4);
  const double s = t - static_cast<double>(j);
  const double y0 = y[j], y1 = y[j + 1], y2 = y[j + 2], y3 = y[j + 3];
  const double l0 = -(s - 1) * (s - 2) * (s - 3) / 6.0;
  const double l1 = s * (s - 2) * (s - 3) / 2.0;
  const double l2 = -s * (s - 1) * (s - 3) / 2.0;
  const double l3 = s * (s - 1) * (s - 2) / 6.0;
  return y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3;
}

// Fourth-order finite-difference first derivative samples.
std::vector<double> fd4_d1(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> d(n);
  auto at = [&y](std::ptrdiff_t i) { return y[i]; };
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (-at(i + 2) + 8 * at(i + 1) - 8 * at(i - 1) + at(i - 2)) / (12 * h);
    } else if (i + 4 < n && i < 2) {
      d[i] = (-25 * at(i) + 48 * at(i + 1) - 36 * at(i + 2) + 16 * at(i + 3) -
              3 * at(i + 4)) /
             (12 * h);
    } else {
      d[i] = (25 * at(i) - 48 * at(i - 1) + 36 * at(i - 2) - 16 * at(i - 3) +
              3 * at(i - 4)) /
             (12 * h);
    }
  }
  return d;
}

// Fourth-order finite-difference second derivative samples.
std::vector<double> fd4_d2(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> d(n);
  auto at = [&y](std::ptrdiff_t i) { return y[i]; };
  const double h2 = h * h;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (-at(i + 2) + 16 * at(i + 1) - 30 * at(i) + 16 * at(i - 1) -
              at(i - 2)) /
             (12 * h2);
    } else if (i < 2) {
      d[i] = (45 * at(i) - 154 * at(i + 1) + 214 * at(i + 2) - 156 * at(i + 3) +
              61 * at(i + 4) - 10 * at(i + 5)) /
             (12 * h2);
    } else {
      d[i] = (45 * at(i) - 154 * at(i - 1) + 214 * at(i - 2) - 156 * at(i - 3) +
              61 * at(i - 4) - 10 * at(i - 5)) /
             (12 * h2);
    }
  }
  return d;
}

}  // namespace

SamplePiece::SamplePiece(double lo, double hi, std::vector<double> y)
    : lo_(lo), hi_(hi), y_(std::move(y)) {
  if (y_.size() < 8) throw ModelError("sample piece: too few samples");
  const double h = spacing();
  dy_ = fd4_d1(y_, h);
  ddy_ = fd4_d2(y_, h);
}

double SamplePiece::spacing() const {
  return (hi_ - lo_) / static_cast<double>(y_.size() - 1);
}

double SamplePiece::value(double x) const { return cubic_eval(y_, lo_, hi_, x); }
double SamplePiece::d1(double x) const { return cubic_eval(dy_, lo_, hi_, x); }
double SamplePiece::d2(double x) const { return cubic_eval(ddy_, lo_, hi_, x); }

}  // namespace sublin
