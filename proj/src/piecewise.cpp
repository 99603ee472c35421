#include "sublin/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace sublin {

// ---------------------------------------------------------------- TrigTerm

double TrigTerm::value(double x) const {
  switch (kind) {
    case Kind::Sin: return amplitude * std::sin(rate * x);
    case Kind::Cos: return amplitude * std::cos(rate * x);
    case Kind::Exp: return amplitude * std::exp(rate * x);
  }
  return 0.0;
}

double TrigTerm::d1(double x) const {
  switch (kind) {
    case Kind::Sin: return amplitude * rate * std::cos(rate * x);
    case Kind::Cos: return -amplitude * rate * std::sin(rate * x);
    case Kind::Exp: return amplitude * rate * std::exp(rate * x);
  }
  return 0.0;
}

double TrigTerm::d2(double x) const {
  switch (kind) {
    case Kind::Sin: return -amplitude * rate * rate * std::sin(rate * x);
    case Kind::Cos: return -amplitude * rate * rate * std::cos(rate * x);
    case Kind::Exp: return amplitude * rate * rate * std::exp(rate * x);
  }
  return 0.0;
}

// -------------------------------------------------------------- ClosedForm

double ClosedForm::value(double x) const {
  double v = poly[5];
  for (int i = 4; i >= 0; --i) v = v * x + poly[i];
  for (const auto& t : trig) v += t.value(x);
  return v;
}

double ClosedForm::d1(double x) const {
  double v = 5.0 * poly[5];
  for (int i = 4; i >= 1; --i) v = v * x + i * poly[i];
  for (const auto& t : trig) v += t.d1(x);
  return v;
}

double ClosedForm::d2(double x) const {
  double v = 20.0 * poly[5];
  v = v * x + 12.0 * poly[4];
  v = v * x + 6.0 * poly[3];
  v = v * x + 2.0 * poly[2];
  for (const auto& t : trig) v += t.d2(x);
  return v;
}

bool ClosedForm::is_constant(double v, double tol) const {
  if (std::abs(poly[0] - v) > tol) return false;
  for (int i = 1; i < 6; ++i)
    if (std::abs(poly[i]) > tol) return false;
  for (const auto& t : trig)
    if (std::abs(t.amplitude) > tol) return false;
  return true;
}

// ------------------------------------------------------------- SampledForm

namespace {

// Local cubic (4-point Lagrange) interpolation on a uniform grid.
// Returns value plus first/second derivative of the interpolant.
struct Cubic4 {
  double v, d1, d2;
};

Cubic4 cubic4(const std::vector<double>& y, double lo, double hi, double x) {
  const std::size_t n = y.size();
  const double h = (hi - lo) / static_cast<double>(n - 1);
  double t = (x - lo) / h;
  auto j = static_cast<std::ptrdiff_t>(std::floor(t));
  j = std::clamp<std::ptrdiff_t>(j - 1, 0, static_cast<std::ptrdiff_t>(n) - 4);
  const double s = t - static_cast<double>(j);  // local coordinate in [0,3]
  const double y0 = y[j], y1 = y[j + 1], y2 = y[j + 2], y3 = y[j + 3];
  // Lagrange basis on nodes 0,1,2,3.
  const double l0 = -(s - 1) * (s - 2) * (s - 3) / 6.0;
  const double l1 = s * (s - 2) * (s - 3) / 2.0;
  const double l2 = -s * (s - 1) * (s - 3) / 2.0;
  const double l3 = s * (s - 1) * (s - 2) / 6.0;
  const double d0 = -(3 * s * s - 12 * s + 11) / 6.0;
  const double d1b = (3 * s * s - 10 * s + 6) / 2.0;
  const double d2b = -(3 * s * s - 8 * s + 3) / 2.0;
  const double d3 = (3 * s * s - 6 * s + 2) / 6.0;
  const double e0 = -(6 * s - 12) / 6.0;
  const double e1 = (6 * s - 10) / 2.0;
  const double e2 = -(6 * s - 8) / 2.0;
  const double e3 = (6 * s - 6) / 6.0;
  Cubic4 r;
  r.v = y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3;
  r.d1 = (y0 * d0 + y1 * d1b + y2 * d2b + y3 * d3) / h;
  r.d2 = (y0 * e0 + y1 * e1 + y2 * e2 + y3 * e3) / (h * h);
  return r;
}

}  // namespace

double SampledForm::value(double x) const { return cubic4(y, lo, hi, x).v; }
double SampledForm::d1(double x) const { return cubic4(y, lo, hi, x).d1; }
double SampledForm::d2(double x) const { return cubic4(y, lo, hi, x).d2; }

// ------------------------------------------------------------ CallableForm

double CallableForm::d1(double x) const {
  if (fd1) return fd1(x);
  const double h = 1e-6;
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double CallableForm::d2(double x) const {
  if (fd2) return fd2(x);
  const double h = 1e-4;
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// ------------------------------------------------------------------- Piece

double Piece::value(double x) const {
  return std::visit([x](const auto& f) { return f.value(x); }, form);
}
double Piece::d1(double x) const {
  return std::visit([x](const auto& f) { return f.d1(x); }, form);
}
double Piece::d2(double x) const {
  return std::visit([x](const auto& f) { return f.d2(x); }, form);
}

// ------------------------------------------------------------- Coefficient

Coefficient::Coefficient(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ModelError("coefficient: no pieces");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].lo < pieces_[i].hi))
      throw ModelError("coefficient: empty piece interval");
    if (i > 0 && std::abs(pieces_[i].lo - pieces_[i - 1].hi) > 1e-14)
      throw ModelError("coefficient: pieces do not tile the domain");
  }
}

Coefficient Coefficient::constant(double v, double lo, double hi) {
  ClosedForm cf;
  cf.poly[0] = v;
  return Coefficient({Piece{lo, hi, cf}});
}

Coefficient Coefficient::poly(std::span<const double> coeffs, double lo, double hi) {
  if (coeffs.size() > 6) throw ModelError("coefficient: polynomial degree > 5");
  ClosedForm cf;
  std::copy(coeffs.begin(), coeffs.end(), cf.poly.begin());
  return Coefficient({Piece{lo, hi, cf}});
}

Coefficient Coefficient::step(double left, double mid, double right, double lo,
                              double x0, double x1, double hi) {
  ClosedForm l, m, r;
  l.poly[0] = left;
  m.poly[0] = mid;
  r.poly[0] = right;
  return Coefficient({Piece{lo, x0, l}, Piece{x0, x1, m}, Piece{x1, hi, r}});
}

Coefficient Coefficient::sampled(const std::function<double(double)>& f,
                                 double lo, double hi, std::size_t n) {
  SampledForm sf;
  sf.lo = lo;
  sf.hi = hi;
  sf.y.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    sf.y[i] = f(x);
  }
  return Coefficient({Piece{lo, hi, std::move(sf)}});
}

Coefficient Coefficient::callable(std::function<double(double)> f, double lo,
                                  double hi) {
  CallableForm cf;
  cf.f = std::move(f);
  return Coefficient({Piece{lo, hi, std::move(cf)}});
}

std::size_t Coefficient::piece_index(double x) const {
  // Right-open pieces, last piece closed; clamp outside the domain.
  if (x <= pieces_.front().lo) return 0;
  if (x >= pieces_.back().lo) return pieces_.size() - 1;
  std::size_t lo = 0, hi = pieces_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (pieces_[mid].lo <= x)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

double Coefficient::operator()(double x) const { return pieces_[piece_index(x)].value(x); }
double Coefficient::d1(double x) const { return pieces_[piece_index(x)].d1(x); }
double Coefficient::d2(double x) const { return pieces_[piece_index(x)].d2(x); }

std::vector<double> Coefficient::breakpoints() const {
  std::vector<double> b;
  b.reserve(pieces_.size() + 1);
  for (const auto& p : pieces_) b.push_back(p.lo);
  b.push_back(pieces_.back().hi);
  return b;
}

namespace {

// Golden-section refinement of a local maximum of g around a bracket.
double golden_max(const std::function<double(double)>& g, double a, double b) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = g(c), fd = g(d);
  for (int it = 0; it < 80 && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = g(d);
    }
  }
  return std::max(fc, fd);
}

}  // namespace

double Coefficient::sup(double a, double b) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) {
    const double lo = std::max(a, p.lo), hi = std::min(b, p.hi);
    if (!(lo < hi)) {
      if (lo == hi) best = std::max(best, p.value(lo));
      continue;
    }
    constexpr int N = 2048;
    int besti = 0;
    double bestv = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= N; ++i) {
      const double x = lo + (hi - lo) * i / static_cast<double>(N);
      const double v = p.value(x);
      if (v > bestv) {
        bestv = v;
        besti = i;
      }
    }
    best = std::max(best, bestv);
    const double h = (hi - lo) / N;
    const double ga = std::max(lo, lo + (besti - 1) * h);
    const double gb = std::min(hi, lo + (besti + 1) * h);
    if (ga < gb)
      best = std::max(best, golden_max([&p](double x) { return p.value(x); }, ga, gb));
  }
  return best;
}

double Coefficient::inf(double a, double b) const {
  Coefficient neg = negated();
  return -neg.sup(a, b);
}

bool Coefficient::is_identically(double v, double tol) const {
  for (const auto& p : pieces_) {
    if (const auto* cf = std::get_if<ClosedForm>(&p.form)) {
      if (cf->is_constant(v, tol)) continue;
    }
    constexpr int N = 512;
    for (int i = 0; i <= N; ++i) {
      const double x = p.lo + (p.hi - p.lo) * i / static_cast<double>(N);
      if (std::abs(p.value(x) - v) > tol) return false;
    }
  }
  return true;
}

Coefficient Coefficient::refined(std::span<const double> extra) const {
  std::vector<double> cuts(extra.begin(), extra.end());
  std::sort(cuts.begin(), cuts.end());
  std::vector<Piece> out;
  for (const auto& p : pieces_) {
    double lo = p.lo;
    for (double c : cuts) {
      if (c > lo + 1e-14 && c < p.hi - 1e-14) {
        Piece q = p;
        q.lo = lo;
        q.hi = c;
        out.push_back(std::move(q));
        lo = c;
      }
    }
    Piece q = p;
    q.lo = lo;
    out.push_back(std::move(q));
  }
  return Coefficient(std::move(out));
}

namespace {

Piece scaled_piece(const Piece& p, double s) {
  Piece q = p;
  if (auto* cf = std::get_if<ClosedForm>(&q.form)) {
    for (auto& c : cf->poly) c *= s;
    for (auto& t : cf->trig) t.amplitude *= s;
  } else if (auto* sf = std::get_if<SampledForm>(&q.form)) {
    for (auto& v : sf->y) v *= s;
  } else {
    auto& cl = std::get<CallableForm>(q.form);
    auto f0 = cl.f;
    cl.f = [f0, s](double x) { return s * f0(x); };
    if (cl.fd1) {
      auto g = cl.fd1;
      cl.fd1 = [g, s](double x) { return s * g(x); };
    }
    if (cl.fd2) {
      auto g = cl.fd2;
      cl.fd2 = [g, s](double x) { return s * g(x); };
    }
  }
  return q;
}

}  // namespace

Coefficient Coefficient::scaled(double s) const {
  std::vector<Piece> out;
  out.reserve(pieces_.size());
  for (const auto& p : pieces_) out.push_back(scaled_piece(p, s));
  return Coefficient(std::move(out));
}

Coefficient Coefficient::restricted(double a, double b) const {
  if (a < lo() - 1e-12 || b > hi() + 1e-12 || !(a < b))
    throw ModelError("coefficient: restriction outside domain");
  std::vector<Piece> out;
  for (const auto& p : pieces_) {
    const double plo = std::max(a, p.lo), phi = std::min(b, p.hi);
    if (plo < phi - 1e-15) {
      Piece q = p;
      q.lo = plo;
      q.hi = phi;
      out.push_back(std::move(q));
    }
  }
  return Coefficient(std::move(out));
}

std::vector<double> Coefficient::sign_changes() const {
  std::vector<double> roots;
  constexpr int N = 4096;
  for (const auto& p : pieces_) {
    double xprev = p.lo;
    double vprev = p.value(xprev);
    for (int i = 1; i <= N; ++i) {
      const double x = p.lo + (p.hi - p.lo) * i / static_cast<double>(N);
      const double v = p.value(x);
      if (vprev * v < 0.0) {
        double a = xprev, b = x, fa = vprev;
        for (int it = 0; it < 100 && (b - a) > 1e-15; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = p.value(mid);
          if (fa * fm <= 0.0)
            b = mid;
          else {
            a = mid;
            fa = fm;
          }
        }
        roots.push_back(0.5 * (a + b));
      }
      xprev = x;
      vprev = v;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::uint64_t Coefficient::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (const auto& p : pieces_) {
    mix(p.lo);
    mix(p.hi);
    if (const auto* cf = std::get_if<ClosedForm>(&p.form)) {
      for (double c : cf->poly) mix(c);
      for (const auto& t : cf->trig) {
        mix(static_cast<double>(static_cast<int>(t.kind)));
        mix(t.amplitude);
        mix(t.rate);
      }
    } else {
      // sampled/callable: hash a few probe values
      for (int i = 0; i <= 16; ++i)
        mix(p.value(p.lo + (p.hi - p.lo) * i / 16.0));
    }
  }
  return h;
}

Coefficient combine(const Coefficient& f, double sf, const Coefficient& g, double sg) {
  if (std::abs(f.lo() - g.lo()) > 1e-12 || std::abs(f.hi() - g.hi()) > 1e-12)
    throw ModelError("combine: mismatched domains");
  std::vector<double> cuts = f.breakpoints();
  const auto gb = g.breakpoints();
  cuts.insert(cuts.end(), gb.begin(), gb.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-13; }),
             cuts.end());
  std::vector<Piece> out;
  auto fshared = std::make_shared<Coefficient>(f);
  auto gshared = std::make_shared<Coefficient>(g);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double mid = 0.5 * (lo + hi);
    // closed + closed stays closed (poly/trig sums are closed under addition)
    bool closed = false;
    ClosedForm sum;
    const Piece* pf2 = nullptr;
    const Piece* pg2 = nullptr;
    for (const auto& p : f.pieces())
      if (p.lo <= mid && mid <= p.hi) {
        pf2 = &p;
        break;
      }
    for (const auto& p : g.pieces())
      if (p.lo <= mid && mid <= p.hi) {
        pg2 = &p;
        break;
      }
    if (pf2 && pg2 && pf2->is_closed_form() && pg2->is_closed_form()) {
      const auto& a = std::get<ClosedForm>(pf2->form);
      const auto& b = std::get<ClosedForm>(pg2->form);
      for (int j = 0; j < 6; ++j) sum.poly[j] = sf * a.poly[j] + sg * b.poly[j];
      for (auto t : a.trig) {
        t.amplitude *= sf;
        sum.trig.push_back(t);
      }
      for (auto t : b.trig) {
        t.amplitude *= sg;
        sum.trig.push_back(t);
      }
      closed = true;
    }
    if (closed) {
      out.push_back(Piece{lo, hi, std::move(sum)});
    } else {
      CallableForm cf;
      cf.f = [fshared, gshared, sf, sg](double x) {
        return sf * (*fshared)(x) + sg * (*gshared)(x);
      };
      cf.fd1 = [fshared, gshared, sf, sg](double x) {
        return sf * fshared->d1(x) + sg * gshared->d1(x);
      };
      cf.fd2 = [fshared, gshared, sf, sg](double x) {
        return sf * fshared->d2(x) + sg * gshared->d2(x);
      };
      out.push_back(Piece{lo, hi, std::move(cf)});
    }
  }
  return Coefficient(std::move(out));
}

}  // namespace sublin
