#include "fieldrec/scalar_map.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <sstream>

namespace fieldrec {

double ScalarMap::derivative(double x) const {
  if (deriv) return deriv(x);
  return numeric_derivative(*this, x);
}

DerivResult numeric_derivative_detail(const ScalarMap& f, double x) {
  const double h = fd_step(x);
  const Interval dom = f.domain;
  const bool room_left = x - h >= dom.lo;
  const bool room_right = x + h <= dom.hi;
  if (room_left && room_right) {
    return {(f(x + h) - f(x - h)) / (2.0 * h), false};
  }
  // One-sided second-order difference at a boundary.
  if (room_right || !room_left) {
    return {(-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h), true};
  }
  return {(3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h), true};
}

double numeric_derivative(const ScalarMap& f, double x) {
  return numeric_derivative_detail(f, x).value;
}

double numeric_second_derivative(const ScalarMap& f, double x) {
  const double h = std::sqrt(fd_step(x));
  const Interval dom = f.domain;
  if (x - h >= dom.lo && x + h <= dom.hi) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
  }
  if (x + 2.0 * h <= dom.hi) {
    return (f(x) - 2.0 * f(x + h) + f(x + 2.0 * h)) / (h * h);
  }
  return (f(x) - 2.0 * f(x - h) + f(x - 2.0 * h)) / (h * h);
}

double find_root(const ScalarMap& f, const Bracket& bracket, double tol, int max_iter) {
  if (!(tol > 0)) raise(ErrorCode::InvalidParameter, "find_root: tol must be positive");
  double a = bracket.lo, b = bracket.hi, fa = bracket.f_lo, fb = bracket.f_hi;
  if (!std::isfinite(fa) || !std::isfinite(fb) || !(a < b) || fa * fb > 0.0) {
    std::ostringstream os;
    os << "find_root: no sign change on [" << a << ", " << b << "]";
    raise(ErrorCode::InvalidBracket, os.str());
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(fb) <= tol || std::abs(xm) <= tol1) return b;

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // Secant, or inverse quadratic when three distinct points are at hand.
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double r = fb / fc;
        q = fa / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  raise(ErrorCode::MaxIterExceeded, "find_root: iteration cap reached");
}

double invert_monotone(const ScalarMap& f, double y, double tol) {
  const Interval dom = f.domain;
  if (!dom.finite()) {
    raise(ErrorCode::InvalidParameter, "invert_monotone: domain must be a finite interval");
  }
  constexpr int kProbes = 33;
  std::vector<double> xs = linspace(dom.lo, dom.hi, kProbes);
  std::vector<double> fs(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) fs[i] = f(xs[i]);

  const bool increasing = fs.back() > fs.front();
  for (size_t i = 0; i + 1 < fs.size(); ++i) {
    const double step = fs[i + 1] - fs[i];
    if (!std::isfinite(step) || (increasing ? step <= 0.0 : step >= 0.0)) {
      raise(ErrorCode::NotMonotone, "invert_monotone: sampled monotonicity check failed");
    }
  }

  const double f_min = std::min(fs.front(), fs.back());
  const double f_max = std::max(fs.front(), fs.back());
  const double slack = 1e-12 * (1.0 + std::abs(f_min) + std::abs(f_max));
  if (y < f_min - slack || y > f_max + slack) {
    std::ostringstream os;
    os << "invert_monotone: y=" << y << " outside f(domain)=[" << f_min << ", " << f_max << "]";
    raise(ErrorCode::OutOfRange, os.str());
  }
  if (y <= f_min) return increasing ? dom.lo : dom.hi;
  if (y >= f_max) return increasing ? dom.hi : dom.lo;

  // Locate the probe cell containing the target and refine with Brent.
  size_t cell = 0;
  for (size_t i = 0; i + 1 < fs.size(); ++i) {
    const double lo = std::min(fs[i], fs[i + 1]);
    const double hi = std::max(fs[i], fs[i + 1]);
    if (y >= lo && y <= hi) {
      cell = i;
      break;
    }
  }
  ScalarMap shifted{[&f, y](double x) { return f(x) - y; }, {}, dom};
  Bracket br{xs[cell], xs[cell + 1], fs[cell] - y, fs[cell + 1] - y};
  const double x = find_root(shifted, br, tol);
  if (std::abs(f(x) - y) > 10.0 * tol) {
    raise(ErrorCode::MaxIterExceeded, "invert_monotone: residual above 10*tol");
  }
  return x;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) return {lo};
  std::vector<double> out(static_cast<size_t>(n));
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = lo + h * i;
  out.back() = hi;
  return out;
}

std::vector<double> fit_polynomial(std::span<const double> xs, std::span<const double> ys,
                                   int degree) {
  if (degree < 0 || xs.size() != ys.size() || xs.size() < static_cast<size_t>(degree + 1)) {
    raise(ErrorCode::InvalidParameter, "fit_polynomial: need more points than coefficients");
  }
  const int n = static_cast<int>(xs.size());
  Eigen::MatrixXd A(n, degree + 1);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      A(i, j) = p;
      p *= xs[static_cast<size_t>(i)];
    }
    b(i) = ys[static_cast<size_t>(i)];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  return std::vector<double>(c.data(), c.data() + c.size());
}

}  // namespace fieldrec
