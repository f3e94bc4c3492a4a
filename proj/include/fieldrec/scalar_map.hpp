#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "fieldrec/errors.hpp"

namespace fieldrec {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi) && lo < hi; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

// A scalar function on a closed interval, with an optional analytic derivative.
// When `deriv` is empty, derivative() falls back to central differences.
struct ScalarMap {
  std::function<double(double)> eval;
  std::function<double(double)> deriv;
  Interval domain;

  double operator()(double x) const { return eval(x); }
  double derivative(double x) const;
  bool has_analytic_derivative() const { return static_cast<bool>(deriv); }
};

// Root bracket with function values at both ends. Valid when a sign change
// is enclosed (f_lo * f_hi <= 0).
struct Bracket {
  double lo = 0;
  double hi = 0;
  double f_lo = 0;
  double f_hi = 0;

  bool valid() const {
    return lo < hi && std::isfinite(f_lo) && std::isfinite(f_hi) && f_lo * f_hi <= 0.0;
  }
  static Bracket around(const ScalarMap& f, double lo, double hi) {
    return Bracket{lo, hi, f(lo), f(hi)};
  }
};

// Finite-difference step: max(1e-6, 1e-7*|x|), one-sided at domain boundaries.
inline double fd_step(double x) { return std::max(1e-6, 1e-7 * std::abs(x)); }

struct DerivResult {
  double value = 0;
  bool one_sided = false;
};

DerivResult numeric_derivative_detail(const ScalarMap& f, double x);
double numeric_derivative(const ScalarMap& f, double x);

// Second derivative by central differences with a sqrt(h_fd)-scaled step.
double numeric_second_derivative(const ScalarMap& f, double x);

// Brent-style safeguarded root finding: bisection with secant / inverse
// quadratic acceleration. Stops when |f(x)| <= tol or the bracket width
// drops below tol. Throws InvalidBracket / MaxIterExceeded.
double find_root(const ScalarMap& f, const Bracket& bracket, double tol, int max_iter = 200);

// Solves f(x) = y for strictly monotone f on its domain, |f(x)-y| <= tol.
// Throws OutOfRange when y is outside f(domain), NotMonotone when a sampled
// monotonicity check fails.
double invert_monotone(const ScalarMap& f, double y, double tol);

std::vector<double> linspace(double lo, double hi, int n);

// Ordinary least-squares polynomial fit; returns coefficients in ascending
// degree order (size degree+1).
std::vector<double> fit_polynomial(std::span<const double> xs, std::span<const double> ys,
                                   int degree);

}  // namespace fieldrec
