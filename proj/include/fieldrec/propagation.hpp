#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fieldrec/interp.hpp"
#include "fieldrec/scalar_map.hpp"
#include "fieldrec/trajectory.hpp"

namespace fieldrec {

struct FixedPointInfo {
  double location = 0;
  double multiplier = 0;
  bool tangential = false;   // located at a |D(z)-z| minimum without sign change
  bool hyperbolic = true;    // |multiplier - 1| >= 1e-6
};

// Evaluable unit-time propagation map D with derivative, fixed-point
// bookkeeping and the multiplier at the base fixed point. Fitted maps carry
// the convex hull of the data abscissas as their domain; evaluation beyond
// it is extrapolation and gets flagged downstream.
struct PropagationMap {
  ScalarMap map;
  Interval domain;
  double delta_t = 1.0;

  std::vector<FixedPointInfo> fixed_points;
  std::optional<double> base_fixed_point;
  std::optional<double> lambda;  // D' at the base fixed point
  bool contractive = true;       // 0 < lambda < 1
  double fit_residual = 0.0;
  std::vector<std::string> flags;

  double operator()(double x) const { return map(x); }
  double derivative(double x) const { return map.derivative(x); }
  bool in_hull(double x) const { return domain.contains(x); }

  double base_fp() const;
  double base_lambda() const;
};

// Parametric model family D_p(x) with analytic x-derivative. `eval` and
// `deriv_x` must agree to 1e-4 relative under finite differences; this is
// probed before fitting.
struct ParametricModel {
  int arity = 0;
  std::function<double(std::span<const double>, double)> eval;
  std::function<double(std::span<const double>, double)> deriv_x;
  std::string description;
};

ParametricModel quadratic_family();  // D_a(x) = a x / (1 - (1-a) x)
ParametricModel cubic_family();      // D_a(x) = a x / sqrt(1 + (a^2-1) x^2)
ParametricModel singular_family();   // D_a(x) = ((2x+1)^a - 1) / 2
ParametricModel family_by_name(const std::string& name);

struct FitReport {
  std::vector<double> params;
  double residual_norm = 0;
  int iterations = 0;
};

// Damped Gauss-Newton least squares over the model family.
PropagationMap fit_parametric(const PairSet& pairs, const ParametricModel& model,
                              std::vector<double> init, FitReport* report = nullptr);

// Greedy barycentric rational fit (support points picked at the worst
// residual, weights from the linearized least-squares problem). Stops at
// max residual <= tol or the support cap; retries with fewer support points
// when a pole lands inside the data hull.
PropagationMap fit_rational_barycentric(const PairSet& pairs, double tol, int max_support);

// Access to the underlying greedy fitter, reused by the fixed-point Julia
// solver for its interpolation step.
struct RationalFit {
  BarycentricRational rational;
  double max_residual = 0;
};
RationalFit fit_barycentric_greedy(std::span<const double> xs, std::span<const double> ys,
                                   double tol, int max_support);
RationalFit fit_barycentric_pole_free(std::span<const double> xs, std::span<const double> ys,
                                      double tol, int max_support, const Interval& hull);

// Shape-preserving C1 interpolant through strictly monotone pairs.
PropagationMap fit_monotone_spline(const PairSet& pairs);

// lambda = D'(fp); validates that fp is a fixed point and stores the result
// on the map.
double estimate_multiplier(PropagationMap& map, double fp);

double fp_tolerance(double fp);  // 1e-8 * (1 + |fp|)

}  // namespace fieldrec
