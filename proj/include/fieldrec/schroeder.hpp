#pragma once

#include "fieldrec/domain.hpp"
#include "fieldrec/grid_function.hpp"

namespace fieldrec {

// Result of an iterated-limit computation. When the successive-estimate
// change stalls above tol (numerical floor or n_max), the best estimate is
// returned with converged = false.
struct LimitResult {
  double value = 0;
  bool converged = true;
  int iterations = 0;
  double achieved_change = 0;
};

// Koenigs limit h(x) = lim mu^{-n} (M^n(x) - fp) for the subinterval's
// oriented step map M; no derivative of D is needed. h(fp) = 0, h'(fp) = 1.
LimitResult koenigs_h(const PropagationMap& map, const Subinterval& sub, double x, double tol,
                      int n_max = 20000);

// h'(x) as the infinite product of M'(M^i(x)) / mu over the splinter.
LimitResult h_prime_product(const PropagationMap& map, const Subinterval& sub, double x,
                            double tol, int n_max = 20000);

// Solution of Schroeder's equation h(D(x)) = lambda h(x) on one subinterval,
// normalized h(fp) = 0, h'(fp) = 1. Tabulated on a grid for inspection; the
// precise operations (flow, field) evaluate the Koenigs limit directly.
class ConjugationSolution {
 public:
  ConjugationSolution(const PropagationMap& map, const Subinterval& sub, int grid_n, double tol,
                      int n_max);

  const GridFunction& h() const { return h_; }
  const GridFunction& h_prime() const { return h_prime_; }
  double lambda() const { return lambda_; }
  double base_fixed_point() const { return fp_; }
  double residual_norm() const { return residual_norm_; }
  const Subinterval& subinterval() const { return sub_; }

  // Pointwise Koenigs evaluation (tolerance as configured at construction).
  double h_at(double x) const;
  double h_prime_at(double x) const;

  // Range of h over the tabulated subinterval, for flow preconditions.
  Interval h_range() const { return h_range_; }

  const PropagationMap& map() const { return map_; }

 private:
  PropagationMap map_;
  Subinterval sub_;
  GridFunction h_, h_prime_;
  double lambda_ = 0;  // multiplier of D at the base fixed point
  double fp_ = 0;
  double residual_norm_ = 0;
  double tol_ = 1e-12;
  int n_max_ = 20000;
  Interval h_range_;
};

ConjugationSolution solve_schroeder(const PropagationMap& map, const Subinterval& sub,
                                    int grid_n = 401, double tol = 1e-12, int n_max = 20000);

// Fractional iterate D^t(x0) = h^{-1}(lambda^t h(x0)). Throws OutOfRange
// (reporting the boundary time) when lambda^t h(x0) leaves the range of h.
double flow(const ConjugationSolution& conj, double x0, double t);

// v(x) = log(lambda) h(x) / h'(x).
double field_from_h(const ConjugationSolution& conj, double x);

}  // namespace fieldrec
