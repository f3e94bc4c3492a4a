#pragma once

#include <optional>
#include <utility>

#include "fieldrec/diagnostics.hpp"
#include "fieldrec/domain.hpp"
#include "fieldrec/grid_function.hpp"

namespace fieldrec {

struct SolveStats {
  int iterations = 0;
  double residual = 0;  // functional-equation residual achieved by the solver
  bool converged = true;
};

// Infinite-product solution of Julia's equation g(D(x)) = D'(x) g(x) with
// g'(fp) = 1: accumulate rho over the splinter of x0 toward the attractor,
// where rho(x) = (D(x)-fp) / (D'(x)(x-fp)); backward pieces iterate D^{-1}.
double julia_infinite_product(const PropagationMap& map, const Subinterval& sub, double x0,
                              double eps, int n_max = 100000);

// Same product run toward an explicitly chosen fixed endpoint; normalizes
// g'(endpoint) = 1. Needed when rescaling adjacent pieces.
double julia_product_toward(const PropagationMap& map, const Subinterval& sub,
                            Subinterval::End toward, double x0, double eps, int n_max = 100000);

// Fixed-point iteration g_hat <- rho(x) g_hat(D(x)) on a grid, interpolating
// g_hat between grid points with the chosen rule (the barycentric rule
// refits a greedy rational approximant each sweep). Returns g = (x-fp) g_hat.
// Needs map.base_fixed_point / lambda set.
GridFunction julia_fixed_point(const PropagationMap& map, std::vector<double> grid, double eps,
                               int n_max, InterpRule rule, SolveStats* stats = nullptr);

// Recovered field with its Julia solution and optional parametric form.
struct FieldEstimate {
  GridFunction v;
  GridFunction g;
  double lambda = 0;
  std::optional<std::pair<ParametricModel, std::vector<double>>> parametric_form;
  DiagnosticsReport diagnostics;

  double eval_v(double x) const;
};

// Constrained field family for the least-squares route: the linear
// coefficient is pinned to log(lambda) and the constant term is absent, so
// v_p(fp) = 0 and v_p'(fp) = log(lambda) hold structurally.
//   v_p(x) = log(lambda)(x-fp) + sum_{k=2..degree} p_{k-2} (x-fp)^k
ParametricModel polynomial_field_model(double lambda, double fp, int degree);

// Gauss-Newton minimization of sum_j |v_p(D(x_j)) - D'(x_j) v_p(x_j)|^2 over
// the collocation points, subject to the structural constraints above.
FieldEstimate julia_least_squares(const PropagationMap& map, std::vector<double> collocation,
                                  const ParametricModel& field_model, std::vector<double> init,
                                  SolveStats* stats = nullptr);

// Rescales per-subinterval solutions (each normalized at its own attractor)
// so the glued g is continuous with matching one-sided slopes at shared
// fixed points and g'(base fixed point) = 1.
GridFunction glue_subintervals(const PropagationMap& map,
                               const std::vector<std::pair<Subinterval, GridFunction>>& parts,
                               double eps = 1e-7, int n_max = 100000);

// v = log(lambda) * g pointwise.
FieldEstimate assemble_field(const GridFunction& g, double lambda);

// max over the grid of |g(D(x)) - D'(x) g(x)|, evaluating g by the grid
// function's own rule.
double julia_residual(const PropagationMap& map, const GridFunction& g);

}  // namespace fieldrec
