#pragma once

#include <vector>

#include "fieldrec/propagation.hpp"

namespace fieldrec {

// Maximal interval on which D(z) - z keeps one sign, bounded by fixed points
// and/or the ends of the interval under study. The attractor end is the one
// reached by the convergent iteration (forward D when it attracts, backward
// D^{ -1} otherwise).
struct Subinterval {
  double lo = 0;
  double hi = 0;
  enum class Sign { Below, Above } sign = Sign::Below;  // D(z) < z or D(z) > z inside
  enum class End { Lo, Hi } attractor_end = End::Lo;
  double multiplier_at_attractor = 0;  // multiplier of the convergent iteration, in (0,1)
  bool forward = true;                 // attractor reached by forward iteration of D
  bool lo_is_fixed = false;
  bool hi_is_fixed = false;
  bool splinters_enabled = true;
  std::vector<std::string> flags;

  double attractor() const { return attractor_end == End::Lo ? lo : hi; }
  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Orbit x_0, x_1, ... converging monotonically to an endpoint fixed point.
struct Splinter {
  std::vector<double> points;
  bool forward = true;
  double limit = 0;
  bool converged = true;
};

// Locates all solutions of D(z) = z in `interval` by a dense sign-change scan
// (2048 cells by default) refined with the root finder; tangential contacts
// (|D(z)-z| < tol at a grid minimum without sign change) are flagged.
std::vector<FixedPointInfo> find_fixed_points(const PropagationMap& map, const Interval& interval,
                                              double tol = 1e-12, int grid_cells = 2048);

// Cuts `interval` at the map's interior fixed points and labels each piece.
// Pieces without a fixed endpoint are flagged and get splinters disabled.
std::vector<Subinterval> subdivide(const PropagationMap& map, const Interval& interval);

// Monotone orbit from x0 toward the subinterval's attractor.
Splinter splinter(const PropagationMap& map, const Subinterval& sub, double x0, double tol,
                  int n_max);

// Directed step map toward a fixed endpoint of a subinterval: forward D when
// the endpoint attracts under D, otherwise D^{-1} (evaluated by monotone
// inversion). mu is the multiplier of the step map at the fixed point.
class OrientedMap {
 public:
  OrientedMap(const PropagationMap& map, const Subinterval& sub, Subinterval::End toward);

  double step(double x) const;
  double step_deriv(double x) const;
  double fp() const { return fp_; }
  double mu() const { return mu_; }
  bool forward() const { return forward_; }
  // Multiplier of D itself at the fixed point (1/mu on backward pieces).
  double lambda_of_D() const { return forward_ ? mu_ : 1.0 / mu_; }

 private:
  const PropagationMap* map_;
  Interval sub_;
  double fp_ = 0;
  double mu_ = 0;
  bool forward_ = true;
};

// Populates fixed_points / base_fixed_point / lambda on the map: scans
// `scan`, then picks the attractive fixed point (0 < D' < 1) nearest the
// middle of the scan interval as the base.
void analyze(PropagationMap& map, const Interval& scan, double tol = 1e-12);

}  // namespace fieldrec
