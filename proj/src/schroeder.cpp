#include "fieldrec/schroeder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fieldrec {

namespace {

// Change level below which a stalled iteration is treated as having hit its
// numerical floor rather than as divergence.
constexpr double kStallTolerance = 1e-6;

// Runs est_n until the successive relative change drops below tol, keeping
// the estimate with the smallest observed change. Stops early when changes
// start growing again from below the stall threshold (roundoff floor of
// backward-oriented orbits).
template <typename Advance>
LimitResult iterate_to_limit(double first_estimate, double tol, int n_max, Advance advance) {
  LimitResult best{first_estimate, false, 0, std::numeric_limits<double>::infinity()};
  double est = first_estimate;
  double prev_change = std::numeric_limits<double>::infinity();
  int rising = 0;
  for (int n = 1; n <= n_max; ++n) {
    const double next = advance();
    const double scale = std::max(std::abs(next), 1e-300);
    const double change = std::abs(next - est) / scale;
    est = next;
    if (change < best.achieved_change) {
      best.achieved_change = change;
      best.value = est;
      best.iterations = n;
    }
    if (change <= tol) {
      best.converged = true;
      best.value = est;
      best.iterations = n;
      best.achieved_change = change;
      return best;
    }
    rising = change > prev_change ? rising + 1 : 0;
    if (best.achieved_change <= kStallTolerance &&
        (rising >= 3 || change >= 100.0 * best.achieved_change)) {
      return best;  // roundoff floor; best estimate, flagged not converged
    }
    prev_change = change;
  }
  return best;
}

}  // namespace

LimitResult koenigs_h(const PropagationMap& map, const Subinterval& sub, double x, double tol,
                      int n_max) {
  OrientedMap om(map, sub, sub.attractor_end);
  const double fp = om.fp();
  if (std::abs(x - fp) <= fp_tolerance(fp)) return {0.0, true, 0, 0.0};
  if (!sub.contains(x)) {
    raise(ErrorCode::OutOfRange, "koenigs_h: x outside the subinterval");
  }
  double cur = x;
  double inv_scale = 1.0;
  return iterate_to_limit(cur - fp, tol, n_max, [&]() {
    cur = om.step(cur);
    inv_scale /= om.mu();
    return (cur - fp) * inv_scale;
  });
}

LimitResult h_prime_product(const PropagationMap& map, const Subinterval& sub, double x,
                            double tol, int n_max) {
  OrientedMap om(map, sub, sub.attractor_end);
  const double fp = om.fp();
  if (std::abs(x - fp) <= fp_tolerance(fp)) return {1.0, true, 0, 0.0};
  if (!sub.contains(x)) {
    raise(ErrorCode::OutOfRange, "h_prime_product: x outside the subinterval");
  }
  double cur = x;
  double product = 1.0;
  bool first = true;
  return iterate_to_limit(1.0, tol, n_max, [&]() {
    if (!first) cur = om.step(cur);
    first = false;
    const double d = om.step_deriv(cur);
    if (!(d > 0.0)) {
      std::ostringstream os;
      os << "h_prime_product: non-positive derivative " << d << " along the splinter";
      raise(ErrorCode::NonPositiveFactor, os.str());
    }
    product *= d / om.mu();
    return product;
  });
}

ConjugationSolution::ConjugationSolution(const PropagationMap& map, const Subinterval& sub,
                                         int grid_n, double tol, int n_max)
    : map_(map), sub_(sub), tol_(tol), n_max_(n_max) {
  if (grid_n < 5) raise(ErrorCode::InvalidParameter, "solve_schroeder: grid_n too small");
  OrientedMap om(map_, sub_, sub_.attractor_end);
  fp_ = om.fp();
  lambda_ = om.lambda_of_D();

  // Keep a margin away from the far end when it is a repelling fixed point
  // (h blows up there).
  const bool fp_at_lo = sub_.attractor_end == Subinterval::End::Lo;
  double lo = sub_.lo, hi = sub_.hi;
  const double margin = 0.005 * sub_.width();
  if (fp_at_lo && sub_.hi_is_fixed) hi -= margin;
  if (!fp_at_lo && sub_.lo_is_fixed) lo += margin;

  std::vector<double> grid = linspace(lo, hi, grid_n);
  std::vector<double> hv(grid.size()), hp(grid.size());
  bool all_converged = true;
  for (size_t i = 0; i < grid.size(); ++i) {
    const LimitResult vh = koenigs_h(map_, sub_, grid[i], tol_, n_max_);
    const LimitResult vp = h_prime_product(map_, sub_, grid[i], tol_, n_max_);
    all_converged = all_converged && vh.converged && vp.converged;
    hv[i] = vh.value;
    hp[i] = vp.value;
  }
  if (!all_converged) {
    raise(ErrorCode::SlowConvergence, "solve_schroeder: Koenigs limit did not reach tol");
  }
  h_ = GridFunction(grid, hv, InterpRule::MonotoneCubic);
  h_prime_ = GridFunction(grid, hp, InterpRule::MonotoneCubic);
  h_range_ = {std::min(hv.front(), hv.back()), std::max(hv.front(), hv.back())};

  // Self-consistency of the limit: h(M(x)) = mu h(x) on the grid, evaluated
  // pointwise (equivalent to the Schroeder residual for D).
  double res = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double mx = om.step(grid[i]);
    if (!sub_.contains(mx)) continue;
    const double hmx = koenigs_h(map_, sub_, mx, tol_, n_max_).value;
    res = std::max(res, std::abs(hmx - om.mu() * hv[i]));
  }
  residual_norm_ = res;

  // h must be strictly monotone with h' > 0 on the grid.
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(hv[i] < hv[i + 1]) || hp[i] <= 0.0) {
      raise(ErrorCode::NotMonotone, "solve_schroeder: tabulated h is not strictly increasing");
    }
  }
}

double ConjugationSolution::h_at(double x) const {
  const LimitResult r = koenigs_h(map_, sub_, x, tol_, n_max_);
  return r.value;
}

double ConjugationSolution::h_prime_at(double x) const {
  const LimitResult r = h_prime_product(map_, sub_, x, tol_, n_max_);
  return r.value;
}

ConjugationSolution solve_schroeder(const PropagationMap& map, const Subinterval& sub, int grid_n,
                                    double tol, int n_max) {
  return ConjugationSolution(map, sub, grid_n, tol, n_max);
}

double flow(const ConjugationSolution& conj, double x0, double t) {
  const double h0 = conj.h_at(x0);
  const double target = std::pow(conj.lambda(), t) * h0;
  const Interval range = conj.h_range();
  if (target < range.lo || target > range.hi) {
    // Report the time at which the fractional iterate reaches the grid edge.
    const double edge = target > range.hi ? range.hi : range.lo;
    std::ostringstream os;
    os << "flow: lambda^t h(x0) = " << target << " leaves the range of h";
    if (h0 != 0.0 && edge / h0 > 0.0) {
      os << "; boundary time t = " << std::log(edge / h0) / std::log(conj.lambda());
    }
    raise(ErrorCode::OutOfRange, os.str());
  }
  ScalarMap h_map{[&conj](double x) { return conj.h_at(x); },
                  {},
                  {conj.h().grid().front(), conj.h().grid().back()}};
  return invert_monotone(h_map, target, 1e-12 * (1.0 + std::abs(x0)));
}

double field_from_h(const ConjugationSolution& conj, double x) {
  const double hp = conj.h_prime_at(x);
  if (std::abs(hp) < 1e-300) {
    raise(ErrorCode::DivisionByZero, "field_from_h: h'(x) vanished");
  }
  return std::log(conj.lambda()) * conj.h_at(x) / hp;
}

}  // namespace fieldrec
