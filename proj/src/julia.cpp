#include "fieldrec/julia.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gauss_newton.hpp"

namespace fieldrec {

namespace {

constexpr double kStallTolerance = 1e-6;

double product_core(const PropagationMap& map, const Subinterval& sub, Subinterval::End toward,
                    double x0, double eps, int n_max) {
  OrientedMap om(map, sub, toward);
  const double fp = om.fp();
  if (std::abs(x0 - fp) <= fp_tolerance(fp)) return 0.0;
  if (!sub.contains(x0)) {
    raise(ErrorCode::UndefinedSplinter, "infinite product: x0 outside the subinterval");
  }
  const double slack = 1e-9 * (1.0 + sub.width());
  double q = 1.0;
  double xn = x0;
  double gap = std::abs(xn - fp);
  double best_q = q;
  double best_change = std::numeric_limits<double>::infinity();
  double prev_change = std::numeric_limits<double>::infinity();
  int rising = 0;
  // Shifted products hit a roundoff floor once the orbit gap nears the step
  // map's evaluation noise (backward steps invert D numerically). Past that
  // point factors are garbage, so the estimate at the smallest observed
  // change is the converged value.
  const double tiny_gap = 1e-11 * (1.0 + std::abs(fp));
  for (int n = 0; n < n_max; ++n) {
    const double dd = om.step_deriv(xn);
    if (!(dd > 0.0)) {
      raise(ErrorCode::NonPositiveFactor, "infinite product: non-positive map derivative");
    }
    const double next = om.step(xn);
    if (next < sub.lo - slack || next > sub.hi + slack) {
      raise(ErrorCode::UndefinedSplinter, "infinite product: the orbit left the subinterval");
    }
    const double next_gap = std::abs(next - fp);
    if (!(next_gap < gap) || (next - fp) * (xn - fp) <= 0.0) {
      if (gap <= tiny_gap && best_change <= kStallTolerance) return (x0 - fp) * best_q;
      raise(ErrorCode::UndefinedSplinter,
            "infinite product: the splinter stopped approaching the attractor");
    }
    const double factor = (next - fp) / ((xn - fp) * dd);
    if (!std::isfinite(factor) || factor <= 0.0) {
      if (gap <= tiny_gap && best_change <= kStallTolerance) return (x0 - fp) * best_q;
      raise(ErrorCode::NonPositiveFactor, "infinite product: non-positive factor rho");
    }
    q *= factor;
    xn = next;
    gap = next_gap;

    const double change = std::abs(factor - 1.0);
    if (change < best_change) {
      best_change = change;
      best_q = q;
    }
    if (change <= eps) return (x0 - fp) * q;
    rising = change > prev_change ? rising + 1 : 0;
    const bool noise_floor = best_change <= kStallTolerance &&
                             (rising >= 3 || change >= 100.0 * best_change);
    if (noise_floor) {
      return (x0 - fp) * best_q;
    }
    prev_change = change;
  }
  raise(ErrorCode::MaxIterExceeded, "infinite product: iteration cap reached");
}

}  // namespace

double julia_infinite_product(const PropagationMap& map, const Subinterval& sub, double x0,
                              double eps, int n_max) {
  if (!sub.splinters_enabled) {
    raise(ErrorCode::UndefinedSplinter, "infinite product: splinters disabled on this piece");
  }
  return product_core(map, sub, sub.attractor_end, x0, eps, n_max);
}

double julia_product_toward(const PropagationMap& map, const Subinterval& sub,
                            Subinterval::End toward, double x0, double eps, int n_max) {
  return product_core(map, sub, toward, x0, eps, n_max);
}

GridFunction julia_fixed_point(const PropagationMap& map, std::vector<double> grid, double eps,
                               int n_max, InterpRule rule, SolveStats* stats) {
  const double fp = map.base_fp();
  (void)map.base_lambda();
  const size_t n = grid.size();
  if (n < 2) raise(ErrorCode::InvalidParameter, "julia_fixed_point: grid too small");
  for (size_t i = 0; i + 1 < n; ++i) {
    if (!(grid[i] < grid[i + 1])) {
      raise(ErrorCode::InvalidParameter, "julia_fixed_point: grid must be strictly increasing");
    }
  }
  const Interval hull{grid.front(), grid.back()};
  const double width = hull.width();
  // Per-point update of the functional equation. Where D moves a point
  // toward the base fixed point the sweep reads g_hat(D(x)) (the plain
  // fixed-point form); where it moves outward (beyond a repelling fixed
  // point, orbits blowing up in finite time) the equivalent inverse form
  // g(x) = D'(D^{-1}(x)) g(D^{-1}(x)) reads inward instead, so no value is
  // ever taken far outside the interpolation hull.
  std::vector<double> source(n), coef(n), res_weight(n);
  ScalarMap on_hull{map.map.eval, map.map.deriv, hull};
  for (size_t i = 0; i < n; ++i) {
    const double shift = grid[i] - fp;
    if (std::abs(shift) < 1e-9 * width) {
      raise(ErrorCode::InvalidParameter,
            "julia_fixed_point: grid point too close to the fixed point (rho is 0/0 there)");
    }
    const double img = map(grid[i]);
    if (std::abs(img - fp) < std::abs(shift)) {
      source[i] = img;
      coef[i] = (img - fp) / (shift * map.derivative(grid[i]));
      res_weight[i] = shift * map.derivative(grid[i]);
    } else {
      const double pre = invert_monotone(on_hull, grid[i], 1e-13 * (1.0 + std::abs(grid[i])));
      source[i] = pre;
      coef[i] = map.derivative(pre) * (pre - fp) / shift;
      res_weight[i] = shift;
    }
    if (!std::isfinite(coef[i])) {
      raise(ErrorCode::InvalidParameter, "julia_fixed_point: update factor not finite");
    }
  }
  if (rule != InterpRule::BarycentricRational) {
    const double slack = 0.02 * width;
    for (size_t i = 0; i < n; ++i) {
      if (source[i] < hull.lo - slack || source[i] > hull.hi + slack) {
        std::ostringstream os;
        os << "julia_fixed_point: update source " << source[i]
           << " falls outside the interpolation hull (rule " << to_string(rule)
           << " cannot extrapolate there)";
        raise(ErrorCode::InterpolationOutOfHull, os.str());
      }
    }
  }

  std::vector<double> ghat(n, 1.0), next(n);
  const int support_cap = std::min<int>(40, static_cast<int>(n) / 2);
  // The rational refit only needs to resolve the current iterate change;
  // chasing 1e-13 on early (still rough) iterates invites spurious poles.
  double fit_tol = 1e-3;
  int it = 0;
  bool converged = false;
  for (; it < n_max; ++it) {
    if (rule == InterpRule::BarycentricRational) {
      const RationalFit fit = fit_barycentric_pole_free(grid, ghat, fit_tol, support_cap, hull);
      for (size_t i = 0; i < n; ++i) next[i] = coef[i] * fit.rational(source[i]);
    } else {
      GridFunction G(grid, ghat, rule);
      for (size_t i = 0; i < n; ++i) next[i] = coef[i] * G(source[i]);
    }
    double num = 0, den = 0;
    for (size_t i = 0; i < n; ++i) {
      num = std::max(num, std::abs(next[i] - ghat[i]));
      den = std::max(den, std::abs(ghat[i]));
    }
    ghat.swap(next);
    fit_tol = std::clamp(0.02 * num, 1e-13 * std::max(1.0, den), 1e-3 * std::max(1.0, den));
    if (den > 0 && num / den <= eps) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    raise(ErrorCode::MaxIterExceeded, "julia_fixed_point: iteration cap reached");
  }

  // Functional-equation residual in the converged hat form.
  double residual = 0;
  {
    std::function<double(double)> Ghat;
    BarycentricRational rat;
    GridFunction Gf;
    if (rule == InterpRule::BarycentricRational) {
      rat = fit_barycentric_pole_free(grid, ghat, fit_tol, support_cap, hull).rational;
      Ghat = [&rat](double x) { return rat(x); };
    } else {
      Gf = GridFunction(grid, ghat, rule);
      Ghat = [&Gf](double x) { return Gf(x); };
    }
    for (size_t i = 0; i < n; ++i) {
      // Julia residual of the converged values, written through the sweep's
      // own update factors (identical to g(D(x)) - D'(x) g(x) pointwise).
      residual = std::max(residual,
                          std::abs(res_weight[i] * (coef[i] * Ghat(source[i]) - ghat[i])));
    }
  }

  std::vector<double> values(n);
  for (size_t i = 0; i < n; ++i) values[i] = (grid[i] - fp) * ghat[i];
  if (stats) *stats = SolveStats{it, residual, true};
  return GridFunction(std::move(grid), std::move(values), rule);
}

double FieldEstimate::eval_v(double x) const {
  if (parametric_form) {
    return parametric_form->first.eval(parametric_form->second, x);
  }
  return v(x);
}

ParametricModel polynomial_field_model(double lambda, double fp, int degree) {
  if (!(lambda > 0.0) || lambda == 1.0) {
    raise(ErrorCode::InvalidMultiplier, "polynomial_field_model: need 0 < lambda, lambda != 1");
  }
  if (degree < 2) {
    raise(ErrorCode::InvalidParameter, "polynomial_field_model: degree must be >= 2");
  }
  const double log_lambda = std::log(lambda);
  const int arity = degree - 1;
  std::ostringstream os;
  os << "v_p(x) = log(" << lambda << ")(x-fp) + sum p_k (x-fp)^k, k=2.." << degree;
  return ParametricModel{
      arity,
      [log_lambda, fp](std::span<const double> p, double x) {
        const double t = x - fp;
        double acc = log_lambda * t;
        double tp = t * t;
        for (double c : p) {
          acc += c * tp;
          tp *= t;
        }
        return acc;
      },
      [log_lambda, fp](std::span<const double> p, double x) {
        const double t = x - fp;
        double acc = log_lambda;
        double tp = t;
        double k = 2.0;
        for (double c : p) {
          acc += c * k * tp;
          tp *= t;
          k += 1.0;
        }
        return acc;
      },
      os.str()};
}

FieldEstimate julia_least_squares(const PropagationMap& map, std::vector<double> collocation,
                                  const ParametricModel& field_model, std::vector<double> init,
                                  SolveStats* stats) {
  const double fp = map.base_fp();
  const double lambda = map.base_lambda();
  if (static_cast<int>(init.size()) != field_model.arity) {
    raise(ErrorCode::InvalidParameter, "julia_least_squares: init size != model arity");
  }
  if (collocation.size() < static_cast<size_t>(field_model.arity)) {
    raise(ErrorCode::InvalidParameter,
          "julia_least_squares: fewer collocation points than parameters");
  }
  std::sort(collocation.begin(), collocation.end());

  std::vector<double> dxs(collocation.size()), dps(collocation.size());
  for (size_t j = 0; j < collocation.size(); ++j) {
    dxs[j] = map(collocation[j]);
    dps[j] = map.derivative(collocation[j]);
  }
  auto residual = [&](const Eigen::VectorXd& p) {
    std::span<const double> ps(p.data(), static_cast<size_t>(p.size()));
    Eigen::VectorXd r(collocation.size());
    for (size_t j = 0; j < collocation.size(); ++j) {
      r(static_cast<Eigen::Index>(j)) =
          field_model.eval(ps, dxs[j]) - dps[j] * field_model.eval(ps, collocation[j]);
    }
    return r;
  };
  Eigen::VectorXd p0(field_model.arity);
  for (int k = 0; k < field_model.arity; ++k) p0(k) = init[static_cast<size_t>(k)];
  const detail::GaussNewtonResult res = detail::gauss_newton(residual, p0);
  std::vector<double> params(res.params.data(), res.params.data() + res.params.size());

  // The constraints v_p(fp) = 0 and v_p'(fp) = log(lambda) must hold on the
  // fitted model (they are structural for polynomial_field_model).
  std::span<const double> ps(params);
  double scale = 1e-8;
  for (size_t j = 0; j < collocation.size(); ++j) {
    scale = std::max(scale, std::abs(field_model.eval(ps, collocation[j])));
  }
  if (std::abs(field_model.eval(ps, fp)) > 1e-8 * scale ||
      std::abs(field_model.deriv_x(ps, fp) - std::log(lambda)) >
          1e-6 * std::max(std::abs(std::log(lambda)), 1e-8)) {
    raise(ErrorCode::ConstraintViolation,
          "julia_least_squares: fitted model violates v(fp)=0 or v'(fp)=log(lambda)");
  }

  const Eigen::VectorXd final_r = residual(res.params);
  const double max_res = final_r.size() ? final_r.cwiseAbs().maxCoeff() : 0.0;

  std::vector<double> v_vals(collocation.size()), g_vals(collocation.size());
  const double log_lambda = std::log(lambda);
  for (size_t j = 0; j < collocation.size(); ++j) {
    v_vals[j] = field_model.eval(ps, collocation[j]);
    g_vals[j] = v_vals[j] / log_lambda;
  }
  FieldEstimate out;
  out.v = GridFunction(collocation, v_vals, InterpRule::MonotoneCubic);
  out.g = GridFunction(collocation, g_vals, InterpRule::MonotoneCubic);
  out.lambda = lambda;
  out.parametric_form = std::make_pair(field_model, params);
  out.diagnostics.julia_residual = max_res;
  if (stats) *stats = SolveStats{res.iterations, max_res, true};
  return out;
}

GridFunction glue_subintervals(const PropagationMap& map,
                               const std::vector<std::pair<Subinterval, GridFunction>>& parts,
                               double eps, int n_max) {
  if (parts.empty()) raise(ErrorCode::InvalidParameter, "glue_subintervals: no parts");
  if (parts.size() == 1) return parts.front().second;

  std::vector<size_t> order(parts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return parts[a].first.lo < parts[b].first.lo; });

  const double base = map.base_fp();
  const double join_tol = 1e-6 * (1.0 + std::abs(base));
  for (size_t k = 0; k + 1 < order.size(); ++k) {
    const Subinterval& left = parts[order[k]].first;
    const Subinterval& right = parts[order[k + 1]].first;
    if (std::abs(left.hi - right.lo) > join_tol) {
      raise(ErrorCode::MismatchedEndpoints, "glue_subintervals: parts do not share endpoints");
    }
  }

  std::vector<double> scale(parts.size(), std::numeric_limits<double>::quiet_NaN());
  bool any_base = false;
  for (size_t k = 0; k < order.size(); ++k) {
    const Subinterval& sub = parts[order[k]].first;
    if (std::abs(sub.attractor() - base) <= fp_tolerance(base)) {
      scale[k] = 1.0;
      any_base = true;
    }
  }
  if (!any_base) {
    raise(ErrorCode::MismatchedEndpoints,
          "glue_subintervals: no part is normalized at the base fixed point");
  }

  auto check_finite = [](double value, const char* what) {
    if (!std::isfinite(value) || value == 0.0) {
      raise(ErrorCode::NonFiniteRatio, std::string("glue_subintervals: ") + what);
    }
    return value;
  };

  // Slope of the glued solution at the shared fixed point b, seen from the
  // already-scaled side: scale * g_own(x0) / u_b(x0), both via the product.
  auto one_sided_slope = [&](size_t k, Subinterval::End b_end) {
    const Subinterval& sub = parts[order[k]].first;
    const double x0 = 0.5 * (sub.lo + sub.hi);
    const double own = check_finite(
        julia_product_toward(map, sub, sub.attractor_end, x0, eps, n_max), "own-normalized value");
    const double at_b =
        check_finite(julia_product_toward(map, sub, b_end, x0, eps, n_max), "b-normalized value");
    return scale[k] * own / at_b;
  };
  auto local_slope_ratio = [&](size_t k, Subinterval::End b_end) {
    const Subinterval& sub = parts[order[k]].first;
    const double x0 = 0.5 * (sub.lo + sub.hi);
    const double own = check_finite(
        julia_product_toward(map, sub, sub.attractor_end, x0, eps, n_max), "own-normalized value");
    const double at_b =
        check_finite(julia_product_toward(map, sub, b_end, x0, eps, n_max), "b-normalized value");
    return own / at_b;  // slope of the part's own solution at b
  };

  for (size_t k = 0; k + 1 < order.size(); ++k) {
    if (std::isnan(scale[k]) || !std::isnan(scale[k + 1])) continue;
    const double slope_left = one_sided_slope(k, Subinterval::End::Hi);
    const double ratio_right = local_slope_ratio(k + 1, Subinterval::End::Lo);
    scale[k + 1] = check_finite(slope_left / ratio_right, "scale ratio");
  }
  for (size_t k = order.size(); k-- > 1;) {
    if (std::isnan(scale[k]) || !std::isnan(scale[k - 1])) continue;
    const double slope_right = one_sided_slope(k, Subinterval::End::Lo);
    const double ratio_left = local_slope_ratio(k - 1, Subinterval::End::Hi);
    scale[k - 1] = check_finite(slope_right / ratio_left, "scale ratio");
  }
  for (size_t k = 0; k < order.size(); ++k) {
    if (std::isnan(scale[k])) {
      raise(ErrorCode::MismatchedEndpoints,
            "glue_subintervals: chain does not reach every part from the base fixed point");
    }
  }

  std::vector<double> grid, values;
  for (size_t k = 0; k < order.size(); ++k) {
    const GridFunction& gf = parts[order[k]].second;
    for (size_t i = 0; i < gf.size(); ++i) {
      const double x = gf.grid()[i];
      if (!grid.empty() && x <= grid.back()) continue;  // drop duplicate joints
      grid.push_back(x);
      values.push_back(scale[k] * gf.values()[i]);
    }
  }
  return GridFunction(std::move(grid), std::move(values), parts.front().second.rule());
}

FieldEstimate assemble_field(const GridFunction& g, double lambda) {
  if (!(lambda > 0.0) || std::abs(lambda - 1.0) < 1e-12) {
    raise(ErrorCode::InvalidMultiplier, "assemble_field: need lambda > 0, lambda != 1");
  }
  FieldEstimate out;
  out.g = g;
  out.v = g.scaled(std::log(lambda));
  out.lambda = lambda;
  return out;
}

double julia_residual(const PropagationMap& map, const GridFunction& g) {
  double res = 0;
  for (double x : g.grid()) {
    const double dx = map(x);
    if (!g.in_hull(dx)) continue;
    res = std::max(res, std::abs(g(dx) - map.derivative(x) * g(x)));
  }
  return res;
}

}  // namespace fieldrec
