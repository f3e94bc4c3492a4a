#include "fieldrec/propagation.hpp"

#include <Eigen/Dense>

#include "gauss_newton.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace fieldrec {

double PropagationMap::base_fp() const {
  if (!base_fixed_point) {
    raise(ErrorCode::InvalidParameter, "PropagationMap: base fixed point not set; run analyze()");
  }
  return *base_fixed_point;
}

double PropagationMap::base_lambda() const {
  if (!lambda) {
    raise(ErrorCode::InvalidParameter, "PropagationMap: multiplier not set; run analyze()");
  }
  return *lambda;
}

double fp_tolerance(double fp) { return 1e-8 * (1.0 + std::abs(fp)); }

ParametricModel quadratic_family() {
  return ParametricModel{
      1,
      [](std::span<const double> p, double x) { return p[0] * x / (1.0 - (1.0 - p[0]) * x); },
      [](std::span<const double> p, double x) {
        const double d = 1.0 - (1.0 - p[0]) * x;
        return p[0] / (d * d);
      },
      "D_a(x) = a x / (1 - (1-a) x)"};
}

ParametricModel cubic_family() {
  return ParametricModel{
      1,
      [](std::span<const double> p, double x) {
        return p[0] * x / std::sqrt(1.0 + (p[0] * p[0] - 1.0) * x * x);
      },
      [](std::span<const double> p, double x) {
        const double d = 1.0 + (p[0] * p[0] - 1.0) * x * x;
        return p[0] / (d * std::sqrt(d));
      },
      "D_a(x) = a x / sqrt(1 + (a^2-1) x^2)"};
}

ParametricModel singular_family() {
  return ParametricModel{
      1,
      [](std::span<const double> p, double x) {
        return std::expm1(p[0] * std::log1p(2.0 * x)) / 2.0;
      },
      [](std::span<const double> p, double x) {
        return p[0] * std::pow(2.0 * x + 1.0, p[0] - 1.0);
      },
      "D_a(x) = ((2x+1)^a - 1) / 2"};
}

ParametricModel family_by_name(const std::string& name) {
  if (name == "quadratic") return quadratic_family();
  if (name == "cubic") return cubic_family();
  if (name == "singular") return singular_family();
  raise(ErrorCode::InvalidParameter, "unknown model family: " + name);
}

namespace {

void probe_model_consistency(const ParametricModel& model, std::span<const double> params,
                             const Interval& hull) {
  std::mt19937_64 rng(0x5eedu);
  std::uniform_real_distribution<double> pick(hull.lo + 0.1 * hull.width(),
                                              hull.hi - 0.1 * hull.width());
  for (int k = 0; k < 5; ++k) {
    const double x = pick(rng);
    const double h = fd_step(x);
    const double fd = (model.eval(params, x + h) - model.eval(params, x - h)) / (2.0 * h);
    const double an = model.deriv_x(params, x);
    if (!std::isfinite(fd) || !std::isfinite(an)) continue;
    const double scale = std::max({std::abs(fd), std::abs(an), 1e-8});
    if (std::abs(fd - an) > 1e-4 * scale) {
      raise(ErrorCode::InvalidParameter,
            "ParametricModel: eval and deriv_x disagree under finite differences");
    }
  }
}

}  // namespace

PropagationMap fit_parametric(const PairSet& pairs, const ParametricModel& model,
                              std::vector<double> init, FitReport* report) {
  if (static_cast<int>(init.size()) != model.arity) {
    raise(ErrorCode::InvalidParameter, "fit_parametric: init size != model arity");
  }
  if (pairs.size() < static_cast<size_t>(model.arity)) {
    raise(ErrorCode::SingularJacobian, "fit_parametric: fewer pairs than parameters");
  }
  probe_model_consistency(model, init, pairs.hull());

  auto residual = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(pairs.size());
    std::span<const double> ps(p.data(), static_cast<size_t>(p.size()));
    for (size_t i = 0; i < pairs.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = pairs.y[i] - model.eval(ps, pairs.x[i]);
    }
    return r;
  };
  Eigen::VectorXd p0 = Eigen::Map<Eigen::VectorXd>(init.data(), model.arity);
  const detail::GaussNewtonResult res = detail::gauss_newton(residual, p0);

  std::vector<double> params(res.params.data(), res.params.data() + res.params.size());
  if (report) *report = FitReport{params, res.residual_norm, res.iterations};

  auto eval_fn = model.eval;
  auto deriv_fn = model.deriv_x;
  PropagationMap out;
  out.map = ScalarMap{
      [eval_fn, params](double x) { return eval_fn(params, x); },
      [deriv_fn, params](double x) { return deriv_fn(params, x); },
      pairs.hull()};
  out.domain = pairs.hull();
  out.delta_t = pairs.delta_t;
  out.fit_residual = res.residual_norm;
  return out;
}

RationalFit fit_barycentric_greedy(std::span<const double> xs, std::span<const double> ys,
                                   double tol, int max_support) {
  const int n = static_cast<int>(xs.size());
  if (n < 3) raise(ErrorCode::InvalidParameter, "rational fit: need at least 3 points");
  if (!(tol > 0)) raise(ErrorCode::InvalidParameter, "rational fit: tol must be positive");
  max_support = std::min(max_support, n - 2);
  if (max_support < 1) max_support = 1;

  double mean = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      raise(ErrorCode::InvalidParameter, "rational fit: non-finite sample");
    }
    mean += ys[i];
  }
  mean /= n;

  std::vector<int> support;
  std::vector<bool> in_support(static_cast<size_t>(n), false);
  std::vector<double> fit(static_cast<size_t>(n), mean);
  BarycentricRational best;
  double best_res = std::numeric_limits<double>::infinity();

  for (int m = 1; m <= max_support; ++m) {
    int pick = -1;
    double worst = -1.0;
    for (int i = 0; i < n; ++i) {
      if (in_support[static_cast<size_t>(i)]) continue;
      const double e = std::abs(ys[static_cast<size_t>(i)] - fit[static_cast<size_t>(i)]);
      if (e > worst) {
        worst = e;
        pick = i;
      }
    }
    if (pick < 0) break;
    support.push_back(pick);
    in_support[static_cast<size_t>(pick)] = true;

    // Loewner least squares for the weights over the non-support rows.
    const int rows = n - m;
    Eigen::MatrixXd A(rows, m);
    int r = 0;
    for (int i = 0; i < n; ++i) {
      if (in_support[static_cast<size_t>(i)]) continue;
      for (int j = 0; j < m; ++j) {
        const int sj = support[static_cast<size_t>(j)];
        A(r, j) = (ys[static_cast<size_t>(i)] - ys[static_cast<size_t>(sj)]) /
                  (xs[static_cast<size_t>(i)] - xs[static_cast<size_t>(sj)]);
      }
      ++r;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
    const Eigen::VectorXd w = svd.matrixV().col(m - 1);

    std::vector<double> sx(static_cast<size_t>(m)), sy(static_cast<size_t>(m)),
        sw(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
      const int sj = support[static_cast<size_t>(j)];
      sx[static_cast<size_t>(j)] = xs[static_cast<size_t>(sj)];
      sy[static_cast<size_t>(j)] = ys[static_cast<size_t>(sj)];
      sw[static_cast<size_t>(j)] = w(j);
    }
    BarycentricRational rat(sx, sy, sw);

    double maxres = 0;
    for (int i = 0; i < n; ++i) {
      fit[static_cast<size_t>(i)] = in_support[static_cast<size_t>(i)]
                                        ? ys[static_cast<size_t>(i)]
                                        : rat(xs[static_cast<size_t>(i)]);
      maxres = std::max(maxres,
                        std::abs(ys[static_cast<size_t>(i)] - fit[static_cast<size_t>(i)]));
    }
    if (maxres < best_res) {
      best = rat;
      best_res = maxres;
    }
    if (maxres <= tol) break;
  }
  if (best.size() == 0) {
    raise(ErrorCode::InvalidParameter, "rational fit: no usable support points");
  }
  return {best, best_res};
}

RationalFit fit_barycentric_pole_free(std::span<const double> xs, std::span<const double> ys,
                                      double tol, int max_support, const Interval& hull) {
  double scale = 0;
  for (double y : ys) scale = std::max(scale, std::abs(y));
  // Denominator zeros with negligible residue are Froissart doublets (a
  // pole almost cancelled by a nearby zero); they do not affect evaluation.
  const double residue_tol = 1e-11 * std::max(scale, 1e-12) * std::max(hull.width(), 1e-12);

  std::vector<double> pole_history;
  int m = max_support;
  while (m >= 3) {
    RationalFit fit = fit_barycentric_greedy(xs, ys, tol, m);
    bool significant = false;
    for (double pole : fit.rational.real_poles_in(hull)) {
      if (std::abs(fit.rational.residue_at(pole)) > residue_tol) {
        significant = true;
        pole_history.push_back(pole);
        break;
      }
    }
    if (!significant) return fit;
    // Greedy runs stop early at tol, so retry below the achieved size.
    m = std::min(m - 1, static_cast<int>(fit.rational.size()) - 1);
  }
  std::ostringstream os;
  os << "rational fit keeps a pole inside the data hull";
  if (!pole_history.empty()) os << " (near x = " << pole_history.front() << ")";
  raise(ErrorCode::SpuriousPole, os.str());
}

PropagationMap fit_rational_barycentric(const PairSet& pairs, double tol, int max_support) {
  if (pairs.size() < 3) {
    raise(ErrorCode::InvalidParameter, "fit_rational_barycentric: need at least 3 pairs");
  }
  const Interval hull = pairs.hull();
  RationalFit fit = fit_barycentric_pole_free(pairs.x, pairs.y, tol, max_support, hull);

  auto rat = std::make_shared<BarycentricRational>(std::move(fit.rational));
  PropagationMap out;
  out.map = ScalarMap{
      [rat](double x) { return (*rat)(x); },
      [rat](double x) { return rat->derivative(x); },
      hull};
  out.domain = hull;
  out.delta_t = pairs.delta_t;
  out.fit_residual = fit.max_residual;
  return out;
}

PropagationMap fit_monotone_spline(const PairSet& pairs) {
  if (pairs.size() < 2) {
    raise(ErrorCode::InvalidParameter, "fit_monotone_spline: need at least 2 pairs");
  }
  for (size_t i = 0; i + 1 < pairs.size(); ++i) {
    if (!(pairs.y[i + 1] > pairs.y[i])) {
      raise(ErrorCode::NonMonotoneData,
            "fit_monotone_spline: y must be strictly increasing with x");
    }
  }
  auto spline = std::make_shared<MonotoneCubicSpline>(pairs.x, pairs.y);
  PropagationMap out;
  out.map = ScalarMap{
      [spline](double x) { return (*spline)(x); },
      [spline](double x) { return spline->derivative(x); },
      pairs.hull()};
  out.domain = pairs.hull();
  out.delta_t = pairs.delta_t;
  return out;
}

double estimate_multiplier(PropagationMap& map, double fp) {
  if (std::abs(map(fp) - fp) > fp_tolerance(fp)) {
    raise(ErrorCode::NotAFixedPoint,
          "estimate_multiplier: |D(fp) - fp| exceeds the fixed-point tolerance");
  }
  const double lambda = map.derivative(fp);
  map.base_fixed_point = fp;
  map.lambda = lambda;
  map.contractive = lambda > 0.0 && lambda < 1.0;
  return lambda;
}

}  // namespace fieldrec
