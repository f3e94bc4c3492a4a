#include "fieldrec/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fieldrec/fields.hpp"
#include "fieldrec/julia.hpp"

namespace fieldrec {

double relative_errors(const ScalarMap& reference, const ScalarMap& approx,
                       std::span<const double> grid) {
  if (grid.empty()) raise(ErrorCode::InvalidParameter, "relative_errors: empty grid");
  double sup_ref = 0, sup_diff = 0;
  for (double x : grid) {
    const double r = reference(x);
    sup_ref = std::max(sup_ref, std::abs(r));
    sup_diff = std::max(sup_diff, std::abs(approx(x) - r));
  }
  if (sup_ref == 0.0) {
    raise(ErrorCode::ZeroReference, "relative_errors: reference vanishes on the grid");
  }
  return sup_diff / sup_ref;
}

double stability_constant(double eps_v, double eps_D, double eps_Dprime) {
  const double den = eps_D + eps_Dprime;
  if (!(den > 0.0)) {
    raise(ErrorCode::ZeroDenominator, "stability_constant: eps_D + eps_Dprime must be positive");
  }
  return eps_v / den;
}

MonotonicityCheck check_monotonicity_condition(const PropagationMap& map, const Subinterval& sub,
                                               std::span<const double> grid) {
  const double fp = sub.attractor();
  auto rho = [&](double x) {
    return (map(x) - fp) / ((x - fp) * map.derivative(x));
  };
  // Positive rho' with a small threshold so that an identically flat rho
  // (linear D) does not pass on roundoff noise.
  for (double x : grid) {
    const double h = fd_step(x);
    const double rp = (rho(x + h) - rho(x - h)) / (2.0 * h);
    if (!(rp > 1e-9)) {
      return MonotonicityCheck{false, x};
    }
  }
  return MonotonicityCheck{true, std::nullopt};
}

Superlinearity check_superlinearity(const PropagationMap& map, const GridFunction& g) {
  const double fp = map.base_fp();
  double second;
  if (map.map.has_analytic_derivative()) {
    const double h = std::sqrt(fd_step(fp));
    second = (map.map.deriv(fp + h) - map.map.deriv(fp - h)) / (2.0 * h);
  } else {
    second = numeric_second_derivative(map.map, fp);
  }
  if (!(second < -1e-4)) return Superlinearity::NotApplicable;
  for (size_t i = 0; i < g.size(); ++i) {
    const double x = g.grid()[i];
    if (x < fp) continue;  // the lemma covers [fp, a]
    if (g.values()[i] < (x - fp) - 1e-8) return Superlinearity::Violated;
  }
  return Superlinearity::Holds;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ScalarMap deriv_map(const PropagationMap& m, const Interval& dom) {
  return ScalarMap{[&m](double x) { return m.derivative(x); }, {}, dom};
}

DiagnosticsReport run_one(const NoiseExperimentConfig& cfg, const BenchmarkField& field,
                          double sigma, int seed_index, std::uint64_t seed) {
  DiagnosticsReport row;
  row.sigma = sigma;
  row.flags.push_back("seed=" + std::to_string(seed_index));

  const NoiseKind kind = noise_kind_from_string(cfg.noise);
  PairSet pairs = sample_pairs(field, cfg.data_interval, cfg.n_pairs, sigma, kind, seed);

  PropagationMap fitted;
  if (cfg.fitter == "parametric") {
    fitted = fit_parametric(pairs, family_by_name(cfg.family), {cfg.init_param});
  } else if (cfg.fitter == "rational") {
    fitted = fit_rational_barycentric(pairs, cfg.rational_tol, cfg.rational_max_support);
  } else if (cfg.fitter == "spline") {
    fitted = fit_monotone_spline(pairs);
  } else {
    raise(ErrorCode::InvalidParameter, "unknown fitter: " + cfg.fitter);
  }

  const Interval hull = fitted.domain;
  const Interval scan{hull.lo - 0.02 * hull.width(), hull.hi + 0.02 * hull.width()};
  analyze(fitted, scan);
  if (!fitted.contractive) {
    raise(ErrorCode::InvalidMultiplier, "fitted map has no attractive fixed point in the scan");
  }
  const double fp = fitted.base_fp();
  const double lambda = fitted.base_lambda();

  const std::vector<double> eval_grid =
      linspace(cfg.eval_interval.lo, cfg.eval_interval.hi, cfg.eval_grid_n);
  if (cfg.eval_interval.lo < hull.lo || cfg.eval_interval.hi > hull.hi) {
    row.flags.push_back("extrapolated-eval");
  }

  ScalarMap v_hat;
  if (cfg.solver == "least-squares") {
    const ParametricModel model = polynomial_field_model(lambda, fp, cfg.ls_degree);
    const double W = hull.width();
    const std::vector<double> colloc = linspace(fp + 0.02 * W, fp + 0.55 * W, 64);
    SolveStats stats;
    FieldEstimate est = julia_least_squares(fitted, colloc, model,
                                            std::vector<double>(model.arity, 0.0), &stats);
    row.julia_residual = stats.residual;
    auto form = est.parametric_form;
    v_hat = ScalarMap{[form](double x) { return form->first.eval(form->second, x); },
                      {},
                      cfg.eval_interval};
  } else if (cfg.solver == "product") {
    // Per-point products on the subdivided hull, glued across fixed points.
    const auto subs = subdivide(fitted, hull);
    std::vector<std::pair<Subinterval, GridFunction>> parts;
    for (const auto& sub : subs) {
      if (!sub.splinters_enabled) continue;
      const double margin = 0.005 * sub.width();
      std::vector<double> grid = linspace(sub.lo + margin, sub.hi - margin, 101);
      std::vector<double> values(grid.size());
      for (size_t i = 0; i < grid.size(); ++i) {
        values[i] = julia_infinite_product(fitted, sub, grid[i], cfg.solver_eps);
      }
      parts.emplace_back(sub, GridFunction(grid, values, InterpRule::MonotoneCubic));
    }
    if (parts.empty()) raise(ErrorCode::NoFixedPointInClosure, "no solvable subinterval");
    GridFunction g = glue_subintervals(fitted, parts);
    row.julia_residual = julia_residual(fitted, g);
    v_hat = assemble_field(g, lambda).v.as_map();
  } else if (cfg.solver == "fixed-point") {
    // One global sweep; the grid keeps a margin around the base fixed point
    // and drops points whose image leaves the interpolation hull.
    const double W = hull.width();
    std::vector<double> grid;
    for (double x : linspace(hull.lo, hull.hi, 201)) {
      if (std::abs(x - fp) < 0.005 * W) continue;
      const double img = fitted(x);
      if (img < hull.lo - 0.02 * W || img > hull.hi + 0.02 * W) continue;
      grid.push_back(x);
    }
    SolveStats stats;
    GridFunction g =
        julia_fixed_point(fitted, grid, cfg.solver_eps, 5000, InterpRule::MonotoneCubic, &stats);
    row.julia_residual = stats.residual;
    v_hat = assemble_field(g, lambda).v.as_map();
  } else {
    raise(ErrorCode::InvalidParameter, "unknown solver: " + cfg.solver);
  }

  ScalarMap ref_D{field.D, field.D_prime, cfg.eval_interval};
  ScalarMap ref_Dp{field.D_prime, {}, cfg.eval_interval};
  ScalarMap ref_v{field.v, {}, cfg.eval_interval};
  ScalarMap fit_D{fitted.map.eval, fitted.map.deriv, cfg.eval_interval};

  row.eps_D = relative_errors(ref_D, fit_D, eval_grid);
  row.eps_Dprime = relative_errors(ref_Dp, deriv_map(fitted, cfg.eval_interval), eval_grid);
  row.eps_v = relative_errors(ref_v, v_hat, eval_grid);
  if (row.eps_D + row.eps_Dprime <= 1e-12) {
    row.flags.push_back("zero-denominator");
  } else {
    row.C_v = stability_constant(row.eps_v, row.eps_D, row.eps_Dprime);
  }
  return row;
}

}  // namespace

std::vector<DiagnosticsReport> noise_experiment(const NoiseExperimentConfig& cfg) {
  const BenchmarkField field = make_benchmark(cfg.family, cfg.a);
  std::vector<DiagnosticsReport> rows;
  for (size_t si = 0; si < cfg.sigmas.size(); ++si) {
    for (int k = 0; k < cfg.seeds; ++k) {
      const std::uint64_t seed =
          cfg.seed_base ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(si) * 1000u +
                                                    static_cast<std::uint64_t>(k) + 1u));
      try {
        rows.push_back(run_one(cfg, field, cfg.sigmas[si], k, seed));
      } catch (const Error& e) {
        DiagnosticsReport row;
        row.sigma = cfg.sigmas[si];
        row.flags = {"seed=" + std::to_string(k), std::string("error: ") + e.what()};
        row.eps_D = row.eps_Dprime = row.eps_v = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

NoiseExperimentConfig experiment_config_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    raise(ErrorCode::ParseError, std::string("experiment config: ") + e.what());
  }
  NoiseExperimentConfig cfg;
  cfg.family = j.value("family", cfg.family);
  cfg.a = j.value("a", cfg.a);
  if (j.contains("sigmas")) cfg.sigmas = j["sigmas"].get<std::vector<double>>();
  cfg.seeds = j.value("seeds", cfg.seeds);
  cfg.seed_base = j.value("seed_base", cfg.seed_base);
  cfg.noise = j.value("noise", cfg.noise);
  cfg.n_pairs = j.value("n_pairs", cfg.n_pairs);
  auto read_interval = [&](const char* key, Interval fallback) {
    if (!j.contains(key)) return fallback;
    const auto arr = j[key].get<std::vector<double>>();
    if (arr.size() != 2 || !(arr[0] < arr[1])) {
      raise(ErrorCode::InvalidParameter, std::string(key) + " must be [lo, hi] with lo < hi");
    }
    return Interval{arr[0], arr[1]};
  };
  cfg.data_interval = read_interval("data_interval", cfg.data_interval);
  cfg.eval_interval = read_interval("eval_interval", cfg.eval_interval);
  cfg.eval_grid_n = j.value("eval_grid_n", cfg.eval_grid_n);
  cfg.fitter = j.value("fitter", cfg.fitter);
  cfg.init_param = j.value("init_param", cfg.init_param);
  cfg.rational_tol = j.value("rational_tol", cfg.rational_tol);
  cfg.rational_max_support = j.value("rational_max_support", cfg.rational_max_support);
  cfg.solver = j.value("solver", cfg.solver);
  cfg.ls_degree = j.value("ls_degree", cfg.ls_degree);
  cfg.solver_eps = j.value("solver_eps", cfg.solver_eps);
  return cfg;
}

NoiseExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return experiment_config_from_json(ss.str());
}

namespace {

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ";";
    out += flags[i];
  }
  return out;
}

}  // namespace

void write_report_csv(const std::string& path, std::span<const DiagnosticsReport> rows) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path);
  out << "sigma,eps_D,eps_Dprime,eps_v,C_v,flags\n";
  for (const auto& r : rows) {
    out << format_double(r.sigma) << "," << format_double(r.eps_D) << ","
        << format_double(r.eps_Dprime) << "," << format_double(r.eps_v) << ","
        << format_double(r.C_v) << "," << join_flags(r.flags) << "\n";
  }
}

void write_report_json(const std::string& path, std::span<const DiagnosticsReport> rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json item;
    item["sigma"] = r.sigma;
    item["eps_D"] = r.eps_D;
    item["eps_Dprime"] = r.eps_Dprime;
    item["eps_v"] = r.eps_v;
    item["C_v"] = r.C_v;
    item["julia_residual"] = r.julia_residual;
    if (r.schroeder_residual) item["schroeder_residual"] = *r.schroeder_residual;
    item["flags"] = r.flags;
    j.push_back(std::move(item));
  }
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path);
  out << j.dump(2) << "\n";
}

std::vector<std::pair<double, double>> median_stability_by_sigma(
    std::span<const DiagnosticsReport> rows) {
  std::vector<double> sigmas;
  std::vector<std::vector<double>> groups;
  for (const auto& r : rows) {
    size_t gi = sigmas.size();
    for (size_t i = 0; i < sigmas.size(); ++i) {
      if (sigmas[i] == r.sigma) {
        gi = i;
        break;
      }
    }
    if (gi == sigmas.size()) {
      sigmas.push_back(r.sigma);
      groups.emplace_back();
    }
    // Failed rows count as +inf so they cannot hide inside a median.
    groups[gi].push_back(std::isnan(r.C_v) ? std::numeric_limits<double>::infinity() : r.C_v);
  }
  std::vector<std::pair<double, double>> out;
  for (size_t i = 0; i < sigmas.size(); ++i) {
    auto& g = groups[i];
    std::sort(g.begin(), g.end());
    const size_t n = g.size();
    const double med = (n % 2 == 1) ? g[n / 2] : 0.5 * (g[n / 2 - 1] + g[n / 2]);
    out.emplace_back(sigmas[i], med);
  }
  return out;
}

}  // namespace fieldrec
