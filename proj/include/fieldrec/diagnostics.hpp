#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fieldrec/domain.hpp"
#include "fieldrec/grid_function.hpp"
#include "fieldrec/propagation.hpp"

namespace fieldrec {

// Recovery-quality summary. eps_* are relative sup-norm errors against a
// reference; C_v = eps_v / (eps_D + eps_Dprime) is the empirical stability
// ratio of the recovery.
struct DiagnosticsReport {
  double sigma = 0;
  double eps_D = 0;
  double eps_Dprime = 0;
  double eps_v = 0;
  double C_v = std::numeric_limits<double>::quiet_NaN();
  double julia_residual = 0;
  std::optional<double> schroeder_residual;
  std::vector<std::string> flags;
};

// sup_grid |approx - reference| / sup_grid |reference|.
double relative_errors(const ScalarMap& reference, const ScalarMap& approx,
                       std::span<const double> grid);

double stability_constant(double eps_v, double eps_D, double eps_Dprime);

// rho'(x) > 0 at every grid point, with rho(x) = (D(x)-fp) / (D'(x)(x-fp))
// taken relative to the subinterval's attractor. A true result implies the
// recovered g is strictly increasing there.
struct MonotonicityCheck {
  bool holds = false;
  std::optional<double> witness;  // first grid point with rho' <= 0
};
MonotonicityCheck check_monotonicity_condition(const PropagationMap& map, const Subinterval& sub,
                                               std::span<const double> grid);

// g(x) >= x - 1e-8 (fp-shifted) on the grid when D''(fp) < 0; not applicable
// otherwise.
enum class Superlinearity { Holds, Violated, NotApplicable };
Superlinearity check_superlinearity(const PropagationMap& map, const GridFunction& g);

struct NoiseExperimentConfig {
  std::string family = "quadratic";
  double a = 0.5;
  std::vector<double> sigmas;
  int seeds = 1;
  std::uint64_t seed_base = 20240601;
  std::string noise = "additive-interval";  // or "relative"
  int n_pairs = 100;
  Interval data_interval{0.01, 1.7};
  Interval eval_interval{0.01, 1.9};
  int eval_grid_n = 401;
  std::string fitter = "parametric";  // or "rational", "spline"
  double init_param = 0.8;
  double rational_tol = 1e-13;
  int rational_max_support = 12;
  std::string solver = "least-squares";  // or "product", "fixed-point"
  int ls_degree = 3;
  double solver_eps = 1e-12;
};

// One report row per (sigma, seed), in sweep order; flags carry "seed=k".
// Errors are measured on eval_interval against the family's closed forms.
std::vector<DiagnosticsReport> noise_experiment(const NoiseExperimentConfig& config);

NoiseExperimentConfig experiment_config_from_json(const std::string& json_text);
NoiseExperimentConfig load_experiment_config(const std::string& path);

void write_report_csv(const std::string& path, std::span<const DiagnosticsReport> rows);
void write_report_json(const std::string& path, std::span<const DiagnosticsReport> rows);

// Median of per-sigma C_v values over the seed repetitions in `rows`.
std::vector<std::pair<double, double>> median_stability_by_sigma(
    std::span<const DiagnosticsReport> rows);

}  // namespace fieldrec
