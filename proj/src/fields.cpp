#include "fieldrec/fields.hpp"

#include <cmath>
#include <random>

namespace fieldrec {

ScalarMap BenchmarkField::map(const Interval& dom) const {
  return ScalarMap{D, D_prime, dom};
}

PropagationMap BenchmarkField::propagation(const Interval& dom) const {
  PropagationMap out;
  out.map = map(dom);
  out.domain = dom;
  out.delta_t = 1.0;
  out.fixed_points.push_back(FixedPointInfo{0.0, a, false, true});
  out.base_fixed_point = 0.0;
  out.lambda = a;
  out.contractive = a > 0.0 && a < 1.0;
  return out;
}

BenchmarkField make_benchmark(const std::string& name, double a) {
  if (!(a > 0.0 && a < 1.0)) {
    raise(ErrorCode::InvalidParameter, "benchmark parameter a must lie in (0,1)");
  }
  BenchmarkField f;
  f.name = name;
  f.a = a;
  const double log_a = std::log(a);
  if (name == "quadratic") {
    const double b = 1.0 - a;
    f.default_interval = {0.0, 0.9};
    f.D = [a, b](double x) { return a * x / (1.0 - b * x); };
    f.D_prime = [a, b](double x) {
      const double d = 1.0 - b * x;
      return a / (d * d);
    };
    f.D_second = [a, b](double x) {
      const double d = 1.0 - b * x;
      return 2.0 * a * b / (d * d * d);
    };
    f.v = [log_a](double x) { return log_a * x * (1.0 - x); };
    f.g = [](double x) { return x * (1.0 - x); };
    f.h = [](double x) { return x / (1.0 - x); };
    f.h_prime = [](double x) {
      const double d = 1.0 - x;
      return 1.0 / (d * d);
    };
    f.flow = [a](double x, double t) {
      const double at = std::pow(a, t);
      return at * x / (1.0 - (1.0 - at) * x);
    };
  } else if (name == "cubic") {
    const double c = a * a - 1.0;
    f.default_interval = {-2.04, 2.04};
    f.D = [a, c](double x) { return a * x / std::sqrt(1.0 + c * x * x); };
    f.D_prime = [a, c](double x) {
      const double d = 1.0 + c * x * x;
      return a / (d * std::sqrt(d));
    };
    f.D_second = [a, c](double x) {
      const double d = 1.0 + c * x * x;
      return -3.0 * a * c * x / (d * d * std::sqrt(d));
    };
    f.v = [log_a](double x) { return log_a * x * (1.0 - x * x); };
    f.g = [](double x) { return x * (1.0 - x * x); };
    f.h = [](double x) { return x / std::sqrt(1.0 - x * x); };
    f.h_prime = [](double x) {
      const double d = 1.0 - x * x;
      return 1.0 / (d * std::sqrt(d));
    };
    f.flow = [a](double x, double t) {
      const double a2t = std::pow(a, 2.0 * t);
      return std::pow(a, t) * x / std::sqrt(1.0 + (a2t - 1.0) * x * x);
    };
  } else if (name == "singular") {
    f.default_interval = {-0.45, 1.2};
    // expm1/log1p forms avoid cancellation near the fixed point x = 0.
    f.D = [a](double x) { return std::expm1(a * std::log1p(2.0 * x)) / 2.0; };
    f.D_prime = [a](double x) { return a * std::pow(2.0 * x + 1.0, a - 1.0); };
    f.D_second = [a](double x) { return 2.0 * a * (a - 1.0) * std::pow(2.0 * x + 1.0, a - 2.0); };
    f.v = [log_a](double x) { return log_a * (x + 0.5) * std::log1p(2.0 * x); };
    f.g = [](double x) { return (x + 0.5) * std::log1p(2.0 * x); };
    f.h = [](double x) { return 0.5 * std::log1p(2.0 * x); };
    f.h_prime = [](double x) { return 1.0 / (2.0 * x + 1.0); };
    f.flow = [a](double x, double t) {
      return std::expm1(std::pow(a, t) * std::log1p(2.0 * x)) / 2.0;
    };
  } else {
    raise(ErrorCode::InvalidParameter, "unknown benchmark field: " + name);
  }
  return f;
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::None;
  if (name == "additive-interval" || name == "additive") return NoiseKind::AdditiveInterval;
  if (name == "relative") return NoiseKind::Relative;
  raise(ErrorCode::InvalidParameter, "unknown noise kind: " + name);
}

PairSet sample_pairs(const BenchmarkField& field, const Interval& interval, int n, double sigma,
                     NoiseKind kind, std::uint64_t seed, double delta_t) {
  if (n < 2) raise(ErrorCode::InvalidParameter, "sample_pairs: need n >= 2");
  if (sigma < 0) raise(ErrorCode::InvalidParameter, "sample_pairs: sigma must be >= 0");
  std::mt19937_64 rng(seed);
  PairSet out;
  out.delta_t = delta_t;
  out.x = linspace(interval.lo, interval.hi, n);
  out.y.resize(out.x.size());
  for (size_t i = 0; i < out.x.size(); ++i) {
    const double clean = delta_t == 1.0 ? field.D(out.x[i]) : field.flow(out.x[i], delta_t);
    double noisy = clean;
    if (sigma > 0 && kind == NoiseKind::AdditiveInterval) {
      std::uniform_real_distribution<double> u(-sigma / 2.0, sigma / 2.0);
      noisy = clean + u(rng);
    } else if (sigma > 0 && kind == NoiseKind::Relative) {
      std::uniform_real_distribution<double> u(-sigma, sigma);
      noisy = clean * (1.0 + u(rng));
    }
    out.y[i] = noisy;
  }
  out.normalize();
  return out;
}

TimeSeries sample_trajectory(const BenchmarkField& field, const std::string& id, double x0,
                             double t0, double dt, int n_samples) {
  if (n_samples < 2) raise(ErrorCode::InvalidParameter, "sample_trajectory: need >= 2 samples");
  TimeSeries s;
  s.id = id;
  s.t.resize(static_cast<size_t>(n_samples));
  s.x.resize(static_cast<size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    s.t[static_cast<size_t>(i)] = t0 + dt * i;
    s.x[static_cast<size_t>(i)] = field.flow(x0, dt * i);
  }
  return s;
}

}  // namespace fieldrec
