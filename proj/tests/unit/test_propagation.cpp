#include <doctest.h>

#include <cmath>

#include "fieldrec/fields.hpp"
#include "fieldrec/propagation.hpp"

using namespace fieldrec;

TEST_CASE("fit_parametric: exact pairs recover the parameter to 1e-10") {
  const BenchmarkField f = make_benchmark("quadratic", 0.5);
  const PairSet pairs = sample_pairs(f, {0.01, 0.9}, 60, 0.0, NoiseKind::None, 3);
  FitReport report;
  const PropagationMap fitted = fit_parametric(pairs, quadratic_family(), {0.8}, &report);
  REQUIRE(report.params.size() == 1);
  CHECK(std::abs(report.params[0] - 0.5) < 1e-10);
  CHECK(report.residual_norm < 1e-10);
  CHECK(fitted(0.5) == doctest::Approx(f.D(0.5)).epsilon(1e-10));
}

TEST_CASE("fit_parametric: noiseless in-family recovery is 1e-8 relative") {
  for (const char* name : {"quadratic", "cubic", "singular"}) {
    const bool cubic = std::string(name) == "cubic";
    const BenchmarkField f = make_benchmark(name, cubic ? 0.9 : 0.5);
    const Interval data = std::string(name) == "quadratic" ? Interval{0.01, 0.9}
                                                           : f.default_interval;
    const PairSet pairs = sample_pairs(f, data, 80, 0.0, NoiseKind::None, 5);
    FitReport report;
    // The initial guess must keep the model finite on the data hull (the
    // cubic family has a pole at 1/sqrt(1-a^2)).
    fit_parametric(pairs, family_by_name(name), {cubic ? 0.95 : 0.6}, &report);
    CHECK(std::abs(report.params[0] - f.a) <= 1e-8 * f.a);
  }
}

TEST_CASE("fit_parametric: uniform noise sigma=0.5 lands near the truth") {
  const BenchmarkField f = make_benchmark("quadratic", 0.5);
  const PairSet pairs =
      sample_pairs(f, {0.01, 0.9}, 100, 0.5, NoiseKind::AdditiveInterval, 20240601);
  FitReport report;
  fit_parametric(pairs, quadratic_family(), {0.8}, &report);
  CHECK(std::abs(report.params[0] - 0.5) < 0.05);
}

TEST_CASE("fit_parametric: fewer pairs than parameters") {
  PairSet tiny;
  tiny.x = {};
  tiny.y = {};
  CHECK_THROWS_WITH_AS(fit_parametric(tiny, quadratic_family(), {0.5}, nullptr),
                       doctest::Contains("SingularJacobian"), Error);
}

TEST_CASE("fit_parametric: rejects models with inconsistent derivatives") {
  ParametricModel broken{
      1, [](std::span<const double> p, double x) { return p[0] * x; },
      [](std::span<const double> p, double x) { return p[0] * x * 3.0 + 1.0; }, "broken"};
  const BenchmarkField f = make_benchmark("quadratic", 0.5);
  const PairSet pairs = sample_pairs(f, {0.01, 0.9}, 20, 0.0, NoiseKind::None, 3);
  CHECK_THROWS_WITH_AS(fit_parametric(pairs, broken, {0.5}, nullptr),
                       doctest::Contains("InvalidParameter"), Error);
}

TEST_CASE("fit_rational_barycentric: cubic-family map to 2e-10 on the hull") {
  const BenchmarkField f = make_benchmark("cubic", 0.9);
  const PairSet pairs = sample_pairs(f, {0.005, 0.995}, 200, 0.0, NoiseKind::None, 1);
  const PropagationMap fitted = fit_rational_barycentric(pairs, 1e-10, 40);
  double err = 0, derr = 0;
  for (double x : linspace(0.005, 0.995, 1501)) {
    err = std::max(err, std::abs(fitted(x) - f.D(x)));
    derr = std::max(derr, std::abs(fitted.derivative(x) - f.D_prime(x)));
  }
  CHECK(err < 2e-10);
  CHECK(derr < 1e-6);
}

TEST_CASE("fit_rational_barycentric: reproduces a degree-2 rational exactly") {
  const BenchmarkField f = make_benchmark("quadratic", 0.5);
  const PairSet pairs = sample_pairs(f, {0.0, 0.9}, 80, 0.0, NoiseKind::None, 1);
  const PropagationMap fitted = fit_rational_barycentric(pairs, 1e-12, 8);
  CHECK(fitted.fit_residual < 1e-12);
  double err = 0;
  for (double x : linspace(0.0, 0.9, 997)) err = std::max(err, std::abs(fitted(x) - f.D(x)));
  CHECK(err < 1e-11);
}

TEST_CASE("fit_rational_barycentric: needs at least 3 pairs") {
  PairSet two;
  two.x = {0.1, 0.2};
  two.y = {0.05, 0.1};
  CHECK_THROWS_WITH_AS(fit_rational_barycentric(two, 1e-10, 10),
                       doctest::Contains("InvalidParameter"), Error);
}

TEST_CASE("barycentric fit derivative matches finite differences away from support") {
  const BenchmarkField f = make_benchmark("cubic", 0.9);
  const PairSet pairs = sample_pairs(f, {0.005, 0.995}, 200, 0.0, NoiseKind::None, 1);
  const PropagationMap fitted = fit_rational_barycentric(pairs, 1e-10, 40);
  ScalarMap plain{fitted.map.eval, {}, fitted.domain};
  for (double x : linspace(0.08, 0.92, 29)) {
    const double an = fitted.derivative(x);
    const double fd = numeric_derivative(plain, x);
    CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("fit_monotone_spline: linear data reproduced exactly") {
  PairSet pairs;
  pairs.x = linspace(0.0, 1.0, 9);
  for (double x : pairs.x) pairs.y.push_back(0.5 * x);
  const PropagationMap fitted = fit_monotone_spline(pairs);
  for (double x : linspace(0.0, 1.0, 41)) {
    CHECK(fitted(x) == doctest::Approx(0.5 * x).epsilon(1e-13));
    CHECK(fitted.derivative(x) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("fit_monotone_spline: 50 exact quadratic-family pairs to 1e-5") {
  const BenchmarkField f = make_benchmark("quadratic", 0.5);
  const PairSet pairs = sample_pairs(f, {0.0, 0.9}, 50, 0.0, NoiseKind::None, 1);
  const PropagationMap fitted = fit_monotone_spline(pairs);
  double err = 0;
  for (double x : linspace(0.0, 0.9, 997)) err = std::max(err, std::abs(fitted(x) - f.D(x)));
  CHECK(err < 1e-5);
}

TEST_CASE("fit_monotone_spline: decreasing data is rejected") {
  PairSet pairs;
  pairs.x = {0.0, 0.5, 1.0};
  pairs.y = {0.5, 0.4, 0.3};
  CHECK_THROWS_WITH_AS(fit_monotone_spline(pairs), doctest::Contains("NonMonotoneData"), Error);
}

TEST_CASE("estimate_multiplier on the three families") {
  for (const auto& [name, a] :
       std::vector<std::pair<std::string, double>>{{"quadratic", 0.5}, {"cubic", 0.9},
                                                   {"singular", 0.5}}) {
    const BenchmarkField f = make_benchmark(name, a);
    const Interval dom = name == "quadratic" ? Interval{0.0, 0.9} : f.default_interval;
    PropagationMap map = f.propagation(dom);
    map.lambda.reset();
    CHECK(estimate_multiplier(map, 0.0) == doctest::Approx(a).epsilon(1e-12));
    CHECK(map.base_lambda() == doctest::Approx(a));
  }
}

TEST_CASE("estimate_multiplier rejects non-fixed points") {
  const BenchmarkField f = make_benchmark("quadratic", 0.5);
  PropagationMap map = f.propagation({0.0, 0.9});
  CHECK_THROWS_WITH_AS(estimate_multiplier(map, 0.3), doctest::Contains("NotAFixedPoint"), Error);
}

TEST_CASE("fitted map reproduces pair images within the reported residual") {
  const BenchmarkField f = make_benchmark("quadratic", 0.5);
  const PairSet pairs =
      sample_pairs(f, {0.01, 0.9}, 100, 0.3, NoiseKind::AdditiveInterval, 77);
  FitReport report;
  const PropagationMap fitted = fit_parametric(pairs, quadratic_family(), {0.7}, &report);
  double sq = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const double r = pairs.y[i] - fitted(pairs.x[i]);
    sq += r * r;
  }
  CHECK(std::sqrt(sq) == doctest::Approx(report.residual_norm).epsilon(1e-9));
}
