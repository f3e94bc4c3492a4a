#include <doctest.h>

#include <cmath>
#include <random>

#include "fieldrec/grid_function.hpp"
#include "fieldrec/interp.hpp"

using namespace fieldrec;

TEST_CASE("monotone cubic spline reproduces lines") {
  const std::vector<double> x = linspace(0.0, 1.0, 9);
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = 0.5 * x[i];
  MonotoneCubicSpline s(x, y);
  for (double t : linspace(0.0, 1.0, 57)) {
    CHECK(s(t) == doctest::Approx(0.5 * t).epsilon(1e-14));
    CHECK(s.derivative(t) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("monotone cubic spline preserves monotonicity") {
  // Steep-then-flat data that overshoots with a plain cubic spline.
  const std::vector<double> x{0, 1, 2, 3, 4, 5};
  const std::vector<double> y{0, 0.01, 0.02, 1.0, 1.01, 1.02};
  MonotoneCubicSpline s(x, y);
  double prev = s(0.0);
  for (double t : linspace(0.0, 5.0, 401)) {
    if (t == 0.0) continue;
    const double cur = s(t);
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
}

TEST_CASE("floater-hormann interpolation reproduces quadratics including extrapolation") {
  const std::vector<double> x = linspace(-1.0, 1.0, 21);
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = 1.0 - x[i] * x[i];
  const auto r = BarycentricRational::floater_hormann(x, y, 3);
  for (double t : {-0.95, -0.5, 0.123, 0.77, 1.4, 2.0}) {
    CHECK(r(t) == doctest::Approx(1.0 - t * t).epsilon(1e-11));
  }
  CHECK(r.derivative(0.3) == doctest::Approx(-0.6).epsilon(1e-9));
  // At a node the Schneider-Werner formula applies.
  CHECK(r.derivative(x[5]) == doctest::Approx(-2.0 * x[5]).epsilon(1e-9));
}

TEST_CASE("barycentric pole detection") {
  // Two-point form with equal-sign weights has a denominator zero between
  // the nodes; alternating values make it a genuine pole.
  BarycentricRational r({0.0, 1.0}, {1.0, -1.0}, {1.0, 1.0});
  const auto poles = r.real_poles_in({0.0, 1.0});
  REQUIRE(poles.size() == 1);
  CHECK(poles[0] == doctest::Approx(0.5).epsilon(1e-8));

  // Interpolants of smooth data with alternating weights stay pole-free.
  const std::vector<double> x = linspace(0.0, 1.0, 15);
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]);
  const auto smooth = BarycentricRational::floater_hormann(x, y, 3);
  CHECK(smooth.real_poles_in({0.0, 1.0}).empty());
}

TEST_CASE("grid function rules agree at nodes and flag extrapolation") {
  const std::vector<double> x = linspace(0.0, 2.0, 11);
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = std::sin(x[i]);
  for (InterpRule rule :
       {InterpRule::Linear, InterpRule::MonotoneCubic, InterpRule::BarycentricRational}) {
    GridFunction g(x, y, rule);
    for (size_t i = 0; i < x.size(); ++i) CHECK(g(x[i]) == doctest::Approx(y[i]));
    CHECK(g.in_hull(1.0));
    CHECK_FALSE(g.in_hull(2.5));
  }
  CHECK(interp_rule_from_string("monotone-cubic") == InterpRule::MonotoneCubic);
  CHECK_THROWS_AS(interp_rule_from_string("bogus"), Error);
}

TEST_CASE("grid function interpolation accuracy on a smooth function") {
  const std::vector<double> x = linspace(0.0, 1.0, 101);
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]);
  GridFunction cubic(x, y, InterpRule::MonotoneCubic);
  GridFunction rational(x, y, InterpRule::BarycentricRational);
  double err_cubic = 0, err_rat = 0;
  for (double t : linspace(0.005, 0.995, 333)) {
    err_cubic = std::max(err_cubic, std::abs(cubic(t) - std::exp(t)));
    err_rat = std::max(err_rat, std::abs(rational(t) - std::exp(t)));
  }
  CHECK(err_cubic < 1e-6);
  CHECK(err_rat < 1e-9);
}
