#include <doctest.h>

#include <cmath>

#include "fieldrec/fields.hpp"
#include "fieldrec/julia.hpp"
#include "fieldrec/schroeder.hpp"

using namespace fieldrec;

namespace {

struct Setup {
  BenchmarkField field;
  PropagationMap map;
  std::vector<Subinterval> subs;
  Setup(const std::string& name, double a, Interval dom) : field(make_benchmark(name, a)) {
    map = field.propagation(dom);
    analyze(map, dom);
    subs = subdivide(map, dom);
  }
};

}  // namespace

TEST_CASE("oracle: closed-form g satisfies Julia's equation for all three families") {
  for (const auto& [name, a, dom] : std::vector<std::tuple<std::string, double, Interval>>{
           {"quadratic", 0.5, {0.0, 0.9}},
           {"cubic", 0.9, {-0.95, 0.95}},
           {"singular", 0.5, {-0.45, 1.2}}}) {
    const BenchmarkField f = make_benchmark(name, a);
    double res = 0;
    for (double x : linspace(dom.lo, dom.hi, 211)) {
      res = std::max(res, std::abs(f.g(f.D(x)) - f.D_prime(x) * f.g(x)));
    }
    CHECK(res < 1e-12);
  }
}

TEST_CASE("julia_infinite_product: quadratic family values") {
  Setup s("quadratic", 0.5, {0.0, 0.9});
  CHECK(julia_infinite_product(s.map, s.subs[0], 0.5, 1e-14) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(julia_infinite_product(s.map, s.subs[0], 0.0, 1e-14) == doctest::Approx(0.0));
}

TEST_CASE("julia_infinite_product: singular family value at 0.5") {
  Setup s("singular", 0.5, {-0.45, 1.2});
  REQUIRE(s.subs.size() == 2);
  // g(x) = (x+1/2) log(2x+1); g(0.5) = log 2.
  CHECK(julia_infinite_product(s.map, s.subs[1], 0.5, 1e-12) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-10));
  // The negative-side piece converges forward to 0 as well.
  CHECK(julia_infinite_product(s.map, s.subs[0], -0.3, 1e-12) ==
        doctest::Approx(s.field.g(-0.3)).epsilon(1e-9));
}

TEST_CASE("julia_infinite_product residual stays at the 100*eps level") {
  Setup s("quadratic", 0.5, {0.0, 0.9});
  const double eps = 1e-13;
  double sup_g = 0, res = 0;
  std::vector<double> grid = linspace(0.01, 0.85, 61);
  for (double x : grid) {
    const double gx = julia_infinite_product(s.map, s.subs[0], x, eps);
    const double gdx = julia_infinite_product(s.map, s.subs[0], s.map(x), eps);
    sup_g = std::max(sup_g, std::abs(gx));
    res = std::max(res, std::abs(gdx - s.map.derivative(x) * gx));
  }
  CHECK(res <= 100.0 * eps * sup_g);
}

TEST_CASE("julia_fixed_point: linear map has g(x) = x") {
  PropagationMap map;
  map.map = ScalarMap{[](double x) { return 0.5 * x; }, [](double) { return 0.5; }, {-1.0, 1.0}};
  map.domain = {-1.0, 1.0};
  map.base_fixed_point = 0.0;
  map.lambda = 0.5;
  std::vector<double> grid;
  for (double x : linspace(-0.9, 0.9, 37)) {
    if (std::abs(x) > 0.02) grid.push_back(x);
  }
  const GridFunction g = julia_fixed_point(map, grid, 1e-13, 1000, InterpRule::MonotoneCubic);
  for (size_t i = 0; i < g.size(); ++i) {
    CHECK(g.values()[i] == doctest::Approx(g.grid()[i]).epsilon(1e-11));
  }
}

TEST_CASE("julia_fixed_point: cubic family on (0.005,0.995) with the rational rule") {
  Setup s("cubic", 0.9, {-2.04, 2.04});
  std::vector<double> grid = linspace(0.005, 0.995, 200);
  SolveStats stats;
  const GridFunction g =
      julia_fixed_point(s.map, grid, 1e-12, 4000, InterpRule::BarycentricRational, &stats);
  double err = 0;
  for (size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(g.values()[i] - s.field.g(g.grid()[i])));
  }
  CHECK(err < 1e-5);
  CHECK(stats.converged);
}

TEST_CASE("julia_fixed_point: symmetric grid gives an odd solution") {
  Setup s("cubic", 0.9, {-2.04, 2.04});
  std::vector<double> grid;
  const double margin = 0.005 * 4.08;
  for (double x : linspace(-2.04, 2.04, 409)) {
    if (std::abs(x) > margin) grid.push_back(x);
  }
  const GridFunction g =
      julia_fixed_point(s.map, grid, 1e-12, 4000, InterpRule::BarycentricRational);
  const size_t n = g.size();
  double asym = 0;
  for (size_t i = 0; i < n; ++i) {
    asym = std::max(asym, std::abs(g.values()[i] + g.values()[n - 1 - i]));
  }
  CHECK(asym < 1e-8);
}

TEST_CASE("julia_fixed_point: cubic rule rejects images outside the hull") {
  Setup s("cubic", 0.9, {-2.04, 2.04});
  std::vector<double> grid;
  for (double x : linspace(0.05, 2.0, 101)) grid.push_back(x);
  CHECK_THROWS_WITH_AS(julia_fixed_point(s.map, grid, 1e-10, 1000, InterpRule::MonotoneCubic),
                       doctest::Contains("InterpolationOutOfHull"), Error);
}

TEST_CASE("julia_least_squares: quadratic family with a cubic polynomial model") {
  Setup s("quadratic", 0.5, {0.0, 0.9});
  const ParametricModel model = polynomial_field_model(0.5, 0.0, 3);
  const std::vector<double> colloc = linspace(0.02, 0.88, 40);
  SolveStats stats;
  const FieldEstimate est = julia_least_squares(s.map, colloc, model, {0.0, 0.0}, &stats);
  REQUIRE(est.parametric_form.has_value());
  const auto& params = est.parametric_form->second;
  REQUIRE(params.size() == 2);
  // v = log(0.5)(x - x^2): quadratic coefficient -log(0.5), cubic 0.
  CHECK(std::abs(params[0] + std::log(0.5)) < 1e-8);
  CHECK(std::abs(params[1]) < 1e-8);
}

TEST_CASE("julia_least_squares: cubic family recovers 0.10536(x^3 - x)") {
  Setup s("cubic", 0.9, {-0.95, 0.95});
  const ParametricModel model = polynomial_field_model(0.9, 0.0, 3);
  const std::vector<double> colloc = linspace(-0.9, 0.9, 60);
  const FieldEstimate est = julia_least_squares(s.map, colloc, model, {0.0, 0.0});
  const auto& params = est.parametric_form->second;
  // v = log(0.9) x (1-x^2) = -0.10536(x - x^3).
  CHECK(std::abs(params[0]) < 1e-10);                       // no x^2 term
  CHECK(std::abs(params[1] - 0.10536) < 1e-4);              // paper-rounded value
  CHECK(params[1] == doctest::Approx(-std::log(0.9)).epsilon(1e-8));
}

TEST_CASE("julia_least_squares: collocation smaller than arity is rejected") {
  Setup s("quadratic", 0.5, {0.0, 0.9});
  const ParametricModel model = polynomial_field_model(0.5, 0.0, 5);
  CHECK_THROWS_WITH_AS(julia_least_squares(s.map, {0.5}, model, {0, 0, 0, 0}),
                       doctest::Contains("InvalidParameter"), Error);
}

TEST_CASE("glue_subintervals: cubic family across x=1 matches the global solution") {
  Setup s("cubic", 0.9, {-2.04, 2.04});
  const Subinterval& inner = s.subs[2];   // (0,1)
  const Subinterval& outer = s.subs[3];   // (1,2.04)
  auto part_grid = [&](const Subinterval& sub) {
    const double m = 0.005 * sub.width();
    return linspace(sub.lo + m, sub.hi - m, 101);
  };
  std::vector<std::pair<Subinterval, GridFunction>> parts;
  for (const Subinterval* sub : {&inner, &outer}) {
    const auto grid = part_grid(*sub);
    std::vector<double> vals(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
      vals[i] = julia_infinite_product(s.map, *sub, grid[i], 1e-12);
    }
    parts.emplace_back(*sub, GridFunction(grid, vals, InterpRule::MonotoneCubic));
  }
  const GridFunction glued = glue_subintervals(s.map, parts);

  // Against the exact global solution x(1-x^2) (negative beyond x=1).
  double err = 0;
  for (size_t i = 0; i < glued.size(); ++i) {
    err = std::max(err, std::abs(glued.values()[i] - s.field.g(glued.grid()[i])));
  }
  CHECK(err < 1e-4);
  CHECK(glued(1.5) < 0.0);
}

TEST_CASE("glue_subintervals: single part unchanged, gaps rejected") {
  Setup s("quadratic", 0.5, {0.0, 0.9});
  const auto grid = linspace(0.01, 0.89, 51);
  std::vector<double> vals(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    vals[i] = julia_infinite_product(s.map, s.subs[0], grid[i], 1e-12);
  }
  std::vector<std::pair<Subinterval, GridFunction>> one;
  one.emplace_back(s.subs[0], GridFunction(grid, vals, InterpRule::MonotoneCubic));
  const GridFunction same = glue_subintervals(s.map, one);
  CHECK(same.values() == vals);

  Setup c("cubic", 0.9, {-2.04, 2.04});
  std::vector<std::pair<Subinterval, GridFunction>> gapped;
  gapped.emplace_back(c.subs[1], GridFunction(linspace(-0.9, -0.1, 11),
                                              std::vector<double>(11, 1.0),
                                              InterpRule::Linear));
  gapped.emplace_back(c.subs[3], GridFunction(linspace(1.1, 1.9, 11),
                                              std::vector<double>(11, 1.0),
                                              InterpRule::Linear));
  CHECK_THROWS_WITH_AS(glue_subintervals(c.map, gapped),
                       doctest::Contains("MismatchedEndpoints"), Error);
}

TEST_CASE("assemble_field: v = log(lambda) g and multiplier validation") {
  GridFunction g(linspace(0.0, 1.0, 11),
                 [] {
                   std::vector<double> v;
                   for (double x : linspace(0.0, 1.0, 11)) v.push_back(x * (1.0 - x));
                   return v;
                 }(),
                 InterpRule::MonotoneCubic);
  const FieldEstimate est = assemble_field(g, 0.5);
  CHECK(est.v(0.5) == doctest::Approx(std::log(0.5) * 0.25).epsilon(1e-12));

  const FieldEstimate est9 = assemble_field(g, 0.9);
  CHECK(est9.v(0.5) == doctest::Approx(std::log(0.9) * 0.25).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(assemble_field(g, 1.0), doctest::Contains("InvalidMultiplier"), Error);
  CHECK_THROWS_WITH_AS(assemble_field(g, -0.5), doctest::Contains("InvalidMultiplier"), Error);

  // Zero g stays zero.
  GridFunction zero(linspace(0.0, 1.0, 5), std::vector<double>(5, 0.0), InterpRule::Linear);
  const FieldEstimate ez = assemble_field(zero, 0.5);
  for (double v : ez.v.values()) CHECK(v == 0.0);
}

TEST_CASE("julia linearity: scaled solutions still satisfy the equation") {
  Setup s("quadratic", 0.5, {0.0, 0.9});
  const auto grid = linspace(0.02, 0.85, 120);
  std::vector<double> vals(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    vals[i] = julia_infinite_product(s.map, s.subs[0], grid[i], 1e-13);
  }
  for (double c : {-2.0, 0.3, 7.5}) {
    std::vector<double> scaled(vals);
    for (double& v : scaled) v *= c;
    // The rational rule reproduces the quadratic solution, so the residual
    // reflects the product tolerance rather than interpolation error.
    const GridFunction g(grid, scaled, InterpRule::BarycentricRational);
    const double res = julia_residual(s.map, g);
    double sup = 0;
    for (double v : scaled) sup = std::max(sup, std::abs(v));
    CHECK(res <= 1e-10 * std::max(1.0, sup));
  }
}

TEST_CASE("normalization: (g(x)-g(fp))/(x-fp) -> 1 near the fixed point") {
  Setup s("quadratic", 0.5, {0.0, 0.9});
  for (double x : {1e-3, 5e-4}) {
    const double g = julia_infinite_product(s.map, s.subs[0], x, 1e-13);
    CHECK(std::abs(g / x - 1.0) < 1e-3);
  }
}

TEST_CASE("cross-method agreement on the quadratic family") {
  Setup s("quadratic", 0.5, {0.0, 0.9});
  // The fixed-point grid starts near the attractor so D(grid) stays inside
  // the interpolation hull; methods are compared from x = 0.05 up.
  const std::vector<double> grid = linspace(0.01, 0.85, 169);

  const ParametricModel model = polynomial_field_model(0.5, 0.0, 3);
  const FieldEstimate ls = julia_least_squares(s.map, linspace(0.02, 0.88, 40), model, {0, 0});
  const GridFunction fp_g = julia_fixed_point(s.map, grid, 1e-13, 2000, InterpRule::MonotoneCubic);
  const ConjugationSolution conj = solve_schroeder(s.map, s.subs[0], 201, 1e-13);

  const double log_l = std::log(0.5);
  for (size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    if (x < 0.05) continue;
    const double g_prod = julia_infinite_product(s.map, s.subs[0], x, 1e-13);
    const double g_fp = fp_g.values()[i];
    const double g_h = conj.h_at(x) / conj.h_prime_at(x);
    const double g_ls = ls.eval_v(x) / log_l;
    const double scale = std::abs(g_prod);
    CHECK(std::abs(g_fp - g_prod) <= 1e-5 * scale);
    CHECK(std::abs(g_h - g_prod) <= 1e-5 * scale);
    CHECK(std::abs(g_ls - g_prod) <= 1e-5 * scale);
  }
}
