#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fieldrec/interp.hpp"
#include "fieldrec/scalar_map.hpp"

namespace fieldrec {

enum class InterpRule { Linear, MonotoneCubic, BarycentricRational };

InterpRule interp_rule_from_string(const std::string& name);
const char* to_string(InterpRule rule);

// Tabulated scalar function on a strictly increasing grid with an attached
// interpolation rule. Evaluation outside the hull is permitted (linear or
// rational continuation) and can be detected with in_hull().
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::vector<double> grid, std::vector<double> values,
               InterpRule rule = InterpRule::MonotoneCubic);

  double operator()(double x) const;
  double derivative(double x) const;

  bool in_hull(double x) const { return !grid_.empty() && x >= grid_.front() && x <= grid_.back(); }
  Interval hull() const { return {grid_.front(), grid_.back()}; }

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  InterpRule rule() const { return rule_; }
  size_t size() const { return grid_.size(); }
  bool empty() const { return grid_.empty(); }

  GridFunction scaled(double factor) const;

  ScalarMap as_map() const;

 private:
  std::vector<double> grid_, values_;
  InterpRule rule_ = InterpRule::MonotoneCubic;
  std::shared_ptr<const MonotoneCubicSpline> spline_;
  std::shared_ptr<const BarycentricRational> rational_;
};

}  // namespace fieldrec
