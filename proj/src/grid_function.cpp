#include "fieldrec/grid_function.hpp"

#include <algorithm>
#include <cmath>

namespace fieldrec {

InterpRule interp_rule_from_string(const std::string& name) {
  if (name == "linear") return InterpRule::Linear;
  if (name == "monotone-cubic" || name == "cubic") return InterpRule::MonotoneCubic;
  if (name == "barycentric-rational" || name == "barycentric" || name == "rational") {
    return InterpRule::BarycentricRational;
  }
  raise(ErrorCode::InvalidParameter, "unknown interpolation rule: " + name);
}

const char* to_string(InterpRule rule) {
  switch (rule) {
    case InterpRule::Linear: return "linear";
    case InterpRule::MonotoneCubic: return "monotone-cubic";
    case InterpRule::BarycentricRational: return "barycentric-rational";
  }
  return "?";
}

GridFunction::GridFunction(std::vector<double> grid, std::vector<double> values, InterpRule rule)
    : grid_(std::move(grid)), values_(std::move(values)), rule_(rule) {
  if (grid_.size() < 2 || grid_.size() != values_.size()) {
    raise(ErrorCode::InvalidParameter, "GridFunction: need matching grid/values of size >= 2");
  }
  for (size_t i = 0; i + 1 < grid_.size(); ++i) {
    if (!(grid_[i] < grid_[i + 1])) {
      raise(ErrorCode::InvalidParameter, "GridFunction: grid must be strictly increasing");
    }
  }
  switch (rule_) {
    case InterpRule::MonotoneCubic:
      spline_ = std::make_shared<MonotoneCubicSpline>(grid_, values_);
      break;
    case InterpRule::BarycentricRational: {
      const int d = std::min<int>(4, static_cast<int>(grid_.size()) - 1);
      rational_ = std::make_shared<BarycentricRational>(
          BarycentricRational::floater_hormann(grid_, values_, d));
      break;
    }
    case InterpRule::Linear:
      break;
  }
}

double GridFunction::operator()(double x) const {
  switch (rule_) {
    case InterpRule::MonotoneCubic:
      return (*spline_)(x);
    case InterpRule::BarycentricRational:
      return (*rational_)(x);
    case InterpRule::Linear: {
      if (x <= grid_.front()) {
        const double s = (values_[1] - values_[0]) / (grid_[1] - grid_[0]);
        return values_[0] + s * (x - grid_[0]);
      }
      if (x >= grid_.back()) {
        const size_t n = grid_.size();
        const double s = (values_[n - 1] - values_[n - 2]) / (grid_[n - 1] - grid_[n - 2]);
        return values_[n - 1] + s * (x - grid_[n - 1]);
      }
      const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
      const size_t i = static_cast<size_t>(it - grid_.begin()) - 1;
      const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
      return values_[i] + t * (values_[i + 1] - values_[i]);
    }
  }
  return 0.0;
}

double GridFunction::derivative(double x) const {
  switch (rule_) {
    case InterpRule::MonotoneCubic:
      return spline_->derivative(x);
    case InterpRule::BarycentricRational:
      return rational_->derivative(x);
    case InterpRule::Linear: {
      size_t i;
      if (x <= grid_.front()) {
        i = 0;
      } else if (x >= grid_.back()) {
        i = grid_.size() - 2;
      } else {
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
        i = static_cast<size_t>(it - grid_.begin()) - 1;
      }
      return (values_[i + 1] - values_[i]) / (grid_[i + 1] - grid_[i]);
    }
  }
  return 0.0;
}

GridFunction GridFunction::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double& y : v) y *= factor;
  return GridFunction(grid_, std::move(v), rule_);
}

ScalarMap GridFunction::as_map() const {
  GridFunction copy = *this;
  return ScalarMap{[copy](double x) { return copy(x); },
                   [copy](double x) { return copy.derivative(x); },
                   hull()};
}

}  // namespace fieldrec
