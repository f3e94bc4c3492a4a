#pragma once

#include <vector>

#include "fieldrec/scalar_map.hpp"

namespace fieldrec {

// Shape-preserving piecewise-cubic Hermite interpolant (Fritsch-Carlson
// slope limiting). C1; monotone wherever the data is monotone. Outside the
// knot hull it continues linearly with the end slopes.
class MonotoneCubicSpline {
 public:
  MonotoneCubicSpline() = default;
  MonotoneCubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;

  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  Interval hull() const { return {x_.front(), x_.back()}; }

 private:
  size_t cell(double x) const;

  std::vector<double> x_, y_, m_;
};

// Rational interpolant in barycentric form: support points, values and
// weights. Used both for Floater-Hormann interpolation of grid data and for
// the greedy rational fits produced in propagation-fit.
class BarycentricRational {
 public:
  BarycentricRational() = default;
  BarycentricRational(std::vector<double> support, std::vector<double> values,
                      std::vector<double> weights);

  // Floater-Hormann weights of blending degree d on the given nodes.
  static BarycentricRational floater_hormann(std::vector<double> x, std::vector<double> y, int d);

  double operator()(double x) const;
  double derivative(double x) const;

  // Real zeros of the barycentric denominator inside `where` (candidate
  // poles of the interpolant).
  std::vector<double> real_poles_in(const Interval& where, int samples_per_gap = 64) const;

  // Residue of the rational at a denominator zero: N(pole)/D'(pole).
  // Froissart doublets have negligible residues and can be ignored.
  double residue_at(double pole) const;

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }
  size_t size() const { return support_.size(); }

 private:
  double denominator(double x) const;
  double derivative_at_node(size_t k) const;

  std::vector<double> support_, values_, weights_;
};

}  // namespace fieldrec
