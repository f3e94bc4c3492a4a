#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "fieldrec/propagation.hpp"
#include "fieldrec/trajectory.hpp"

namespace fieldrec {

// Built-in ground-truth families with closed forms for the propagation map,
// its conjugation and the field. Used by the simulator, the diagnostics
// harness and as references in tests.
//
//   quadratic: v = log(a) x (1-x),          D = a x / (1-(1-a)x)
//   cubic:     v = log(a) x (1-x^2),        D = a x / sqrt(1+(a^2-1)x^2)
//   singular:  v = log(a)(x+1/2)log(2x+1),  D = ((2x+1)^a - 1)/2
struct BenchmarkField {
  std::string name;
  double a = 0.5;
  Interval default_interval;

  std::function<double(double)> D, D_prime, D_second;
  std::function<double(double)> v, g, h, h_prime;
  std::function<double(double, double)> flow;  // D^t(x), real t

  double lambda() const { return a; }  // D'(0) for all three families

  ScalarMap map(const Interval& dom) const;
  PropagationMap propagation(const Interval& dom) const;  // exact map, fp 0 attached
};

BenchmarkField make_benchmark(const std::string& name, double a);

enum class NoiseKind { None, AdditiveInterval, Relative };
NoiseKind noise_kind_from_string(const std::string& name);

// Pairs (x_i, D(x_i) + noise) on an equispaced abscissa grid.
//   AdditiveInterval: y = D(x) + u,     u ~ U(-sigma/2, sigma/2)
//   Relative:         y = D(x)(1 + u),  u ~ U(-sigma, sigma)
PairSet sample_pairs(const BenchmarkField& field, const Interval& interval, int n, double sigma,
                     NoiseKind kind, std::uint64_t seed, double delta_t = 1.0);

// Trajectory sampled at uniform times t0, t0+dt, ... via the closed-form flow.
TimeSeries sample_trajectory(const BenchmarkField& field, const std::string& id, double x0,
                             double t0, double dt, int n_samples);

}  // namespace fieldrec
