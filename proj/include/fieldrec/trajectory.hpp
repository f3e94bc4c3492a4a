#pragma once

#include <string>
#include <vector>

#include "fieldrec/grid_function.hpp"
#include "fieldrec/scalar_map.hpp"

namespace fieldrec {

// One or more sampled trajectories {(t_i, x_i)} keyed by series id.
struct TimeSeries {
  std::string id;
  std::vector<double> t;
  std::vector<double> x;
};

struct TimeSeriesSet {
  std::vector<TimeSeries> series;

  void validate() const;  // t strictly increasing, >= 2 samples per series
};

// Abscissa/image samples of the unit-time propagation map: y_i ~ D(x_i).
// Sorted by x; near-duplicate abscissas are merged by averaging.
struct PairSet {
  std::vector<double> x;
  std::vector<double> y;
  double delta_t = 1.0;

  size_t size() const { return x.size(); }
  Interval hull() const { return {x.front(), x.back()}; }

  // Sorts by x and merges duplicates within 1e-12 * (abscissa span).
  void normalize();
};

struct IngestOptions {
  char delimiter = ',';
  std::string default_id = "default";
};

TimeSeriesSet load_series(const std::string& path, const IngestOptions& options = {});
TimeSeriesSet parse_series(std::istream& in, const IngestOptions& options = {});

void write_series_csv(const std::string& path, const TimeSeriesSet& ts);

PairSet build_pairs_uniform(const TimeSeriesSet& ts, double delta_t);
PairSet build_pairs_resampled(const TimeSeriesSet& ts, double delta_t,
                              InterpRule time_interp = InterpRule::MonotoneCubic);
PairSet merge_pair_sets(const std::vector<PairSet>& sets);

PairSet load_pairs(const std::string& path);
void write_pairs_csv(const std::string& path, const PairSet& pairs);

}  // namespace fieldrec
