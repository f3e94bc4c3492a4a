#include "fieldrec/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace fieldrec {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double* out) {
  char* end = nullptr;
  const std::string t = trim(s);
  if (t.empty()) return false;
  *out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, delim)) out.push_back(item);
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void TimeSeriesSet::validate() const {
  if (series.empty()) raise(ErrorCode::EmptySeries, "no series present");
  for (const auto& s : series) {
    if (s.t.size() < 2) {
      raise(ErrorCode::EmptySeries, "series '" + s.id + "' has fewer than 2 samples");
    }
    if (s.t.size() != s.x.size()) {
      raise(ErrorCode::ParseError, "series '" + s.id + "' has mismatched columns");
    }
    for (size_t i = 0; i + 1 < s.t.size(); ++i) {
      if (!(s.t[i] < s.t[i + 1])) {
        raise(ErrorCode::NonMonotoneTime,
              "series '" + s.id + "' has non-increasing time at sample " + std::to_string(i + 1));
      }
    }
  }
}

void PairSet::normalize() {
  if (x.empty()) return;
  std::vector<size_t> order(x.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });

  std::vector<double> xs, ys;
  xs.reserve(x.size());
  ys.reserve(y.size());
  for (size_t k : order) {
    if (!std::isfinite(x[k]) || !std::isfinite(y[k])) {
      raise(ErrorCode::InvalidParameter, "PairSet: non-finite pair");
    }
    xs.push_back(x[k]);
    ys.push_back(y[k]);
  }
  const double width = xs.back() - xs.front();
  const double tol = 1e-12 * std::max(width, 1e-300);

  std::vector<double> mx, my;
  size_t i = 0;
  while (i < xs.size()) {
    size_t j = i + 1;
    double sx = xs[i], sy = ys[i];
    size_t cnt = 1;
    while (j < xs.size() && xs[j] - xs[i] <= tol) {
      sx += xs[j];
      sy += ys[j];
      ++cnt;
      ++j;
    }
    mx.push_back(sx / cnt);
    my.push_back(sy / cnt);
    i = j;
  }
  x = std::move(mx);
  y = std::move(my);
}

TimeSeriesSet parse_series(std::istream& in, const IngestOptions& options) {
  std::map<std::string, size_t> index;
  TimeSeriesSet out;
  std::string line;
  size_t lineno = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cols = split(t, options.delimiter);
    std::string id;
    std::string ts, xs;
    if (cols.size() == 2) {
      id = options.default_id;
      ts = cols[0];
      xs = cols[1];
    } else if (cols.size() == 3) {
      id = trim(cols[0]);
      ts = cols[1];
      xs = cols[2];
    } else {
      raise(ErrorCode::ParseError,
            "line " + std::to_string(lineno) + ": expected 2 or 3 columns, got " +
                std::to_string(cols.size()));
    }
    double tv, xv;
    if (!parse_double(ts, &tv) || !parse_double(xs, &xv)) {
      if (!saw_data) continue;  // header row
      raise(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": malformed number");
    }
    saw_data = true;
    auto [it, inserted] = index.emplace(id, out.series.size());
    if (inserted) out.series.push_back(TimeSeries{id, {}, {}});
    auto& s = out.series[it->second];
    s.t.push_back(tv);
    s.x.push_back(xv);
  }
  out.validate();
  return out;
}

TimeSeriesSet load_series(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  return parse_series(in, options);
}

void write_series_csv(const std::string& path, const TimeSeriesSet& ts) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path);
  out << "series_id,t,x\n";
  for (const auto& s : ts.series) {
    for (size_t i = 0; i < s.t.size(); ++i) {
      out << s.id << "," << format_double(s.t[i]) << "," << format_double(s.x[i]) << "\n";
    }
  }
}

PairSet build_pairs_uniform(const TimeSeriesSet& ts, double delta_t) {
  ts.validate();
  if (!(delta_t > 0)) raise(ErrorCode::InvalidParameter, "delta_t must be positive");
  PairSet out;
  out.delta_t = delta_t;
  for (const auto& s : ts.series) {
    for (size_t i = 0; i + 1 < s.t.size(); ++i) {
      const double dt = s.t[i + 1] - s.t[i];
      if (std::abs(dt - delta_t) > 1e-9 * std::max(std::abs(delta_t), 1.0)) {
        raise(ErrorCode::NonUniformGrid,
              "series '" + s.id + "': spacing " + std::to_string(dt) + " != delta_t");
      }
      out.x.push_back(s.x[i]);
      out.y.push_back(s.x[i + 1]);
    }
  }
  out.normalize();
  return out;
}

PairSet build_pairs_resampled(const TimeSeriesSet& ts, double delta_t, InterpRule time_interp) {
  ts.validate();
  if (!(delta_t > 0)) raise(ErrorCode::InvalidParameter, "delta_t must be positive");
  PairSet out;
  out.delta_t = delta_t;
  for (const auto& s : ts.series) {
    const double span = s.t.back() - s.t.front();
    if (span < delta_t) continue;
    GridFunction x_ap(s.t, s.x, time_interp);
    for (size_t i = 0; i < s.t.size(); ++i) {
      const double target = s.t[i] + delta_t;
      if (target > s.t.back() + 1e-9 * span) break;
      out.x.push_back(s.x[i]);
      out.y.push_back(x_ap(std::min(target, s.t.back())));
    }
  }
  if (out.x.empty()) {
    raise(ErrorCode::InsufficientSpan, "no series spans a full delta_t");
  }
  out.normalize();
  return out;
}

PairSet merge_pair_sets(const std::vector<PairSet>& sets) {
  if (sets.empty()) raise(ErrorCode::InvalidParameter, "merge_pair_sets: empty input");
  PairSet out;
  out.delta_t = sets.front().delta_t;
  for (const auto& s : sets) {
    if (std::abs(s.delta_t - out.delta_t) > 1e-9 * std::max(std::abs(out.delta_t), 1.0)) {
      raise(ErrorCode::MixedDeltaT, "pair sets with different delta_t cannot be merged");
    }
    out.x.insert(out.x.end(), s.x.begin(), s.x.end());
    out.y.insert(out.y.end(), s.y.begin(), s.y.end());
  }
  out.normalize();
  return out;
}

PairSet load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  PairSet out;
  std::string line;
  size_t lineno = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto pos = t.find("delta_t");
      if (pos != std::string::npos) {
        const auto eq = t.find('=', pos);
        double dt;
        if (eq != std::string::npos && parse_double(t.substr(eq + 1), &dt)) out.delta_t = dt;
      }
      continue;
    }
    const auto cols = split(t, ',');
    if (cols.size() != 2) {
      raise(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected x,y");
    }
    double xv, yv;
    if (!parse_double(cols[0], &xv) || !parse_double(cols[1], &yv)) {
      if (!saw_data) continue;  // header row
      raise(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": malformed number");
    }
    saw_data = true;
    out.x.push_back(xv);
    out.y.push_back(yv);
  }
  if (out.x.empty()) raise(ErrorCode::EmptySeries, "no pairs in " + path);
  out.normalize();
  return out;
}

void write_pairs_csv(const std::string& path, const PairSet& pairs) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path);
  out << "# delta_t = " << format_double(pairs.delta_t) << "\n";
  out << "x,y\n";
  for (size_t i = 0; i < pairs.size(); ++i) {
    out << format_double(pairs.x[i]) << "," << format_double(pairs.y[i]) << "\n";
  }
}

}  // namespace fieldrec
