#include "fieldrec/interp.hpp"

#include <algorithm>
#include <cmath>

namespace fieldrec {

MonotoneCubicSpline::MonotoneCubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const size_t n = x_.size();
  if (n < 2 || y_.size() != n) {
    raise(ErrorCode::InvalidParameter, "MonotoneCubicSpline: need at least two knots");
  }
  for (size_t i = 0; i + 1 < n; ++i) {
    if (!(x_[i] < x_[i + 1])) {
      raise(ErrorCode::InvalidParameter, "MonotoneCubicSpline: knots must be strictly increasing");
    }
  }
  m_.assign(n, 0.0);
  if (n == 2) {
    m_[0] = m_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
    return;
  }
  std::vector<double> h(n - 1), d(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  // Interior slopes: weighted harmonic mean, zero across sign changes.
  for (size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      m_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  // Three-point end slopes with the usual shape limiter.
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  };
  m_[0] = end_slope(h[0], h[1], d[0], d[1]);
  m_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

size_t MonotoneCubicSpline::cell(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return x_.size() - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<size_t>(it - x_.begin()) - 1;
}

double MonotoneCubicSpline::operator()(double x) const {
  if (x < x_.front()) return y_.front() + m_.front() * (x - x_.front());
  if (x > x_.back()) return y_.back() + m_.back() * (x - x_.back());
  const size_t i = cell(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double MonotoneCubicSpline::derivative(double x) const {
  if (x < x_.front()) return m_.front();
  if (x > x_.back()) return m_.back();
  const size_t i = cell(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double g00 = (6.0 * t2 - 6.0 * t) / h;
  const double g10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double g01 = (-6.0 * t2 + 6.0 * t) / h;
  const double g11 = 3.0 * t2 - 2.0 * t;
  return g00 * y_[i] + g10 * m_[i] + g01 * y_[i + 1] + g11 * m_[i + 1];
}

BarycentricRational::BarycentricRational(std::vector<double> support, std::vector<double> values,
                                         std::vector<double> weights)
    : support_(std::move(support)), values_(std::move(values)), weights_(std::move(weights)) {
  if (support_.empty() || support_.size() != values_.size() ||
      support_.size() != weights_.size()) {
    raise(ErrorCode::InvalidParameter, "BarycentricRational: inconsistent sizes");
  }
}

BarycentricRational BarycentricRational::floater_hormann(std::vector<double> x,
                                                         std::vector<double> y, int d) {
  const int n = static_cast<int>(x.size()) - 1;  // nodes 0..n
  if (n < 1) raise(ErrorCode::InvalidParameter, "floater_hormann: need at least two nodes");
  d = std::max(0, std::min(d, n));
  std::vector<double> w(static_cast<size_t>(n + 1), 0.0);
  for (int k = 0; k <= n; ++k) {
    double sum = 0.0;
    const int i_min = std::max(0, k - d);
    const int i_max = std::min(k, n - d);
    for (int i = i_min; i <= i_max; ++i) {
      double prod = 1.0;
      for (int j = i; j <= i + d; ++j) {
        if (j == k) continue;
        prod /= (x[static_cast<size_t>(k)] - x[static_cast<size_t>(j)]);
      }
      sum += (i % 2 == 0) ? prod : -prod;
    }
    w[static_cast<size_t>(k)] = sum;
  }
  return BarycentricRational(std::move(x), std::move(y), std::move(w));
}

double BarycentricRational::operator()(double x) const {
  double num = 0.0, den = 0.0;
  for (size_t j = 0; j < support_.size(); ++j) {
    const double dx = x - support_[j];
    if (dx == 0.0) return values_[j];
    const double t = weights_[j] / dx;
    num += t * values_[j];
    den += t;
  }
  return num / den;
}

double BarycentricRational::derivative_at_node(size_t k) const {
  // Schneider-Werner: r'(z_k) = -(1/w_k) * sum_{j!=k} w_j (f_k - f_j)/(z_k - z_j).
  double sum = 0.0;
  for (size_t j = 0; j < support_.size(); ++j) {
    if (j == k) continue;
    sum += weights_[j] * (values_[k] - values_[j]) / (support_[k] - support_[j]);
  }
  return -sum / weights_[k];
}

double BarycentricRational::derivative(double x) const {
  double scale = 0.0;
  for (size_t j = 0; j + 1 < support_.size(); ++j) {
    scale = std::max(scale, std::abs(support_[j + 1] - support_[j]));
  }
  size_t nearest = 0;
  double best = std::abs(x - support_[0]);
  for (size_t j = 1; j < support_.size(); ++j) {
    const double dj = std::abs(x - support_[j]);
    if (dj < best) {
      best = dj;
      nearest = j;
    }
  }
  if (best <= 1e-9 * std::max(1.0, scale)) return derivative_at_node(nearest);

  const double r = (*this)(x);
  double num = 0.0, den = 0.0;
  for (size_t j = 0; j < support_.size(); ++j) {
    const double dx = x - support_[j];
    const double t = weights_[j] / dx;
    num += t * (r - values_[j]) / dx;
    den += t;
  }
  return num / den;
}

double BarycentricRational::denominator(double x) const {
  double den = 0.0;
  for (size_t j = 0; j < support_.size(); ++j) den += weights_[j] / (x - support_[j]);
  return den;
}

double BarycentricRational::residue_at(double pole) const {
  double num = 0.0, dden = 0.0;
  for (size_t j = 0; j < support_.size(); ++j) {
    const double dx = pole - support_[j];
    num += weights_[j] * values_[j] / dx;
    dden -= weights_[j] / (dx * dx);
  }
  return num / dden;
}

std::vector<double> BarycentricRational::real_poles_in(const Interval& where,
                                                       int samples_per_gap) const {
  std::vector<double> nodes = support_;
  std::sort(nodes.begin(), nodes.end());
  // Gap boundaries: hull edges plus every support node inside.
  std::vector<double> bounds{where.lo};
  for (double z : nodes) {
    if (z > where.lo && z < where.hi) bounds.push_back(z);
  }
  bounds.push_back(where.hi);

  std::vector<double> poles;
  const double guard = 1e-10 * std::max(1.0, where.width());
  for (size_t g = 0; g + 1 < bounds.size(); ++g) {
    const double lo = bounds[g] + guard;
    const double hi = bounds[g + 1] - guard;
    if (!(lo < hi)) continue;
    double prev_x = lo;
    double prev_d = denominator(prev_x);
    for (int s = 1; s <= samples_per_gap; ++s) {
      const double x = lo + (hi - lo) * s / samples_per_gap;
      const double dv = denominator(x);
      if (dv == 0.0) {
        poles.push_back(x);
        prev_x = x;
        prev_d = dv;
        continue;
      }
      if (std::isfinite(prev_d) && std::isfinite(dv) && prev_d * dv < 0.0) {
        double a = prev_x, b = x, fa = prev_d;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (a + b);
          const double fm = denominator(m);
          if (fa * fm <= 0.0) {
            b = m;
          } else {
            a = m;
            fa = fm;
          }
        }
        poles.push_back(0.5 * (a + b));
      }
      prev_x = x;
      prev_d = dv;
    }
  }
  return poles;
}

}  // namespace fieldrec
