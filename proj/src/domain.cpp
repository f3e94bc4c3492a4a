#include "fieldrec/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fieldrec {

namespace {

constexpr int kSignSamples = 512;
constexpr double kHyperbolicTol = 1e-6;

}  // namespace

std::vector<FixedPointInfo> find_fixed_points(const PropagationMap& map, const Interval& interval,
                                              double tol, int grid_cells) {
  if (!interval.finite()) {
    raise(ErrorCode::InvalidParameter, "find_fixed_points: interval must be finite");
  }
  ScalarMap gap{[&map](double z) { return map(z) - z; }, {}, interval};
  const std::vector<double> zs = linspace(interval.lo, interval.hi, grid_cells + 1);
  std::vector<double> fs(zs.size());
  for (size_t i = 0; i < zs.size(); ++i) fs[i] = gap(zs[i]);

  std::vector<FixedPointInfo> out;
  auto push = [&](double loc, bool tangential) {
    for (const auto& fp : out) {
      if (std::abs(fp.location - loc) <= 10.0 * tol * (1.0 + std::abs(loc))) return;
    }
    FixedPointInfo info;
    info.location = loc;
    info.multiplier = map.derivative(loc);
    info.tangential = tangential;
    info.hyperbolic = std::abs(info.multiplier - 1.0) >= kHyperbolicTol;
    out.push_back(info);
  };

  for (size_t i = 0; i + 1 < zs.size(); ++i) {
    if (fs[i] == 0.0) {
      push(zs[i], false);
    } else if (fs[i] * fs[i + 1] < 0.0) {
      Bracket br{zs[i], zs[i + 1], fs[i], fs[i + 1]};
      push(find_root(gap, br, tol), false);
    }
  }
  if (fs.back() == 0.0) push(zs.back(), false);

  // Tangential contacts: interior minima of |D(z)-z| that reach tol without
  // a sign change.
  for (size_t i = 1; i + 1 < zs.size(); ++i) {
    const double a = std::abs(fs[i - 1]), b = std::abs(fs[i]), c = std::abs(fs[i + 1]);
    if (b < tol && b <= a && b <= c && fs[i - 1] * fs[i + 1] > 0.0) {
      push(zs[i], true);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FixedPointInfo& a, const FixedPointInfo& b) { return a.location < b.location; });
  return out;
}

std::vector<Subinterval> subdivide(const PropagationMap& map, const Interval& interval) {
  if (!interval.finite()) {
    raise(ErrorCode::InvalidParameter, "subdivide: interval must be finite");
  }
  const double edge_tol = 1e-9 * (1.0 + interval.width());

  std::vector<double> cuts{interval.lo};
  for (const auto& fp : map.fixed_points) {
    if (fp.location > interval.lo + edge_tol && fp.location < interval.hi - edge_tol) {
      cuts.push_back(fp.location);
    }
  }
  cuts.push_back(interval.hi);

  auto fixed_at = [&](double z) {
    for (const auto& fp : map.fixed_points) {
      if (std::abs(fp.location - z) <= std::max(edge_tol, fp_tolerance(z))) return true;
    }
    return false;
  };

  std::vector<Subinterval> out;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    Subinterval sub;
    sub.lo = cuts[k];
    sub.hi = cuts[k + 1];
    sub.lo_is_fixed = fixed_at(sub.lo);
    sub.hi_is_fixed = fixed_at(sub.hi);

    // Sign of D(z)-z, verified on interior samples; a sign flip here means a
    // missed fixed point or a badly fitted D.
    const double margin = 1e-3 * sub.width();
    int positives = 0, negatives = 0;
    for (int s = 0; s < kSignSamples; ++s) {
      const double z = sub.lo + margin + (sub.width() - 2.0 * margin) * (s + 0.5) / kSignSamples;
      const double gap = map(z) - z;
      (gap > 0 ? positives : negatives)++;
      if (map.derivative(z) <= 0.0) {
        std::ostringstream os;
        os << "D' <= 0 at z = " << z << "; the fitted map is not monotone there";
        raise(ErrorCode::InconsistentFit, os.str());
      }
    }
    if (positives > 0 && negatives > 0) {
      std::ostringstream os;
      os << "D(z)-z changes sign inside (" << sub.lo << ", " << sub.hi
         << ") away from the located fixed points";
      raise(ErrorCode::InconsistentFit, os.str());
    }
    sub.sign = positives > 0 ? Subinterval::Sign::Above : Subinterval::Sign::Below;

    // Attractor end. Forward iteration moves down when D<z and up when D>z,
    // so it converges to a fixed lo end (resp. hi end); otherwise the
    // backward iteration converges to the opposite fixed end.
    const bool below = sub.sign == Subinterval::Sign::Below;
    if (below && sub.lo_is_fixed) {
      sub.attractor_end = Subinterval::End::Lo;
      sub.forward = true;
    } else if (!below && sub.hi_is_fixed) {
      sub.attractor_end = Subinterval::End::Hi;
      sub.forward = true;
    } else if (below && sub.hi_is_fixed) {
      sub.attractor_end = Subinterval::End::Hi;
      sub.forward = false;
    } else if (!below && sub.lo_is_fixed) {
      sub.attractor_end = Subinterval::End::Lo;
      sub.forward = false;
    } else {
      sub.splinters_enabled = false;
      sub.flags.push_back("no-fixed-endpoint");
    }

    if (sub.splinters_enabled) {
      const double dfp = map.derivative(sub.attractor());
      sub.multiplier_at_attractor = sub.forward ? dfp : 1.0 / dfp;
      if (!(sub.multiplier_at_attractor > 0.0) ||
          std::abs(dfp - 1.0) < kHyperbolicTol) {
        sub.splinters_enabled = false;
        sub.flags.push_back("non-hyperbolic-attractor");
      } else if (sub.multiplier_at_attractor >= 1.0) {
        // Should not happen for a correctly labeled piece; treat as a fit
        // inconsistency rather than silently iterating a repelling end.
        sub.splinters_enabled = false;
        sub.flags.push_back("repelling-attractor-label");
      }
    }
    out.push_back(std::move(sub));
  }
  return out;
}

OrientedMap::OrientedMap(const PropagationMap& map, const Subinterval& sub, Subinterval::End toward)
    : map_(&map), sub_{sub.lo, sub.hi} {
  const bool toward_lo = toward == Subinterval::End::Lo;
  if ((toward_lo && !sub.lo_is_fixed) || (!toward_lo && !sub.hi_is_fixed)) {
    raise(ErrorCode::NoFixedPointInClosure, "OrientedMap: chosen endpoint is not a fixed point");
  }
  fp_ = toward_lo ? sub.lo : sub.hi;
  const bool below = sub.sign == Subinterval::Sign::Below;
  forward_ = (below && toward_lo) || (!below && !toward_lo);
  const double dfp = map.derivative(fp_);
  mu_ = forward_ ? dfp : 1.0 / dfp;
  if (!(mu_ > 0.0 && mu_ < 1.0 - kHyperbolicTol)) {
    std::ostringstream os;
    os << "OrientedMap: multiplier " << mu_ << " at fp " << fp_ << " is not attracting";
    raise(ErrorCode::InvalidMultiplier, os.str());
  }
}

double OrientedMap::step(double x) const {
  if (forward_) return (*map_)(x);
  ScalarMap restricted{map_->map.eval, map_->map.deriv, sub_};
  return invert_monotone(restricted, x, 1e-14 * (1.0 + std::abs(x)));
}

double OrientedMap::step_deriv(double x) const {
  if (forward_) return map_->derivative(x);
  const double pre = step(x);
  return 1.0 / map_->derivative(pre);
}

Splinter splinter(const PropagationMap& map, const Subinterval& sub, double x0, double tol,
                  int n_max) {
  if (!sub.splinters_enabled) {
    raise(ErrorCode::NoFixedPointInClosure, "splinter: subinterval has no usable attractor");
  }
  if (!(x0 > sub.lo && x0 < sub.hi)) {
    raise(ErrorCode::InvalidParameter, "splinter: x0 must lie strictly inside the subinterval");
  }
  OrientedMap om(map, sub, sub.attractor_end);
  Splinter out;
  out.forward = om.forward();
  out.limit = om.fp();
  out.points.push_back(x0);
  double prev_gap = std::abs(x0 - om.fp());
  for (int n = 0; n < n_max; ++n) {
    const double next = om.step(out.points.back());
    const double gap = std::abs(next - om.fp());
    if (!(gap < prev_gap)) {
      raise(ErrorCode::NonMonotoneSequence,
            "splinter: orbit stopped approaching the attractor (inconsistent D fit?)");
    }
    out.points.push_back(next);
    prev_gap = gap;
    if (gap <= tol) return out;
  }
  out.converged = false;  // capped; partial orbit returned
  return out;
}

void analyze(PropagationMap& map, const Interval& scan, double tol) {
  map.fixed_points = find_fixed_points(map, scan, tol);
  const double center = scan.mid();
  const FixedPointInfo* base = nullptr;
  for (const auto& fp : map.fixed_points) {
    if (fp.multiplier > 0.0 && fp.multiplier < 1.0 && fp.hyperbolic && !fp.tangential) {
      if (!base || std::abs(fp.location - center) < std::abs(base->location - center)) {
        base = &fp;
      }
    }
  }
  if (base) {
    map.base_fixed_point = base->location;
    map.lambda = base->multiplier;
    map.contractive = true;
  } else {
    map.contractive = false;
    map.flags.push_back("non-contractive");
  }
}

}  // namespace fieldrec
