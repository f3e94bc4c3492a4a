#pragma once

// Internal damped Gauss-Newton driver shared by the propagation and field
// least-squares fits. Not installed.

#include <Eigen/Dense>

#include <functional>
#include <limits>

#include "fieldrec/errors.hpp"

namespace fieldrec::detail {

struct GaussNewtonResult {
  Eigen::VectorXd params;
  double residual_norm = 0;
  int iterations = 0;
};

// Halves the step until the residual norm decreases; non-finite trial
// residuals count as worse. Throws SingularJacobian / NoConvergence.
inline GaussNewtonResult gauss_newton(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual, Eigen::VectorXd p,
    int max_iter = 500) {
  auto norm_of = [](const Eigen::VectorXd& r) {
    return r.allFinite() ? r.norm() : std::numeric_limits<double>::infinity();
  };
  Eigen::VectorXd r = residual(p);
  double rn = norm_of(r);
  if (!std::isfinite(rn)) {
    raise(ErrorCode::InvalidParameter, "gauss_newton: residual not finite at the initial guess");
  }
  const int m = static_cast<int>(r.size());
  const int np = static_cast<int>(p.size());
  if (np == 0) return {p, rn, 0};
  int it = 0;
  for (; it < max_iter; ++it) {
    Eigen::MatrixXd J(m, np);
    for (int j = 0; j < np; ++j) {
      const double h = 1e-6 * (1.0 + std::abs(p(j)));
      Eigen::VectorXd pp = p, pm = p;
      pp(j) += h;
      pm(j) -= h;
      const Eigen::VectorXd rp = residual(pp);
      const Eigen::VectorXd rm = residual(pm);
      if (rp.allFinite() && rm.allFinite()) {
        J.col(j) = (rp - rm) / (2.0 * h);
      } else if (rp.allFinite()) {
        J.col(j) = (rp - r) / h;
      } else if (rm.allFinite()) {
        J.col(j) = (r - rm) / h;
      } else {
        raise(ErrorCode::SingularJacobian, "gauss_newton: Jacobian not finite");
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
    if (qr.rank() < np) {
      raise(ErrorCode::SingularJacobian, "gauss_newton: rank-deficient Jacobian");
    }
    const Eigen::VectorXd step = qr.solve(-r);
    if (!step.allFinite()) {
      raise(ErrorCode::SingularJacobian, "gauss_newton: unsolvable least-squares step");
    }

    double t = 1.0;
    Eigen::VectorXd p_next, r_next;
    double rn_next = std::numeric_limits<double>::infinity();
    for (int half = 0; half < 30; ++half) {
      p_next = p + t * step;
      r_next = residual(p_next);
      rn_next = norm_of(r_next);
      if (rn_next <= rn) break;
      t *= 0.5;
    }
    if (rn_next > rn) break;  // no descent left; accept current point
    const double move = (t * step).norm();
    const double improved = rn - rn_next;
    p = p_next;
    r = r_next;
    rn = rn_next;
    if (move <= 1e-12 * (1.0 + p.norm()) || improved <= 1e-15 * (1.0 + rn)) {
      return {p, rn, it + 1};
    }
  }
  if (it >= max_iter) {
    raise(ErrorCode::NoConvergence, "gauss_newton: iteration cap reached");
  }
  return {p, rn, it};
}

}  // namespace fieldrec::detail
