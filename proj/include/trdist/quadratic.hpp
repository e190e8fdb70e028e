#pragma once

// Diagonal-Hessian quadratic models and the multiplier-shifted Newton step.
//
// A model is stored in canonical form
//
//   q(x) = 1/2 sum_i h_i x_i^2 + sum_i b_i x_i + c
//
// with h the Hessian diagonal. Models written as -1/2 x^T A x + b^T x are
// converted with h = -diag(A).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trdist/error.hpp"

namespace trdist {

using Vector = std::vector<double>;

inline void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::non_finite_input, std::string(what) + " has a non-finite entry");
    }
  }
}

inline void require_same_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw Error(ErrorCode::dimension_mismatch, std::string(what) + ": expected length " +
                                                   std::to_string(expected) + ", got " +
                                                   std::to_string(got));
  }
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Componentwise a - b.
inline Vector subtract(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "subtract");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return norm2(subtract(a, b));
}

class DiagQuadratic {
 public:
  DiagQuadratic(Vector hess_diag, Vector lin, double offset = 0.0)
      : hess_diag_(std::move(hess_diag)), lin_(std::move(lin)), offset_(offset) {
    if (hess_diag_.empty()) {
      throw Error(ErrorCode::invalid_argument, "quadratic needs at least one variable");
    }
    require_same_dim(hess_diag_.size(), lin_.size(), "linear coefficient");
    require_finite(hess_diag_, "Hessian diagonal");
    require_finite(lin_, "linear coefficient");
    if (!std::isfinite(offset_)) {
      throw Error(ErrorCode::non_finite_input, "offset is not finite");
    }
  }

  /// Pure quadratic form with zero linear part and offset.
  static DiagQuadratic from_hessian(Vector hess_diag) {
    Vector lin(hess_diag.size(), 0.0);
    return DiagQuadratic(std::move(hess_diag), std::move(lin), 0.0);
  }

  std::size_t dim() const noexcept { return hess_diag_.size(); }
  std::span<const double> hess_diag() const noexcept { return hess_diag_; }
  std::span<const double> lin() const noexcept { return lin_; }
  double offset() const noexcept { return offset_; }

  double min_curvature() const { return *std::min_element(hess_diag_.begin(), hess_diag_.end()); }
  bool is_nonconvex() const { return min_curvature() < 0.0; }

  friend bool operator==(const DiagQuadratic&, const DiagQuadratic&) = default;

 private:
  Vector hess_diag_;
  Vector lin_;
  double offset_;
};

inline double evaluate(const DiagQuadratic& q, std::span<const double> x) {
  require_same_dim(q.dim(), x.size(), "evaluate point");
  const auto h = q.hess_diag();
  const auto b = q.lin();
  double value = q.offset();
  for (std::size_t i = 0; i < x.size(); ++i) value += 0.5 * h[i] * x[i] * x[i] + b[i] * x[i];
  return value;
}

inline Vector gradient(const DiagQuadratic& q, std::span<const double> x) {
  require_same_dim(q.dim(), x.size(), "gradient point");
  const auto h = q.hess_diag();
  const auto b = q.lin();
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = h[i] * x[i] + b[i];
  return g;
}

/// Throws ShiftNotPositive unless every h_i + omega is strictly positive.
inline void require_positive_shift(const DiagQuadratic& q, double omega, const char* what) {
  if (!std::isfinite(omega)) {
    throw Error(ErrorCode::non_finite_input, std::string(what) + " multiplier is not finite");
  }
  const auto h = q.hess_diag();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] + omega > 0.0)) {
      throw Error(ErrorCode::shift_not_positive,
                  std::string(what) + ": shifted curvature h[" + std::to_string(i) +
                      "] + omega = " + std::to_string(h[i] + omega) + " is not positive");
    }
  }
}

/// x - (diag(h) + omega I)^{-1} grad q(x).
///
/// The shifted Hessian must be invertible, so a semidefinite shift is
/// rejected even though the trust-region KKT conditions admit it.
inline Vector damped_step(const DiagQuadratic& q, std::span<const double> x, double omega) {
  require_same_dim(q.dim(), x.size(), "step origin");
  require_finite(x, "step origin");
  require_positive_shift(q, omega, "damped step");
  const auto h = q.hess_diag();
  const Vector g = gradient(q, x);
  Vector next(x.begin(), x.end());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] -= g[i] / (h[i] + omega);
  return next;
}

/// The four trust-region multipliers of the two-step iteration: omega1 and
/// omega2 drive model f, omega1_t and omega2_t drive model Q.
struct DampingSchedule {
  double omega1 = 0.0;
  double omega1_t = 0.0;
  double omega2 = 0.0;
  double omega2_t = 0.0;

  friend bool operator==(const DampingSchedule&, const DampingSchedule&) = default;
};

inline void validate(const DampingSchedule& s) {
  const std::pair<const char*, double> entries[] = {
      {"omega1", s.omega1}, {"omega1_t", s.omega1_t}, {"omega2", s.omega2}, {"omega2_t", s.omega2_t}};
  for (const auto& [name, value] : entries) {
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::non_finite_input, std::string(name) + " is not finite");
    }
    if (!(value > 0.0)) {
      throw Error(ErrorCode::invalid_argument, std::string(name) + " must be positive");
    }
  }
}

/// First-step shifts must be positive semidefinite, second-step shifts
/// positive definite.
inline void check_feasible(const DampingSchedule& s, const DiagQuadratic& f, const DiagQuadratic& q) {
  validate(s);
  require_same_dim(f.dim(), q.dim(), "model Q");
  const auto hf = f.hess_diag();
  const auto hq = q.hess_diag();
  for (std::size_t i = 0; i < f.dim(); ++i) {
    const auto at = " at coordinate " + std::to_string(i);
    if (hf[i] + s.omega1 < 0.0) {
      throw Error(ErrorCode::shift_not_positive, "f Hessian + omega1 is indefinite" + at);
    }
    if (hq[i] + s.omega1_t < 0.0) {
      throw Error(ErrorCode::shift_not_positive, "Q Hessian + omega1_t is indefinite" + at);
    }
    if (!(hf[i] + s.omega2 > 0.0)) {
      throw Error(ErrorCode::shift_not_positive, "f Hessian + omega2 is not positive definite" + at);
    }
    if (!(hq[i] + s.omega2_t > 0.0)) {
      throw Error(ErrorCode::shift_not_positive, "Q Hessian + omega2_t is not positive definite" + at);
    }
  }
}

}  // namespace trdist
