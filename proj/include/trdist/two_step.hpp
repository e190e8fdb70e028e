#pragma once

// Two damped-Newton steps on a pair of non-convex diagonal models f and Q
// started from a common point, and the conditions under which the second
// pair of iterates is closer than the first:
//
//   ||x2_t - x2|| <= eps ||x1_t - x1||.
//
// Per coordinate, with G = h_Q + omega2_t, H = h_f + omega2 and kappa the
// ratio (x1 - x0) / (x1_t - x1), the contraction factor realized along that
// coordinate is
//
//   |1 + omega1_t (1 + kappa) / G - omega1 kappa / H|.
//
// In one dimension this is exactly the realized ratio, so the kappa-interval
// test in check_theorem1 is necessary and sufficient. In n dimensions the
// per-coordinate bound is only sufficient.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trdist/error.hpp"
#include "trdist/quadratic.hpp"

namespace trdist {

/// Absolute slack on every <= / >= in the condition checks.
inline constexpr double kConditionSlack = 1e-9;

struct TwoStepTrace {
  Vector x0;
  Vector x1, x1_t;
  Vector x2, x2_t;
  double delta1 = 0.0, delta1_t = 0.0;
  double delta2 = 0.0, delta2_t = 0.0;
};

struct KappaDiag {
  Vector values;
  std::vector<bool> defined_mask;

  bool all_defined() const {
    return std::all_of(defined_mask.begin(), defined_mask.end(), [](bool b) { return b; });
  }
};

enum class Branch {
  eq4,         // G omega1 > H omega1_t, kappa1 <= kappa <= kappa2
  eq5,         // G omega1 < H omega1_t, kappa2 <= kappa <= kappa1
  degenerate,  // G omega1 == H omega1_t: interval bounds undefined
};

inline std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::eq4: return "Eq4";
    case Branch::eq5: return "Eq5";
    case Branch::degenerate: return "degenerate";
  }
  return "?";
}

struct CoordinateCondition {
  std::size_t index = 0;
  double G = 0.0;  // h_Q[i] + omega2_t
  double H = 0.0;  // h_f[i] + omega2
  bool kappa_defined = true;
  double kappa = 0.0;
  double kappa1 = std::numeric_limits<double>::quiet_NaN();
  double kappa2 = std::numeric_limits<double>::quiet_NaN();
  Branch branch = Branch::degenerate;
  double min_epsilon = 0.0;
  bool satisfied = false;
};

struct ConditionReport {
  double epsilon = 0.0;
  std::vector<CoordinateCondition> per_coord;
  bool theorem_satisfied = false;
  double min_epsilon = 0.0;
  double observed_ratio = 0.0;
};

// ---------------------------------------------------------------------------

inline void require_nonconvex_pair(const DiagQuadratic& f, const DiagQuadratic& q) {
  if (!f.is_nonconvex()) throw Error(ErrorCode::not_nonconvex, "model f has no negative curvature");
  if (!q.is_nonconvex()) throw Error(ErrorCode::not_nonconvex, "model Q has no negative curvature");
}

inline TwoStepTrace run_two_steps(const DiagQuadratic& f, const DiagQuadratic& q,
                                  std::span<const double> x0, const DampingSchedule& sched) {
  require_same_dim(f.dim(), q.dim(), "model Q");
  require_same_dim(f.dim(), x0.size(), "start point");
  require_nonconvex_pair(f, q);
  check_feasible(sched, f, q);

  TwoStepTrace t;
  t.x0.assign(x0.begin(), x0.end());
  t.x1 = damped_step(f, t.x0, sched.omega1);
  t.x1_t = damped_step(q, t.x0, sched.omega1_t);
  t.x2 = damped_step(f, t.x1, sched.omega2);
  t.x2_t = damped_step(q, t.x1_t, sched.omega2_t);
  t.delta1 = distance(t.x1, t.x0);
  t.delta1_t = distance(t.x1_t, t.x0);
  t.delta2 = distance(t.x2, t.x1);
  // The Q-model second step is centered at x1_t.
  t.delta2_t = distance(t.x2_t, t.x1_t);
  return t;
}

/// x2_t - x2 rebuilt from first-step displacements only:
///   omega1_t (H_Q + omega2_t I)^{-1} (x1_t - x0)
/// - omega1   (H_f + omega2   I)^{-1} (x1   - x0) + (x1_t - x1).
inline Vector difference_identity(const DiagQuadratic& f, const DiagQuadratic& q,
                                  const TwoStepTrace& trace, const DampingSchedule& sched) {
  const std::size_t n = f.dim();
  require_same_dim(n, q.dim(), "model Q");
  require_same_dim(n, trace.x0.size(), "trace x0");
  require_same_dim(n, trace.x1.size(), "trace x1");
  require_same_dim(n, trace.x1_t.size(), "trace x1_t");
  require_positive_shift(f, sched.omega2, "f second step");
  require_positive_shift(q, sched.omega2_t, "Q second step");

  const auto hf = f.hess_diag();
  const auto hq = q.hess_diag();
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d_q = trace.x1_t[i] - trace.x0[i];
    const double d_f = trace.x1[i] - trace.x0[i];
    out[i] = sched.omega1_t * d_q / (hq[i] + sched.omega2_t) -
             sched.omega1 * d_f / (hf[i] + sched.omega2) + (trace.x1_t[i] - trace.x1[i]);
  }
  return out;
}

/// Diagonal kappa with kappa (x1_t - x1) = x1 - x0. Coordinates where both
/// sides vanish are left undefined; a zero gap with a nonzero displacement
/// admits no diagonal kappa at all.
inline KappaDiag compute_kappa(const TwoStepTrace& trace) {
  const std::size_t n = trace.x0.size();
  require_same_dim(n, trace.x1.size(), "trace x1");
  require_same_dim(n, trace.x1_t.size(), "trace x1_t");
  if (trace.x1 == trace.x1_t) {
    throw Error(ErrorCode::assumption_violated, "first-step minimizers coincide (x1_t == x1)");
  }
  KappaDiag k{Vector(n, 0.0), std::vector<bool>(n, true)};
  for (std::size_t i = 0; i < n; ++i) {
    const double num = trace.x1[i] - trace.x0[i];
    const double den = trace.x1_t[i] - trace.x1[i];
    if (den != 0.0) {
      k.values[i] = num / den;
    } else if (num == 0.0) {
      k.defined_mask[i] = false;
    } else {
      throw Error(ErrorCode::kappa_nonexistent,
                  "coordinate " + std::to_string(i) + " has x1_t == x1 but x1 != x0");
    }
  }
  return k;
}

/// |1 + omega1_t (1 + kappa) / G - omega1 kappa / H|: the smallest eps for
/// which one coordinate contracts. At least 1 whenever -1 <= kappa <= 0.
inline double min_epsilon_1d(double G, double H, double omega1, double omega1_t, double kappa) {
  if (!std::isfinite(G) || !std::isfinite(H) || !std::isfinite(omega1) ||
      !std::isfinite(omega1_t) || !std::isfinite(kappa)) {
    throw Error(ErrorCode::non_finite_input, "min_epsilon_1d argument is not finite");
  }
  if (!(G > 0.0) || !(H > 0.0)) {
    throw Error(ErrorCode::non_positive_shift, "shifted curvatures G and H must be positive");
  }
  if (!(omega1 > 0.0) || !(omega1_t > 0.0)) {
    throw Error(ErrorCode::non_positive_shift, "first-step multipliers must be positive");
  }
  return std::abs(1.0 + omega1_t * (1.0 + kappa) / G - omega1 * kappa / H);
}

namespace detail {

inline void require_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "epsilon must lie in [0, 1]");
  }
}

/// One coordinate of the interval test. G and H must be positive.
inline CoordinateCondition coordinate_condition(std::size_t index, double G, double H,
                                                double omega1, double omega1_t,
                                                std::optional<double> kappa, double epsilon) {
  CoordinateCondition c;
  c.index = index;
  c.G = G;
  c.H = H;

  const double lhs = G * omega1;
  const double rhs = H * omega1_t;
  const double den = lhs - rhs;
  const bool degenerate =
      std::abs(den) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lhs), std::abs(rhs));
  if (!degenerate) {
    c.kappa1 = H * ((1.0 - epsilon) * G + omega1_t) / den;
    c.kappa2 = H * ((1.0 + epsilon) * G + omega1_t) / den;
    c.branch = den > 0.0 ? Branch::eq4 : Branch::eq5;
  }

  if (!kappa) {
    // Zero displacement and zero gap: nothing to contract along this axis.
    c.kappa_defined = false;
    c.kappa = std::numeric_limits<double>::quiet_NaN();
    c.min_epsilon = 0.0;
    c.satisfied = true;
    return c;
  }

  c.kappa = *kappa;
  c.min_epsilon = min_epsilon_1d(G, H, omega1, omega1_t, c.kappa);
  switch (c.branch) {
    case Branch::eq4:
      c.satisfied = c.kappa1 - kConditionSlack <= c.kappa && c.kappa <= c.kappa2 + kConditionSlack;
      break;
    case Branch::eq5:
      c.satisfied = c.kappa2 - kConditionSlack <= c.kappa && c.kappa <= c.kappa1 + kConditionSlack;
      break;
    case Branch::degenerate:
      c.satisfied = c.min_epsilon <= epsilon + kConditionSlack;
      break;
  }
  return c;
}

inline void require_analysis_inputs(const DiagQuadratic& f, const DiagQuadratic& q,
                                    const DampingSchedule& sched) {
  require_same_dim(f.dim(), q.dim(), "model Q");
  require_nonconvex_pair(f, q);
  validate(sched);
  require_positive_shift(f, sched.omega2, "f second step");
  require_positive_shift(q, sched.omega2_t, "Q second step");
}

inline double observed_ratio(const TwoStepTrace& trace) {
  const double gap1 = distance(trace.x1_t, trace.x1);
  if (gap1 == 0.0) {
    throw Error(ErrorCode::assumption_violated, "first-step minimizers coincide (x1_t == x1)");
  }
  return distance(trace.x2_t, trace.x2) / gap1;
}

}  // namespace detail

/// One-dimensional test for a bare kappa. observed_ratio is the realized
/// ratio of any 1-D configuration with this kappa (gap x1_t - x1 = 1,
/// displacement x1 - x0 = kappa), which coincides with min_epsilon.
inline ConditionReport check_theorem1(const DiagQuadratic& f, const DiagQuadratic& q,
                                      const DampingSchedule& sched, double kappa, double epsilon) {
  if (f.dim() != 1 || q.dim() != 1) {
    throw Error(ErrorCode::not_one_dimensional, "check_theorem1 needs one-dimensional models");
  }
  detail::require_analysis_inputs(f, q, sched);
  detail::require_epsilon(epsilon);
  if (!std::isfinite(kappa)) throw Error(ErrorCode::non_finite_input, "kappa is not finite");

  const double G = q.hess_diag()[0] + sched.omega2_t;
  const double H = f.hess_diag()[0] + sched.omega2;
  ConditionReport r;
  r.epsilon = epsilon;
  r.per_coord.push_back(
      detail::coordinate_condition(0, G, H, sched.omega1, sched.omega1_t, kappa, epsilon));
  r.theorem_satisfied = r.per_coord.front().satisfied;
  r.min_epsilon = r.per_coord.front().min_epsilon;

  TwoStepTrace unit;
  unit.x0 = {0.0};
  unit.x1 = {kappa};
  unit.x1_t = {kappa + 1.0};
  const Vector diff = difference_identity(f, q, unit, sched);
  r.observed_ratio = std::abs(diff[0]);
  return r;
}

/// n-dimensional sufficient test. Every defined coordinate must pass its
/// interval test; undefined coordinates pass vacuously.
inline ConditionReport check_theorem2(const DiagQuadratic& f, const DiagQuadratic& q,
                                      const DampingSchedule& sched, const TwoStepTrace& trace,
                                      const KappaDiag& kappa, double epsilon) {
  detail::require_analysis_inputs(f, q, sched);
  detail::require_epsilon(epsilon);
  const std::size_t n = f.dim();
  require_same_dim(n, kappa.values.size(), "kappa");
  require_same_dim(n, kappa.defined_mask.size(), "kappa mask");
  require_same_dim(n, trace.x2.size(), "trace x2");
  require_same_dim(n, trace.x2_t.size(), "trace x2_t");

  const auto hf = f.hess_diag();
  const auto hq = q.hess_diag();
  ConditionReport r;
  r.epsilon = epsilon;
  r.theorem_satisfied = true;
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<double> k;
    if (kappa.defined_mask[i]) k = kappa.values[i];
    auto c = detail::coordinate_condition(i, hq[i] + sched.omega2_t, hf[i] + sched.omega2,
                                          sched.omega1, sched.omega1_t, k, epsilon);
    r.theorem_satisfied = r.theorem_satisfied && c.satisfied;
    r.min_epsilon = std::max(r.min_epsilon, c.min_epsilon);
    r.per_coord.push_back(c);
  }
  r.observed_ratio = detail::observed_ratio(trace);
  return r;
}

inline ConditionReport check_theorem2(const DiagQuadratic& f, const DiagQuadratic& q,
                                      const DampingSchedule& sched, const TwoStepTrace& trace,
                                      double epsilon) {
  return check_theorem2(f, q, sched, trace, compute_kappa(trace), epsilon);
}

/// One-dimensional test on an actual trace; kappa and observed_ratio come
/// from the iterates.
inline ConditionReport check_theorem1(const DiagQuadratic& f, const DiagQuadratic& q,
                                      const DampingSchedule& sched, const TwoStepTrace& trace,
                                      double epsilon) {
  if (f.dim() != 1 || q.dim() != 1) {
    throw Error(ErrorCode::not_one_dimensional, "check_theorem1 needs one-dimensional models");
  }
  const KappaDiag k = compute_kappa(trace);
  return check_theorem2(f, q, sched, trace, k, epsilon);
}

}  // namespace trdist
