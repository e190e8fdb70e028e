#pragma once

// Generators for property tests: random valid model pairs and schedules.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>

#include "trdist/quadratic.hpp"
#include "trdist/two_step.hpp"

namespace trdist::gen {

struct Instance {
  DiagQuadratic f;
  DiagQuadratic q;
  Vector x0;
  DampingSchedule sched;
  double epsilon = 0.5;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Hessian diagonal in [-3, 3] with at least one negative entry.
inline Vector random_nonconvex_diag(std::mt19937_64& rng, std::size_t dim) {
  Vector h(dim);
  for (auto& v : h) v = uniform(rng, -3.0, 3.0);
  const auto k = std::uniform_int_distribution<std::size_t>(0, dim - 1)(rng);
  h[k] = -std::abs(h[k]) - 0.05;
  return h;
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t dim, double lo, double hi) {
  Vector v(dim);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

/// Smallest admissible strict shift plus a random margin. Margins are drawn
/// log-uniformly so both tight and loose damping appear.
inline double random_multiplier(std::mt19937_64& rng, const DiagQuadratic& q) {
  return std::max(0.0, -q.min_curvature()) + std::exp(uniform(rng, std::log(0.05), std::log(20.0)));
}

/// A valid instance whose first-step minimizers differ in every coordinate
/// by at least `min_gap`, so every kappa entry is defined.
inline Instance random_instance(std::mt19937_64& rng, std::size_t dim, double min_gap = 1e-3) {
  for (;;) {
    DiagQuadratic f(random_nonconvex_diag(rng, dim), random_vector(rng, dim, -2.0, 2.0));
    DiagQuadratic q(random_nonconvex_diag(rng, dim), random_vector(rng, dim, -2.0, 2.0));
    Vector x0 = random_vector(rng, dim, -2.0, 2.0);
    DampingSchedule s{random_multiplier(rng, f), random_multiplier(rng, q), random_multiplier(rng, f),
                      random_multiplier(rng, q)};
    const Vector x1 = damped_step(f, x0, s.omega1);
    const Vector x1_t = damped_step(q, x0, s.omega1_t);
    bool ok = true;
    for (std::size_t i = 0; i < dim; ++i) ok = ok && std::abs(x1_t[i] - x1[i]) >= min_gap;
    if (!ok) continue;
    return {std::move(f), std::move(q), std::move(x0), s, uniform(rng, 0.0, 1.0)};
  }
}

/// Rewrites q's linear term so every kappa entry lands strictly inside the
/// set where the per-coordinate factor is at most `in.epsilon`. Curvatures and
/// the schedule are untouched. Returns false if some coordinate has no room.
inline bool steer_into_condition(std::mt19937_64& rng, Instance& in, double min_gap = 1e-3) {
  const std::size_t n = in.f.dim();
  const Vector x1 = damped_step(in.f, in.x0, in.sched.omega1);
  const auto hq = in.q.hess_diag();
  Vector lin(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double G = hq[i] + in.sched.omega2_t;
    const double H = in.f.hess_diag()[i] + in.sched.omega2;
    // factor(kappa) = |a + b kappa|
    const double a = 1.0 + in.sched.omega1_t / G;
    const double b = in.sched.omega1_t / G - in.sched.omega1 / H;
    const double move = x1[i] - in.x0[i];
    if (std::abs(b) < 1e-6 || std::abs(move) < min_gap) return false;
    const double centre = -a / b;
    const double half = 0.98 * in.epsilon / std::abs(b);
    const double kappa = centre + uniform(rng, -half, half);
    if (kappa == 0.0) return false;
    const double gap = move / kappa;
    if (std::abs(gap) < min_gap || std::abs(gap) > 1e3) return false;
    const double x1_t = x1[i] + gap;
    const double grad = (hq[i] + in.sched.omega1_t) * (in.x0[i] - x1_t);
    lin[i] = grad - hq[i] * in.x0[i];
  }
  in.q = DiagQuadratic(Vector(hq.begin(), hq.end()), std::move(lin), in.q.offset());
  return true;
}

/// A valid instance satisfying the per-coordinate condition at its epsilon.
inline Instance random_satisfying_instance(std::mt19937_64& rng, std::size_t dim) {
  for (;;) {
    Instance in = random_instance(rng, dim);
    if (steer_into_condition(rng, in)) return in;
  }
}

}  // namespace trdist::gen
