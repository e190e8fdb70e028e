#pragma once

// Exact trust-region subproblem for diagonal-Hessian quadratics:
//
//   min_d  q(center + d)   subject to  ||d||_2 <= radius.
//
// With h the Hessian diagonal and g = grad q(center), every global minimizer
// satisfies (h_i + w) d_i = -g_i, h_i + w >= 0 and w (radius - ||d||) = 0.
// The boundary multiplier is the root of the secular equation
// ||d(w)|| = radius, solved here on psi(w) = 1/||d(w)|| - 1/radius, which is
// increasing and concave on the admissible interval.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "trdist/error.hpp"
#include "trdist/quadratic.hpp"

namespace trdist {

struct TrsSolution {
  Vector step;
  double multiplier = 0.0;
  bool on_boundary = false;
  bool hard_case = false;
  int iterations = 0;
};

struct TrsOptions {
  double psi_tolerance = 1e-12;
  int max_iterations = 200;
};

namespace detail {

struct SecularTerms {
  double norm = 0.0;       // ||d(w)||
  double derivative = 0.0; // sum g_i^2 / (h_i + w)^3
};

inline SecularTerms secular_terms(std::span<const double> h, std::span<const double> g, double w) {
  double sq = 0.0;
  double cube = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double shifted = h[i] + w;
    if (g[i] == 0.0) continue;
    const double r = g[i] / shifted;
    sq += r * r;
    cube += r * r / shifted;
  }
  return {std::sqrt(sq), cube};
}

inline Vector shifted_step(std::span<const double> h, std::span<const double> g, double w) {
  Vector d(h.size(), 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (g[i] != 0.0) d[i] = -g[i] / (h[i] + w);
  }
  return d;
}

}  // namespace detail

inline TrsSolution solve_trs(const DiagQuadratic& q, std::span<const double> center, double radius,
                             const TrsOptions& options = {}) {
  require_same_dim(q.dim(), center.size(), "trust-region center");
  require_finite(center, "trust-region center");
  if (!std::isfinite(radius)) throw Error(ErrorCode::non_finite_input, "radius is not finite");
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "radius must be positive");

  const auto h = q.hess_diag();
  const Vector g = gradient(q, center);
  const double lambda_min = q.min_curvature();
  const double lower = std::max(0.0, -lambda_min);

  // Coordinates whose shifted curvature vanishes at the lower end of the
  // admissible interval. If the gradient is nonzero on any of them the step
  // norm blows up there and the root lies strictly inside the interval.
  bool singular_gradient = false;
  std::size_t first_min = 0;
  bool have_first_min = false;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] + lower == 0.0) {
      if (!have_first_min) {
        first_min = i;
        have_first_min = true;
      }
      if (g[i] != 0.0) singular_gradient = true;
    }
  }

  TrsSolution sol;
  if (!singular_gradient) {
    Vector d = detail::shifted_step(h, g, lower);
    const double len = norm2(d);
    if (len < radius) {
      if (lower == 0.0) {
        sol.step = std::move(d);
        sol.multiplier = 0.0;
        sol.on_boundary = false;
        return sol;
      }
      // Hard case: fill up to the boundary along the lowest-index
      // eigenvector of most negative curvature.
      d[first_min] += std::sqrt(radius * radius - len * len);
      sol.step = std::move(d);
      sol.multiplier = lower;
      sol.on_boundary = true;
      sol.hard_case = true;
      return sol;
    }
    if (len == radius) {
      sol.step = std::move(d);
      sol.multiplier = lower;
      sol.on_boundary = true;
      return sol;
    }
  }

  // Secular equation on (lower, upper]. At `upper` every shifted curvature is
  // at least ||g|| / radius, so ||d(upper)|| <= radius.
  double lo = lower;
  double hi = lower + norm2(g) / radius;
  double w = hi;
  double best_psi = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const auto terms = detail::secular_terms(h, g, w);
    const double psi = 1.0 / terms.norm - 1.0 / radius;
    best_psi = psi;
    // dpsi/dw = sum g_i^2/(h_i+w)^3 / ||d||^3
    const double slope = terms.derivative / (terms.norm * terms.norm * terms.norm);
    if (std::abs(psi) <= options.psi_tolerance) {
      // Converged. A residual psi still leaves ||d|| - radius ~ radius^2 psi,
      // which matters for large radii, so take one more Newton step if it helps.
      const double polished = w - psi / slope;
      if (std::isfinite(polished) && polished > lower) {
        const double psi2 = 1.0 / detail::secular_terms(h, g, polished).norm - 1.0 / radius;
        if (std::abs(psi2) < std::abs(psi)) w = polished;
      }
      break;
    }
    if (psi < 0.0) {
      lo = w;
    } else {
      hi = w;
    }
    double next = w - psi / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (next == w || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) {
      w = next;
      break;
    }
    w = next;
  }
  if (it == options.max_iterations) {
    std::ostringstream msg;
    msg << "secular iteration cap " << options.max_iterations << " reached; bracket [" << lo << ", "
        << hi << "], |psi| = " << std::abs(best_psi);
    throw Error(ErrorCode::no_convergence, msg.str());
  }

  sol.step = detail::shifted_step(h, g, w);
  sol.multiplier = w;
  sol.on_boundary = true;
  sol.iterations = it + 1;
  return sol;
}

/// Objective value of a TRS solution, q(center + step).
inline double trs_objective(const DiagQuadratic& q, std::span<const double> center,
                            const TrsSolution& sol) {
  Vector x(center.begin(), center.end());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += sol.step[i];
  return evaluate(q, x);
}

struct GridMinimum {
  Vector point;  // absolute point center + d
  double value = std::numeric_limits<double>::infinity();
};

/// Exhaustive search over a tensor grid of the ball plus a boundary sampling.
/// Test oracle only; cost grows as points_per_axis^dim.
inline GridMinimum brute_force_trs(const DiagQuadratic& q, std::span<const double> center,
                                   double radius, int points_per_axis) {
  const std::size_t n = q.dim();
  if (n > 3) throw Error(ErrorCode::dimension_too_large, "brute-force oracle supports dim <= 3");
  if (points_per_axis < 11) throw Error(ErrorCode::invalid_argument, "need at least 11 grid points per axis");
  require_same_dim(n, center.size(), "trust-region center");
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "radius must be positive");

  GridMinimum best;
  Vector x(n);
  auto consider = [&](std::span<const double> d) {
    for (std::size_t i = 0; i < n; ++i) x[i] = center[i] + d[i];
    const double v = evaluate(q, x);
    if (v < best.value) {
      best.value = v;
      best.point = x;
    }
  };

  const int k = points_per_axis;
  const double spacing = 2.0 * radius / (k - 1);
  const double r2 = radius * radius * (1.0 + 1e-12);
  std::vector<int> idx(n, 0);
  Vector d(n);
  for (;;) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = -radius + spacing * idx[i];
      sq += d[i] * d[i];
    }
    if (sq <= r2) consider(d);
    std::size_t i = 0;
    while (i < n && ++idx[i] == k) idx[i++] = 0;
    if (i == n) break;
  }

  const double pi = std::acos(-1.0);
  if (n == 1) {
    consider(Vector{radius});
    consider(Vector{-radius});
  } else if (n == 2) {
    const int samples = 8 * k;
    for (int s = 0; s < samples; ++s) {
      const double t = 2.0 * pi * s / samples;
      consider(Vector{radius * std::cos(t), radius * std::sin(t)});
    }
  } else {
    const int rings = 2 * k;
    for (int a = 0; a <= rings; ++a) {
      const double phi = pi * a / rings;
      for (int b = 0; b < 2 * rings; ++b) {
        const double theta = pi * b / rings;
        consider(Vector{radius * std::sin(phi) * std::cos(theta),
                        radius * std::sin(phi) * std::sin(theta), radius * std::cos(phi)});
      }
    }
  }
  return best;
}

}  // namespace trdist
