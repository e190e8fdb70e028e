#pragma once

// Probability that a random pair of second-step multipliers (omega2,
// omega2_t), uniform on [0, m omega1] x [0, m omega1_t], makes a 1-D model
// pair contract by eps. Estimated by midpoint-rule quadrature and by Monte
// Carlo.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trdist/error.hpp"
#include "trdist/quadratic.hpp"

namespace trdist {

struct ProbScenario {
  double hess_f = -2.0;
  double hess_q = -1.0;
  double omega1 = 3.0;
  double omega1_t = 3.0;
  double kappa = -2.0;

  /// Constants of the worked probability example.
  static ProbScenario example2() { return {}; }

  friend bool operator==(const ProbScenario&, const ProbScenario&) = default;
};

inline void validate(const ProbScenario& s) {
  for (double v : {s.hess_f, s.hess_q, s.omega1, s.omega1_t, s.kappa}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite_input, "scenario has a non-finite constant");
  }
  if (!(s.hess_f < 0.0) || !(s.hess_q < 0.0)) {
    throw Error(ErrorCode::not_nonconvex, "scenario curvatures must both be negative");
  }
  if (!(s.omega1 > 0.0) || !(s.omega1_t > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "scenario first-step multipliers must be positive");
  }
}

/// Which part of the multiplier rectangle can host the event.
enum class ShiftDomain {
  /// Only points with both shifted curvatures positive (the standing
  /// assumption of the analysis); the rest of the rectangle counts as
  /// non-events.
  positive_shifts,
  /// The contraction predicate is evaluated wherever it is defined (G, H
  /// nonzero), as in the published probability curve.
  whole_rectangle,
};

enum class ProbMethod { grid, monte_carlo };

inline std::string_view to_string(ProbMethod m) {
  return m == ProbMethod::grid ? "grid" : "monte_carlo";
}

inline std::string_view to_string(ShiftDomain d) {
  return d == ShiftDomain::positive_shifts ? "positive_shifts" : "whole_rectangle";
}

struct ProbCurve {
  double m = 0.0;
  Vector epsilons;
  Vector probs;
  Vector std_errors;  // zero for quadrature
  ProbMethod method = ProbMethod::grid;
};

/// Realized contraction factor |1 + w1t(1+k)/G - w1 k/H| at (omega2,
/// omega2_t), or +inf where the point is excluded by `domain`.
inline double contraction_factor(const ProbScenario& s, double omega2, double omega2_t,
                                 ShiftDomain domain) {
  const double H = s.hess_f + omega2;
  const double G = s.hess_q + omega2_t;
  constexpr double excluded = std::numeric_limits<double>::infinity();
  if (domain == ShiftDomain::positive_shifts) {
    if (!(H > 0.0) || !(G > 0.0)) return excluded;
  } else if (H == 0.0 || G == 0.0) {
    return excluded;
  }
  const double value = std::abs(1.0 + s.omega1_t * (1.0 + s.kappa) / G - s.omega1 * s.kappa / H);
  return std::isnan(value) ? excluded : value;
}

inline bool contraction_event(const ProbScenario& s, double omega2, double omega2_t, double epsilon,
                              ShiftDomain domain = ShiftDomain::positive_shifts) {
  return contraction_factor(s, omega2, omega2_t, domain) <= epsilon;
}

struct BooleDenominators {
  double plus = 0.0;   // (eps + 1) H - kappa omega1
  double minus = 0.0;  // (eps - 1) H + kappa omega1
};

inline BooleDenominators boole_denominators(const ProbScenario& s, double omega2, double epsilon) {
  const double H = s.hess_f + omega2;
  return {(epsilon + 1.0) * H - s.kappa * s.omega1, (epsilon - 1.0) * H + s.kappa * s.omega1};
}

/// The published rearrangement of the event as two one-sided bounds on G:
///
///   G >= -(k+1) w1t H / ((eps+1) H - k w1)
///   G <=  (k+1) w1t H / ((eps-1) H + k w1)
///
/// Clearing the denominators assumes the first is positive and the second
/// negative; outside that sign pattern this does not describe the event.
inline bool boole_pair_event(const ProbScenario& s, double omega2, double omega2_t, double epsilon) {
  const double H = s.hess_f + omega2;
  const double G = s.hess_q + omega2_t;
  const auto den = boole_denominators(s, omega2, epsilon);
  const double num = (s.kappa + 1.0) * s.omega1_t * H;
  return G >= -num / den.plus && G <= num / den.minus;
}

inline Vector uniform_epsilon_grid(std::size_t points) {
  if (points < 2) throw Error(ErrorCode::invalid_argument, "epsilon grid needs at least 2 points");
  Vector eps(points);
  for (std::size_t i = 0; i < points; ++i) eps[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  eps.back() = 1.0;
  return eps;
}

namespace detail {

inline void require_scale(double m) {
  if (!std::isfinite(m) || !(m > 0.0)) throw Error(ErrorCode::invalid_argument, "region scale m must be positive");
}

/// Contraction factor at every cell midpoint of a cells x cells grid.
inline Vector grid_factors(const ProbScenario& s, double m, int cells, ShiftDomain domain) {
  if (cells < 64) throw Error(ErrorCode::invalid_argument, "grid needs at least 64 cells per axis");
  const double w2_len = m * s.omega1;
  const double w2t_len = m * s.omega1_t;
  const auto n = static_cast<std::size_t>(cells);
  Vector w2t(n);
  for (std::size_t j = 0; j < n; ++j) w2t[j] = (static_cast<double>(j) + 0.5) / cells * w2t_len;
  Vector out;
  out.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w2 = (static_cast<double>(i) + 0.5) / cells * w2_len;
    for (std::size_t j = 0; j < n; ++j) out.push_back(contraction_factor(s, w2, w2t[j], domain));
  }
  return out;
}

inline Vector sampled_factors(const ProbScenario& s, double m, std::size_t samples, std::uint64_t seed,
                              ShiftDomain domain) {
  if (samples < 10000) throw Error(ErrorCode::invalid_argument, "Monte Carlo needs at least 1e4 samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector out(samples);
  for (auto& v : out) {
    const double w2 = unit(rng) * m * s.omega1;
    const double w2t = unit(rng) * m * s.omega1_t;
    v = contraction_factor(s, w2, w2t, domain);
  }
  return out;
}

inline std::size_t count_at_most(std::span<const double> sorted, double epsilon) {
  return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), epsilon) - sorted.begin());
}

inline double binomial_stderr(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

}  // namespace detail

/// Fraction of midpoint cells of [0, m w1] x [0, m w1t] where the event holds.
inline double prob_grid(const ProbScenario& s, double m, double epsilon, int cells_per_axis,
                        ShiftDomain domain = ShiftDomain::whole_rectangle) {
  validate(s);
  detail::require_scale(m);
  const Vector f = detail::grid_factors(s, m, cells_per_axis, domain);
  const auto hits = std::count_if(f.begin(), f.end(), [&](double v) { return v <= epsilon; });
  return static_cast<double>(hits) / static_cast<double>(f.size());
}

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Uniform sampling over the same rectangle; deterministic for a fixed seed.
inline McEstimate prob_mc(const ProbScenario& s, double m, double epsilon, std::size_t samples,
                          std::uint64_t seed, ShiftDomain domain = ShiftDomain::whole_rectangle) {
  validate(s);
  detail::require_scale(m);
  const Vector f = detail::sampled_factors(s, m, samples, seed, domain);
  const auto hits = std::count_if(f.begin(), f.end(), [&](double v) { return v <= epsilon; });
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, detail::binomial_stderr(p, samples)};
}

struct SweepOptions {
  ProbMethod method = ProbMethod::grid;
  int cells_per_axis = 1024;
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 20240101;
  ShiftDomain domain = ShiftDomain::whole_rectangle;
};

/// One curve per m. The same cells (or samples) are reused across the eps
/// grid, so each curve is monotone in eps by construction.
inline std::vector<ProbCurve> sweep(const ProbScenario& s, std::span<const double> m_list,
                                    std::span<const double> epsilon_grid, const SweepOptions& opt = {}) {
  validate(s);
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    const double e = epsilon_grid[i];
    if (!(e >= 0.0 && e <= 1.0)) throw Error(ErrorCode::invalid_argument, "epsilon grid must lie in [0, 1]");
    if (i > 0 && e < epsilon_grid[i - 1]) throw Error(ErrorCode::invalid_argument, "epsilon grid must be ascending");
  }

  std::vector<ProbCurve> curves;
  curves.reserve(m_list.size());
  for (double m : m_list) {
    detail::require_scale(m);
    Vector factors = opt.method == ProbMethod::grid
                         ? detail::grid_factors(s, m, opt.cells_per_axis, opt.domain)
                         : detail::sampled_factors(s, m, opt.samples, opt.seed, opt.domain);
    std::sort(factors.begin(), factors.end());

    ProbCurve c;
    c.m = m;
    c.method = opt.method;
    c.epsilons.assign(epsilon_grid.begin(), epsilon_grid.end());
    for (double e : epsilon_grid) {
      const double p = static_cast<double>(detail::count_at_most(factors, e)) / static_cast<double>(factors.size());
      c.probs.push_back(p);
      c.std_errors.push_back(opt.method == ProbMethod::grid ? 0.0 : detail::binomial_stderr(p, factors.size()));
    }
    curves.push_back(std::move(c));
  }
  std::stable_sort(curves.begin(), curves.end(), [](const ProbCurve& a, const ProbCurve& b) { return a.m < b.m; });
  return curves;
}

}  // namespace trdist
