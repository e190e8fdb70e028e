#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "trdist/prob.hpp"

using namespace trdist;

namespace {

const ProbScenario kExample2 = ProbScenario::example2();

}  // namespace

TEST(ContractionEvent, InfeasibleShiftIsNonEvent) {
  for (double w2t : {0.0, 0.5, 3.0, 100.0}) {
    for (double eps : {0.0, 0.5, 1.0}) EXPECT_FALSE(contraction_event(kExample2, 1.0, w2t, eps));
  }
}

TEST(ContractionEvent, HandArithmetic) {
  // |1 + 3(-1)/1 - 3(-2)/1| = 4
  EXPECT_DOUBLE_EQ(contraction_factor(kExample2, 3.0, 2.0, ShiftDomain::positive_shifts), 4.0);
  EXPECT_FALSE(contraction_event(kExample2, 3.0, 2.0, 1.5));
  EXPECT_TRUE(contraction_event(kExample2, 3.0, 2.0, 4.0));
}

TEST(ContractionEvent, LargeShiftLimit) {
  const double factor = contraction_factor(kExample2, 1e6, 1e6, ShiftDomain::positive_shifts);
  // 1 + 3/G + ... approaches 1 from above.
  EXPECT_NEAR(factor, 1.0, 1e-5);
  EXPECT_GT(factor, 1.0);
  EXPECT_FALSE(contraction_event(kExample2, 1e6, 1e6, 1.0));
  EXPECT_TRUE(contraction_event(kExample2, 1e6, 1e6, 1.0 + 1e-5));
}

TEST(ContractionEvent, DomainControlsNegativeShifts) {
  // H = -1.8, G = -0.8: outside the positive-shift domain, defined otherwise.
  EXPECT_TRUE(std::isinf(contraction_factor(kExample2, 0.2, 0.2, ShiftDomain::positive_shifts)));
  const double f = contraction_factor(kExample2, 0.2, 0.2, ShiftDomain::whole_rectangle);
  EXPECT_NEAR(f, std::abs(1.0 - 3.0 / -0.8 + 6.0 / -1.8), 1e-15);
  // Zero shifted curvature is excluded in both domains.
  EXPECT_TRUE(std::isinf(contraction_factor(kExample2, 2.0, 0.5, ShiftDomain::whole_rectangle)));
}

TEST(Scenario, Validation) {
  EXPECT_NO_THROW(validate(kExample2));
  ProbScenario convex = kExample2;
  convex.hess_f = 0.5;
  EXPECT_THROW(validate(convex), Error);
  ProbScenario bad = kExample2;
  bad.omega1 = 0.0;
  EXPECT_THROW(validate(bad), Error);
}

// Reference fractions from an independent NumPy evaluation of the same
// 1024 x 1024 midpoint grid.
TEST(ProbGrid, MatchesIndependentReference) {
  struct Row {
    double m, eps, whole, positive;
  };
  const Row rows[] = {
      {0.1, 1.0, 0.25, 0.0},
      {0.1, 0.5, 0.0007715225219726562, 0.0},
      {0.1, 0.9, 0.164031982421875, 0.0},
      {1.0, 1.0, 0.038138389587402344, 0.00495147705078125},
      {1.0, 0.5, 0.0185546875, 0.002452850341796875},
      {10.0, 0.5, 0.04676342010498047, 0.046600341796875},
      {10.0, 1.0, 0.18312358856201172, 0.18279170989990234},
      {1000.0, 1.0, 0.2490243911743164, 0.2490243911743164},
  };
  for (const auto& r : rows) {
    EXPECT_NEAR(prob_grid(kExample2, r.m, r.eps, 1024, ShiftDomain::whole_rectangle), r.whole, 1e-5)
        << "m=" << r.m << " eps=" << r.eps;
    EXPECT_NEAR(prob_grid(kExample2, r.m, r.eps, 1024, ShiftDomain::positive_shifts), r.positive, 1e-5)
        << "m=" << r.m << " eps=" << r.eps;
  }
}

TEST(ProbGrid, ZeroEpsilonHasMeasureZero) {
  EXPECT_LT(prob_grid(kExample2, 0.1, 0.0, 4096), 1e-3);
  EXPECT_LT(prob_grid(kExample2, 10.0, 0.0, 1024), 1e-3);
}

TEST(ProbGrid, InfeasibleRectangleUnderAssumption) {
  // m w1 < -hess_f for m < 2/3.
  EXPECT_EQ(prob_grid(kExample2, 0.6, 1.0, 128, ShiftDomain::positive_shifts), 0.0);
  EXPECT_THROW(prob_grid(kExample2, 0.6, 1.0, 32), Error);
  EXPECT_THROW(prob_grid(kExample2, -1.0, 1.0, 128), Error);
}

TEST(ProbGrid, MonotoneInEpsilon) {
  for (double m : {0.1, 1.0, 10.0}) {
    double prev = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double p = prob_grid(kExample2, m, i / 20.0, 128);
      EXPECT_GE(p, prev);
      prev = p;
    }
  }
}

TEST(ProbMc, DeterministicAndAgreesWithGrid) {
  const auto a = prob_mc(kExample2, 0.1, 1.0, 100000, 99);
  const auto b = prob_mc(kExample2, 0.1, 1.0, 100000, 99);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NEAR(a.std_error, std::sqrt(a.estimate * (1 - a.estimate) / 100000), 1e-15);

  for (double eps : {0.5, 0.9, 1.0}) {
    const double grid = prob_grid(kExample2, 0.1, eps, 1024);
    const auto mc = prob_mc(kExample2, 0.1, eps, 200000, 7);
    EXPECT_LE(std::abs(grid - mc.estimate), 3.0 * mc.std_error + 2.0 / 1024) << "eps=" << eps;
  }

  const auto zero = prob_mc(kExample2, 0.1, 0.0, 10000, 1);
  EXPECT_EQ(zero.estimate, 0.0);
  EXPECT_EQ(zero.std_error, 0.0);
  EXPECT_THROW(prob_mc(kExample2, 0.1, 0.5, 100, 1), Error);
}

TEST(Sweep, ShapesAndOrdering) {
  const Vector ms{1e3, 1e-1, 10.0};
  const Vector eps = uniform_epsilon_grid(101);
  const auto curves = sweep(kExample2, ms, eps, {ProbMethod::grid, 256});
  ASSERT_EQ(curves.size(), 3u);
  EXPECT_EQ(curves[0].m, 1e-1);
  EXPECT_EQ(curves[2].m, 1e3);
  for (const auto& c : curves) {
    ASSERT_EQ(c.probs.size(), 101u);
    EXPECT_TRUE(std::is_sorted(c.probs.begin(), c.probs.end()));
    for (double s : c.std_errors) EXPECT_EQ(s, 0.0);
  }
  // The m = 10 curve peaks well below the m = 0.1 curve.
  EXPECT_LT(curves[1].probs.back(), curves[0].probs.back() - 0.05);

  EXPECT_TRUE(sweep(kExample2, Vector{}, eps).empty());
  EXPECT_THROW(sweep(kExample2, ms, Vector{0.5, 0.2}), Error);
  EXPECT_THROW(sweep(kExample2, ms, Vector{0.5, 1.2}), Error);
}

TEST(Sweep, PointwiseMatchesSingleEstimates) {
  const Vector eps{0.0, 0.3, 0.95, 1.0};
  const auto grid = sweep(kExample2, Vector{1.0}, eps, {ProbMethod::grid, 128});
  SweepOptions mc_opt;
  mc_opt.method = ProbMethod::monte_carlo;
  mc_opt.samples = 20000;
  mc_opt.seed = 5;
  const auto mc = sweep(kExample2, Vector{1.0}, eps, mc_opt);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    EXPECT_EQ(grid[0].probs[i], prob_grid(kExample2, 1.0, eps[i], 128));
    const auto single = prob_mc(kExample2, 1.0, eps[i], 20000, 5);
    EXPECT_EQ(mc[0].probs[i], single.estimate);
    EXPECT_EQ(mc[0].std_errors[i], single.std_error);
  }
}

// The published two-bound form matches the predicate on the sign pattern it
// was derived under (first denominator positive, second negative).
TEST(BoolePair, ExactOnItsValidityRegion) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 50000; ++trial) {
    const double m = std::pow(10.0, -3.0 + 6.0 * u(rng));
    const double w2 = u(rng) * m * kExample2.omega1;
    const double w2t = u(rng) * m * kExample2.omega1_t;
    const double eps = u(rng);
    const auto den = boole_denominators(kExample2, w2, eps);
    const double H = kExample2.hess_f + w2;
    const double G = kExample2.hess_q + w2t;
    if (H == 0.0 || G == 0.0 || !(den.plus > 0.0 && den.minus < 0.0)) continue;
    ++checked;
    EXPECT_EQ(boole_pair_event(kExample2, w2, w2t, eps),
              contraction_event(kExample2, w2, w2t, eps, ShiftDomain::whole_rectangle));
  }
  EXPECT_GT(checked, 40000);
}

TEST(BoolePair, ReversedWhenBothDenominatorsPositive) {
  // kappa > 0 with (1 - eps) H < kappa w1 < (1 + eps) H.
  const ProbScenario s{-1.0, -1.0, 1.0, 1.0, 1.0};
  const double eps = 0.5;
  const double w2 = 2.0;  // H = 1
  const auto den = boole_denominators(s, w2, eps);
  ASSERT_GT(den.plus, 0.0);
  ASSERT_GT(den.minus, 0.0);
  // G = 1: factor |1 + 2 - 1| = 2 > eps, yet the pair accepts.
  EXPECT_FALSE(contraction_event(s, w2, 2.0, eps));
  EXPECT_TRUE(boole_pair_event(s, w2, 2.0, eps));
  // G = 10: factor 0.2 <= eps, yet the pair rejects.
  EXPECT_TRUE(contraction_event(s, w2, 11.0, eps));
  EXPECT_FALSE(boole_pair_event(s, w2, 11.0, eps));
}
