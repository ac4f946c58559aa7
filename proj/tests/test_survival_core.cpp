#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rsskm/moments.hpp"
#include "rsskm/rng.hpp"
#include "rsskm/survival_core.hpp"

using namespace rsskm;

namespace {

CensoredObservation evt(double t) { return {t, true}; }
CensoredObservation cens(double t) { return {t, false}; }

std::vector<CensoredObservation> exp_sample(Rng& rng, int n, double cens_rate) {
  std::vector<CensoredObservation> obs;
  for (int i = 0; i < n; ++i) {
    const double x = rng.exponential();
    const double c = cens_rate > 0 ? rng.exponential() / cens_rate
                                   : std::numeric_limits<double>::infinity();
    obs.push_back({std::min(x, c), x <= c});
  }
  return obs;
}

} // namespace

// ---------------------------------------------------------------------------
// Nelson-Aalen

TEST(NelsonAalen, SingleDeath) {
  const std::vector obs{evt(1.0)};
  const auto c = nelson_aalen(obs);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.cum_hazard[0], 1.0);
  EXPECT_EQ(c.hazard_var[0], 1.0);
}

TEST(NelsonAalen, NoEventsMeansNoJumps) {
  const std::vector obs{cens(1.0), cens(2.0)};
  const auto c = nelson_aalen(obs);
  EXPECT_EQ(c.size(), 0u);
  EXPECT_EQ(evaluate(c, 5.0).cum_hazard, 0.0);
  EXPECT_EQ(evaluate(c, 5.0).survival, 1.0);
}

TEST(NelsonAalen, HandEvaluatedSums) {
  const std::vector obs{evt(1), cens(2), evt(3)};
  const auto p = evaluate(nelson_aalen(obs), 3.0);
  EXPECT_DOUBLE_EQ(p.cum_hazard, 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.hazard_var, 10.0 / 9.0);
}

TEST(NelsonAalen, EmptySampleThrows) {
  const std::vector<CensoredObservation> none;
  EXPECT_THROW(nelson_aalen(none), EmptySampleError);
  EXPECT_THROW(kaplan_meier(none), EmptySampleError);
}

TEST(NelsonAalen, InvalidObservationsThrow) {
  for (double bad : {-1.0, std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::infinity()}) {
    const std::vector obs{evt(1.0), evt(bad)};
    EXPECT_THROW(kaplan_meier(obs), InvalidObservationError) << bad;
  }
}

// ---------------------------------------------------------------------------
// Kaplan-Meier

TEST(KaplanMeier, SingleDeathStep) {
  const std::vector obs{evt(1.0)};
  const auto c = kaplan_meier(obs);
  EXPECT_EQ(evaluate(c, 0.999).survival, 1.0);
  EXPECT_EQ(evaluate(c, 1.0).survival, 0.0);
  EXPECT_EQ(evaluate(c, 7.0).survival, 0.0);
}

TEST(KaplanMeier, HandProductLimit) {
  const std::vector obs{evt(1), cens(2), evt(3)};
  const auto c = kaplan_meier(obs);
  EXPECT_DOUBLE_EQ(evaluate(c, 1.0).survival, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(evaluate(c, 1.0).greenwood_var, 2.0 / 27.0);
  EXPECT_EQ(evaluate(c, 3.0).survival, 0.0);
  EXPECT_TRUE(c.degenerate_tail);
}

TEST(KaplanMeier, EvaluateBeforeFirstJump) {
  const std::vector obs{evt(1.0)};
  const auto p = evaluate(kaplan_meier(obs), 0.5);
  EXPECT_EQ(p.survival, 1.0);
  EXPECT_EQ(p.greenwood_var, 0.0);
  EXPECT_FALSE(p.degenerate);
}

TEST(KaplanMeier, EvaluateAtDegenerateTail) {
  const std::vector obs{evt(1.0)};
  const auto p = evaluate(kaplan_meier(obs), 1.0);
  EXPECT_EQ(p.survival, 0.0);
  EXPECT_EQ(p.greenwood_var, 0.0);
  EXPECT_TRUE(p.degenerate);
}

TEST(KaplanMeier, StepConstancyBetweenJumps) {
  const std::vector obs{evt(1), cens(2), evt(3)};
  const auto p = evaluate(kaplan_meier(obs), 2.5);
  EXPECT_DOUBLE_EQ(p.survival, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.greenwood_var, 2.0 / 27.0);
  EXPECT_FALSE(p.degenerate);
}

TEST(KaplanMeier, ExtrapolationFlag) {
  const std::vector obs{evt(1), cens(2)};
  const auto c = kaplan_meier(obs);
  EXPECT_FALSE(evaluate(c, 2.0).extrapolated);
  EXPECT_TRUE(evaluate(c, 2.1).extrapolated);
  EXPECT_DOUBLE_EQ(evaluate(c, 2.1).survival, 0.5);
}

TEST(KaplanMeier, DeathsBeforeCensoringsAtSameTime) {
  // R(1) = 3 includes the unit censored at 1.
  const std::vector obs{evt(1), cens(1), evt(2)};
  const auto c = kaplan_meier(obs);
  EXPECT_DOUBLE_EQ(evaluate(c, 1.0).survival, 2.0 / 3.0);
  EXPECT_EQ(c.at_risk[0], 3.0);
}

TEST(KaplanMeier, NegativeTimeRejected) {
  const std::vector obs{evt(-0.5)};
  EXPECT_THROW(kaplan_meier(obs), InvalidObservationError);
}

// Brute force over every uncensored sample of size n <= 6 drawn from a small
// alphabet of times (with ties): KM is the empirical survival and Greenwood is
// S(1 - S)/n at every event time, both exactly.
TEST(KaplanMeier, NoCensoringCollapseBruteForce) {
  const double alphabet[] = {0.5, 1.0, 1.5};
  for (int n = 1; n <= 6; ++n) {
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 3;
    for (int code = 0; code < combos; ++code) {
      std::vector<CensoredObservation> obs;
      for (int i = 0, c = code; i < n; ++i, c /= 3) obs.push_back(evt(alphabet[c % 3]));
      const auto curve = kaplan_meier(obs);
      for (std::size_t j = 0; j < curve.size(); ++j) {
        const double t = curve.jump_times[j];
        const auto beyond = std::count_if(obs.begin(), obs.end(),
                                          [&](const auto& o) { return o.time > t; });
        const double s = static_cast<double>(beyond) / n;
        EXPECT_EQ(curve.survival[j], s) << "n=" << n << " code=" << code;
        if (s > 0.0) {
          EXPECT_NEAR(curve.greenwood_var[j], s * (1 - s) / n, 1e-15);
        }
      }
    }
  }
}

TEST(KaplanMeier, NoCensoringEqualsEmpiricalSurvivalOnContinuousData) {
  Rng rng(RngStream{11, 0});
  const auto obs = exp_sample(rng, 400, 0.0);
  const auto curve = kaplan_meier(obs);
  for (std::size_t j = 0; j < curve.size(); ++j) {
    const double t = curve.jump_times[j];
    const auto beyond =
        std::count_if(obs.begin(), obs.end(), [&](const auto& o) { return o.time > t; });
    EXPECT_EQ(curve.survival[j], static_cast<double>(beyond) / 400.0);
  }
}

// ---------------------------------------------------------------------------
// Properties

TEST(KaplanMeierProperty, MonotoneCurves) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(RngStream{seed, 3});
    auto obs = exp_sample(rng, 60, 0.7);
    // quantize to force ties between deaths and censorings
    for (auto& o : obs) o.time = std::round(o.time * 10) / 10;
    const auto c = kaplan_meier(obs);
    for (std::size_t j = 1; j < c.size(); ++j) {
      EXPECT_LE(c.survival[j], c.survival[j - 1]);
      EXPECT_GE(c.cum_hazard[j], c.cum_hazard[j - 1]);
      EXPECT_GE(c.greenwood_var[j], 0.0);
    }
    for (double s : c.survival) {
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

TEST(KaplanMeierProperty, LogLinearizationBound) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(RngStream{seed, 4});
    const auto obs = exp_sample(rng, 300, 0.5);
    const auto c = kaplan_meier(obs);
    // restrict to the part of the curve with R >= 10 and dN/R <= 0.1
    double bound = 0.0, worst = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c.at_risk[j] < 10 || c.deaths[j] / c.at_risk[j] > 0.1) break;
      const double q = c.deaths[j] / c.at_risk[j];
      bound += q * q;
      worst = std::max(worst, std::abs(std::log(c.survival[j]) + c.cum_hazard[j]));
    }
    EXPECT_LE(worst, bound) << "seed " << seed;
    ++checked;
  }
  EXPECT_EQ(checked, 40);
}

TEST(KaplanMeierProperty, TieAwareness) {
  // Two deaths recorded as separate rows give exactly the dN = 2 result.
  const std::vector split{evt(1), evt(2), evt(2), cens(2.5), evt(3), cens(4)};
  const auto c = kaplan_meier(split);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.deaths[1], 2.0);
  EXPECT_EQ(c.at_risk[1], 5.0);
  const double s1 = 5.0 / 6.0, s2 = s1 * 3.0 / 5.0;
  EXPECT_DOUBLE_EQ(c.survival[1], s2);
  EXPECT_DOUBLE_EQ(c.greenwood_var[1], s2 * s2 * (1.0 / (6 * 5) + 2.0 / (5 * 3)));
  EXPECT_DOUBLE_EQ(c.cum_hazard[1], 1.0 / 6 + 2.0 / 5);
  EXPECT_DOUBLE_EQ(c.hazard_var[1], 1.0 / 36 + 2.0 / 25);

  // Order of input rows never matters.
  auto shuffled = split;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto d = kaplan_meier(shuffled);
  EXPECT_EQ(c.survival, d.survival);
  EXPECT_EQ(c.greenwood_var, d.greenwood_var);
}

TEST(KaplanMeierProperty, GreenwoodMatchesMonteCarloVariance) {
  // n = 200, Exp(1) lifetimes, censoring rate 3/7 gives 30% censoring.
  const int reps = 5000;
  const double median = std::log(2.0);
  std::vector<double> s(reps), gw(reps);
  for (int b = 0; b < reps; ++b) {
    Rng rng(RngStream{2024, static_cast<std::uint64_t>(b)});
    const auto obs = exp_sample(rng, 200, 3.0 / 7.0);
    const auto p = evaluate(kaplan_meier(obs), median);
    s[b] = p.survival;
    gw[b] = p.greenwood_var;
  }
  const double v_mc = sample_variance(s);
  const double gw_mean = mean(gw);
  EXPECT_NEAR(gw_mean / v_mc, 1.0, 0.10) << "gw=" << gw_mean << " mc=" << v_mc;
}
