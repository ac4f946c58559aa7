#ifndef RSSKM_RSS_ESTIMATOR_HPP
#define RSSKM_RSS_ESTIMATOR_HPP

// Rank-wise estimation on balanced ranked set samples: the equal-weight
// average of within-rank Kaplan-Meier curves, its Greenwood plug-in, the
// pooled-risk-set Greenwood and the shrinkage blend between the two.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rsskm/error.hpp"
#include "rsskm/survival_core.hpp"

namespace rsskm {

/// Balanced k x m layout: m observations for each rank r = 1..k.
struct RankedSetSample {
  int set_size_k = 0;
  int cycles_m = 0;
  std::vector<CensoredObservation> observations;

  std::size_t size() const noexcept { return observations.size(); }
};

inline void validate_design(const RankedSetSample& sample) {
  if (sample.set_size_k < 1 || sample.cycles_m < 1) {
    throw EmptyDesignError("set size and cycle count must be >= 1");
  }
  std::vector<int> per_rank(static_cast<std::size_t>(sample.set_size_k), 0);
  for (const auto& o : sample.observations) {
    detail::validate(o);
    if (o.rank > sample.set_size_k || o.cycle > sample.cycles_m) {
      throw UnbalancedDesignError("observation (rank " + std::to_string(o.rank) + ", cycle " +
                                  std::to_string(o.cycle) + ") outside the " +
                                  std::to_string(sample.set_size_k) + "x" +
                                  std::to_string(sample.cycles_m) + " layout");
    }
    ++per_rank[static_cast<std::size_t>(o.rank - 1)];
  }
  for (std::size_t r = 0; r < per_rank.size(); ++r) {
    if (per_rank[r] != sample.cycles_m) {
      throw UnbalancedDesignError("rank " + std::to_string(r + 1) + " has " +
                                  std::to_string(per_rank[r]) + " observations, expected " +
                                  std::to_string(sample.cycles_m));
    }
  }
}

/// Observations of each rank, in input order. Index 0 holds rank 1.
inline std::vector<std::vector<CensoredObservation>> split_by_rank(const RankedSetSample& sample) {
  std::vector<std::vector<CensoredObservation>> ranks(static_cast<std::size_t>(sample.set_size_k));
  for (const auto& o : sample.observations) {
    ranks[static_cast<std::size_t>(o.rank - 1)].push_back(o);
  }
  return ranks;
}

struct RssSurvivalEstimate {
  int k = 0;
  std::vector<StepSurvivalCurve> rank_curves;
  std::vector<std::vector<double>> rank_times;  // sorted observed times per rank
  StepSurvivalCurve pooled_curve;                // ranks ignored

  // Values on the union of rank event times (right-continuous between).
  std::vector<double> grid;
  std::vector<double> rss_survival;
  std::vector<double> rss_greenwood;
  std::vector<double> rss_cum_hazard;
  std::vector<double> rss_hazard_var;
  std::vector<double> pooled_greenwood;
};

struct RssPoint {
  double survival = 1.0;
  double greenwood_var = 0.0;
  double cum_hazard = 0.0;
  double hazard_var = 0.0;
  double pooled_greenwood = 0.0;
  int degenerate_ranks = 0;
};

/// Pointwise rank average at t computed straight from the rank curves.
inline RssPoint rss_evaluate(const RssSurvivalEstimate& est, double t) {
  RssPoint p;
  double s = 0.0, gw = 0.0, ch = 0.0, hv = 0.0;
  for (const auto& curve : est.rank_curves) {
    const auto cp = evaluate(curve, t);
    s += cp.survival;
    gw += cp.greenwood_var;
    ch += cp.cum_hazard;
    hv += cp.hazard_var;
    if (cp.degenerate) ++p.degenerate_ranks;
  }
  const double k = static_cast<double>(est.k);
  p.survival = s / k;
  p.greenwood_var = gw / (k * k);
  p.cum_hazard = ch / k;
  p.hazard_var = hv / (k * k);
  p.pooled_greenwood = evaluate(est.pooled_curve, t).greenwood_var;
  return p;
}

/// Equal-weight RSS Kaplan-Meier (1/k) sum_r S_r. A rank without events
/// contributes the constant 1.
inline RssSurvivalEstimate rss_kaplan_meier(const RankedSetSample& sample) {
  validate_design(sample);
  RssSurvivalEstimate est;
  est.k = sample.set_size_k;
  const auto ranks = split_by_rank(sample);
  est.rank_curves.reserve(ranks.size());
  for (const auto& obs : ranks) {
    est.rank_curves.push_back(kaplan_meier(obs));
    std::vector<double> times;
    times.reserve(obs.size());
    for (const auto& o : obs) times.push_back(o.time);
    std::sort(times.begin(), times.end());
    est.rank_times.push_back(std::move(times));
  }
  est.pooled_curve = kaplan_meier(sample.observations);

  for (const auto& curve : est.rank_curves) {
    est.grid.insert(est.grid.end(), curve.jump_times.begin(), curve.jump_times.end());
  }
  std::sort(est.grid.begin(), est.grid.end());
  est.grid.erase(std::unique(est.grid.begin(), est.grid.end()), est.grid.end());

  for (double t : est.grid) {
    const auto p = rss_evaluate(est, t);
    est.rss_survival.push_back(p.survival);
    est.rss_greenwood.push_back(p.greenwood_var);
    est.rss_cum_hazard.push_back(p.cum_hazard);
    est.rss_hazard_var.push_back(p.hazard_var);
    est.pooled_greenwood.push_back(p.pooled_greenwood);
  }
  return est;
}

/// (1/k^2) sum_r Greenwood_r(t).
inline double rss_greenwood(const RssSurvivalEstimate& est, double t) {
  return rss_evaluate(est, t).greenwood_var;
}

/// Greenwood variance at t of the KM computed on all observations with the
/// rank labels discarded.
inline double pooled_greenwood(const RankedSetSample& sample, double t) {
  validate_design(sample);
  return evaluate(kaplan_meier(sample.observations), t).greenwood_var;
}

/// Smallest within-rank risk set #{Y >= t} over ranks.
inline std::size_t min_at_risk(const RssSurvivalEstimate& est, double t) {
  std::size_t best = static_cast<std::size_t>(-1);
  for (const auto& times : est.rank_times) {
    const auto at_risk = static_cast<std::size_t>(
        times.end() - std::lower_bound(times.begin(), times.end(), t));
    best = std::min(best, at_risk);
  }
  return est.rank_times.empty() ? 0 : best;
}

/// Blend toward the pooled variance once some rank's risk set is thin.
/// Returns rank_avg_var when min_at_risk >= threshold, otherwise
/// (1 - weight) * rank_avg_var + weight * pooled_var.
inline double shrunk_variance(double rank_avg_var, double pooled_var, std::size_t min_at_risk,
                              std::size_t threshold, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw ParameterError("shrinkage weight must lie in [0, 1], got " + std::to_string(weight));
  }
  if (rank_avg_var < 0.0 || pooled_var < 0.0) {
    throw ParameterError("variances must be nonnegative");
  }
  if (min_at_risk >= threshold) return rank_avg_var;
  return (1.0 - weight) * rank_avg_var + weight * pooled_var;
}

/// Step schedule for the shrinkage weight. The defaults are placeholders:
/// the weight only needs to be "modest" and to switch on when risk sets thin.
struct ShrinkageOptions {
  std::size_t threshold = 5;
  double weight = 0.5;
};

inline double shrunk_greenwood(const RssSurvivalEstimate& est, double t,
                               const ShrinkageOptions& opts = {}) {
  const auto p = rss_evaluate(est, t);
  return shrunk_variance(p.greenwood_var, p.pooled_greenwood, min_at_risk(est, t), opts.threshold,
                         opts.weight);
}

} // namespace rsskm

#endif // RSSKM_RSS_ESTIMATOR_HPP
