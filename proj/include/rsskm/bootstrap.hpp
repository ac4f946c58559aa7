#ifndef RSSKM_BOOTSTRAP_HPP
#define RSSKM_BOOTSTRAP_HPP

// Rank-wise multiplier (perturbation) bootstrap for the RSS Kaplan-Meier:
// every unit keeps its data and receives a random nonnegative weight with
// mean one; weighted counting and risk processes give a weighted KM per rank.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rsskm/error.hpp"
#include "rsskm/moments.hpp"
#include "rsskm/parallel.hpp"
#include "rsskm/rng.hpp"
#include "rsskm/rss_estimator.hpp"

namespace rsskm {

enum class MultiplierKind { unit_exponential, gamma, degenerate_one };

/// Weight law. All kinds have mean 1. Exp(1) has variance 1,
/// gamma(shape s, scale 1/s) has variance 1/s, degenerate_one has variance 0
/// and exists for testing.
struct MultiplierLaw {
  MultiplierKind kind = MultiplierKind::unit_exponential;
  double gamma_shape = 1.0;

  static MultiplierLaw unit_exponential() { return {}; }
  static MultiplierLaw gamma(double shape) {
    if (!(shape > 0.0)) throw ParameterError("gamma multiplier shape must be positive");
    return {MultiplierKind::gamma, shape};
  }
  static MultiplierLaw degenerate_one() { return {MultiplierKind::degenerate_one, 1.0}; }

  double draw(Rng& rng) const {
    switch (kind) {
      case MultiplierKind::unit_exponential: return rng.exponential();
      case MultiplierKind::gamma: return rng.gamma(gamma_shape) / gamma_shape;
      case MultiplierKind::degenerate_one: return 1.0;
    }
    return 1.0;
  }
};

struct BootstrapResult {
  std::vector<double> t_grid;
  std::vector<double> point_estimate;
  std::vector<double> greenwood_var;
  std::vector<double> bootstrap_var;
  std::vector<std::size_t> n_excluded;
  /// replicates[b][i]: weighted RSS KM of replicate b at t_grid[i]; NaN when
  /// that replicate was excluded at that time.
  std::vector<std::vector<double>> replicates;
};

namespace detail {

/// One rank's records sorted by time plus the slot each record's weight is
/// read from (weights are drawn in (rank, cycle) order).
struct RankRecords {
  std::vector<WeightedRecord> records;
  std::vector<std::size_t> weight_slot;
};

/// Weighted KM of one rank evaluated on `grid`; entries at or after the first
/// event time whose weighted risk set is zero are set to NaN.
inline void weighted_rank_curve(std::span<const WeightedRecord> recs, std::size_t m,
                                std::span<const double> grid, std::span<double> out) {
  const auto curve = product_limit(recs, m);
  double zero_risk_from = std::numeric_limits<double>::infinity();
  double suffix = 0.0;
  for (std::size_t i = recs.size(); i-- > 0;) {
    suffix += recs[i].weight;
    // risk set of a time is the suffix sum starting at its first record
    if (recs[i].event && suffix == 0.0 && (i == 0 || recs[i - 1].time != recs[i].time)) {
      zero_risk_from = recs[i].time;
    }
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    out[g] = grid[g] >= zero_risk_from ? std::numeric_limits<double>::quiet_NaN()
                                       : evaluate(curve, grid[g]).survival;
  }
}

} // namespace detail

/// Weighted KM of every rank under the given weights, averaged over ranks.
/// `weights[r-1][j-1]` multiplies the unit at rank r, cycle j.
inline std::vector<double> weighted_rss_km(const RankedSetSample& sample,
                                           const std::vector<std::vector<double>>& weights,
                                           std::span<const double> t_grid) {
  validate_design(sample);
  const auto ranks = split_by_rank(sample);
  std::vector<double> avg(t_grid.size(), 0.0), rank_vals(t_grid.size());
  for (std::size_t r = 0; r < ranks.size(); ++r) {
    std::vector<detail::WeightedRecord> recs;
    for (const auto& o : ranks[r]) {
      const double w = weights.at(r).at(static_cast<std::size_t>(o.cycle - 1));
      if (!(w >= 0.0)) throw ParameterError("multiplier weights must be nonnegative");
      recs.push_back({o.time, o.event, w});
    }
    std::stable_sort(recs.begin(), recs.end(),
                     [](const detail::WeightedRecord& a, const detail::WeightedRecord& b) { return a.time < b.time; });
    detail::weighted_rank_curve(recs, recs.size(), t_grid, rank_vals);
    for (std::size_t i = 0; i < t_grid.size(); ++i) avg[i] += rank_vals[i];
  }
  for (auto& v : avg) v /= static_cast<double>(sample.set_size_k);
  return avg;
}

/// Multiplier bootstrap of the RSS KM on `t_grid`. Replicate b uses
/// stream.substream(b), so results do not depend on `jobs`.
inline BootstrapResult multiplier_bootstrap(const RankedSetSample& sample,
                                            const std::vector<double>& t_grid, std::size_t n_reps,
                                            const MultiplierLaw& law, const RngStream& stream,
                                            unsigned jobs = 1) {
  if (t_grid.empty()) throw ParameterError("bootstrap time grid is empty");
  if (n_reps < 2) throw ParameterError("bootstrap needs at least 2 replicates");
  validate_design(sample);
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw ParameterError("bootstrap times must be nonnegative");
  }

  const auto k = static_cast<std::size_t>(sample.set_size_k);
  const auto m = static_cast<std::size_t>(sample.cycles_m);

  std::vector<detail::RankRecords> ranks(k);
  for (const auto& o : sample.observations) {
    auto& rr = ranks[static_cast<std::size_t>(o.rank - 1)];
    rr.records.push_back({o.time, o.event, 1.0});
    rr.weight_slot.push_back(static_cast<std::size_t>(o.rank - 1) * m +
                             static_cast<std::size_t>(o.cycle - 1));
  }
  for (auto& rr : ranks) {
    std::vector<std::size_t> idx(rr.records.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return rr.records[a].time < rr.records[b].time;
    });
    detail::RankRecords sorted;
    for (auto i : idx) {
      sorted.records.push_back(rr.records[i]);
      sorted.weight_slot.push_back(rr.weight_slot[i]);
    }
    rr = std::move(sorted);
  }

  BootstrapResult res;
  res.t_grid = t_grid;
  const auto est = rss_kaplan_meier(sample);
  for (double t : t_grid) {
    const auto p = rss_evaluate(est, t);
    res.point_estimate.push_back(p.survival);
    res.greenwood_var.push_back(p.greenwood_var);
  }

  res.replicates.assign(n_reps, std::vector<double>(t_grid.size()));
  parallel_for(n_reps, jobs, [&](std::size_t b) {
    Rng rng(stream.substream(b));
    std::vector<double> w(k * m);
    for (auto& x : w) x = law.draw(rng);
    auto& out = res.replicates[b];
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> rank_vals(t_grid.size());
    for (auto& rr : ranks) {
      std::vector<detail::WeightedRecord> recs = rr.records;
      for (std::size_t i = 0; i < recs.size(); ++i) recs[i].weight = w[rr.weight_slot[i]];
      detail::weighted_rank_curve(recs, m, t_grid, rank_vals);
      for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] += rank_vals[i];
    }
    for (auto& v : out) v /= static_cast<double>(k);
  });

  std::vector<double> column;
  column.reserve(n_reps);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    column.clear();
    for (const auto& rep : res.replicates) {
      if (!std::isnan(rep[i])) column.push_back(rep[i]);
    }
    res.n_excluded.push_back(n_reps - column.size());
    res.bootstrap_var.push_back(sample_variance(column));
  }
  return res;
}

} // namespace rsskm

#endif // RSSKM_BOOTSTRAP_HPP
