#ifndef RSSKM_SURVIVAL_CORE_HPP
#define RSSKM_SURVIVAL_CORE_HPP

// Single-sample Kaplan-Meier / Nelson-Aalen estimation for right-censored
// data, with Greenwood-type variances that account for tied event times.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rsskm/error.hpp"

namespace rsskm {

/// One follow-up record. `time` is min(lifetime, censoring time) and `event`
/// is true when the lifetime was observed. `rank` and `cycle` locate the unit
/// in a ranked-set design; both are 1 for simple random samples.
struct CensoredObservation {
  double time = 0.0;
  bool event = false;
  int rank = 1;
  int cycle = 1;

  friend bool operator==(const CensoredObservation&, const CensoredObservation&) = default;
};

/// Right-continuous step estimate of S and Lambda. Only event times are
/// stored; censoring times enter through the risk set alone.
struct StepSurvivalCurve {
  std::vector<double> jump_times;
  std::vector<double> survival;
  std::vector<double> cum_hazard;
  std::vector<double> hazard_var;
  std::vector<double> greenwood_var;
  std::vector<double> at_risk;  // R(u) at each jump
  std::vector<double> deaths;   // dN(u) at each jump
  std::size_t n_at_risk_initial = 0;
  double last_observed_time = 0.0;
  bool degenerate_tail = false;  // last risk set died out completely

  std::size_t size() const noexcept { return jump_times.size(); }
};

/// Result of a point lookup on a curve.
struct CurvePoint {
  double survival = 1.0;
  double greenwood_var = 0.0;
  double cum_hazard = 0.0;
  double hazard_var = 0.0;
  bool degenerate = false;    // at or after a jump where R(u) = dN(u)
  bool extrapolated = false;  // beyond the last observed time
};

namespace detail {

struct TimeGroup {
  double time;
  double deaths;    // (weighted) events at `time`
  double censored;  // (weighted) censorings at `time`
};

/// Input record for the product-limit kernel: a time, an event flag and a
/// nonnegative weight (1 for the ordinary estimator).
struct WeightedRecord {
  double time;
  bool event;
  double weight;
};

inline void validate(const CensoredObservation& o) {
  if (!std::isfinite(o.time) || o.time < 0.0) {
    throw InvalidObservationError("time must be finite and nonnegative, got " +
                                  std::to_string(o.time));
  }
  if (o.rank < 1 || o.cycle < 1) {
    throw InvalidObservationError("rank and cycle must be >= 1");
  }
}

/// Groups records by exact time. Records must be sorted by time.
inline std::vector<TimeGroup> group_by_time(std::span<const WeightedRecord> sorted) {
  std::vector<TimeGroup> groups;
  for (const auto& rec : sorted) {
    if (groups.empty() || groups.back().time != rec.time) {
      groups.push_back({rec.time, 0.0, 0.0});
    }
    (rec.event ? groups.back().deaths : groups.back().censored) += rec.weight;
  }
  return groups;
}

/// Product-limit kernel shared by the ordinary and the weighted estimators.
///
/// Deaths at a time are processed before censorings at the same time. The
/// survival product is evaluated in telescoped form: between two censoring
/// times the factors (R - dN) / R collapse to R_after / R_segment_start, and
/// likewise sum dN / (R (R - dN)) = 1/R_after - 1/R_segment_start. With
/// integer counts this keeps the no-censoring estimate equal to the
/// empirical survival function to the last bit.
inline StepSurvivalCurve product_limit(std::span<const WeightedRecord> sorted,
                                       std::size_t n_records) {
  StepSurvivalCurve curve;
  curve.n_at_risk_initial = n_records;
  if (sorted.empty()) return curve;
  curve.last_observed_time = sorted.back().time;

  const auto groups = group_by_time(sorted);

  // R(u) as suffix sums so each risk set is a sum of nonnegative terms.
  std::vector<double> risk(groups.size());
  double tail = 0.0;
  for (std::size_t i = groups.size(); i-- > 0;) {
    tail += groups[i].deaths + groups[i].censored;
    risk[i] = tail;
  }

  double seg_surv = 1.0;   // survival at the start of the current segment
  double seg_gw = 0.0;     // Greenwood sum at the start of the current segment
  double seg_risk = 0.0;   // risk set at the first event in the segment
  bool seg_open = false;
  double surv = 1.0, gw_sum = 0.0, cum = 0.0, hvar = 0.0;

  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double r = risk[i];
    if (g.deaths > 0.0 && r > 0.0) {
      if (!seg_open) {
        seg_risk = r;
        seg_open = true;
      }
      const double remaining = std::max(r - g.deaths, 0.0);
      cum += g.deaths / r;
      hvar += g.deaths / (r * r);
      double gw;
      if (remaining > 0.0) {
        surv = seg_surv * (remaining / seg_risk);
        gw_sum = seg_gw + (seg_risk - remaining) / (seg_risk * remaining);
        gw = surv * surv * gw_sum;
      } else {
        surv = 0.0;
        gw = 0.0;
        curve.degenerate_tail = true;
      }
      curve.jump_times.push_back(g.time);
      curve.survival.push_back(surv);
      curve.cum_hazard.push_back(cum);
      curve.hazard_var.push_back(hvar);
      curve.greenwood_var.push_back(gw);
      curve.at_risk.push_back(r);
      curve.deaths.push_back(g.deaths);
      if (remaining <= 0.0) break;
    }
    if (g.censored > 0.0 && seg_open) {
      seg_surv = surv;
      seg_gw = gw_sum;
      seg_open = false;
    }
  }
  return curve;
}

inline StepSurvivalCurve fit_curve(std::span<const CensoredObservation> obs) {
  if (obs.empty()) throw EmptySampleError("no observations");
  std::vector<WeightedRecord> recs;
  recs.reserve(obs.size());
  for (const auto& o : obs) {
    validate(o);
    recs.push_back({o.time, o.event, 1.0});
  }
  std::sort(recs.begin(), recs.end(),
            [](const WeightedRecord& a, const WeightedRecord& b) { return a.time < b.time; });
  return product_limit(recs, obs.size());
}

} // namespace detail

/// Nelson-Aalen cumulative hazard sum dN/R with variance sum dN/R^2.
/// The returned curve also carries the product-limit columns.
inline StepSurvivalCurve nelson_aalen(std::span<const CensoredObservation> obs) {
  return detail::fit_curve(obs);
}

/// Kaplan-Meier product-limit estimate with the tie-aware Greenwood variance
/// S^2 sum dN / (R (R - dN)). When the last risk set dies out the survival
/// drops to exactly 0 and the variance is reported as 0 with
/// `degenerate_tail` set.
inline StepSurvivalCurve kaplan_meier(std::span<const CensoredObservation> obs) {
  return detail::fit_curve(obs);
}

/// Right-continuous lookup at time t (t >= 0).
inline CurvePoint evaluate(const StepSurvivalCurve& curve, double t) {
  CurvePoint p;
  p.extrapolated = t > curve.last_observed_time;
  const auto it = std::upper_bound(curve.jump_times.begin(), curve.jump_times.end(), t);
  if (it == curve.jump_times.begin()) return p;
  const auto i = static_cast<std::size_t>(it - curve.jump_times.begin()) - 1;
  p.survival = curve.survival[i];
  p.greenwood_var = curve.greenwood_var[i];
  p.cum_hazard = curve.cum_hazard[i];
  p.hazard_var = curve.hazard_var[i];
  p.degenerate = curve.degenerate_tail && i + 1 == curve.size();
  return p;
}

} // namespace rsskm

#endif // RSSKM_SURVIVAL_CORE_HPP
