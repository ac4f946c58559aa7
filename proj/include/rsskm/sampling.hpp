#ifndef RSSKM_SAMPLING_HPP
#define RSSKM_SAMPLING_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "rsskm/error.hpp"
#include "rsskm/population_models.hpp"
#include "rsskm/rng.hpp"
#include "rsskm/rss_estimator.hpp"

namespace rsskm {

namespace detail {

// Substream layout shared by both designs, so that k = 1 RSS and SRS with the
// same stream consume identical lifetime and censoring sequences.
enum Substream : std::uint64_t { kLifetimes = 0, kProxies = 1, kCensoring = 2 };

inline CensoredObservation censor(double lifetime, const CensoringLaw& censoring, Rng& rng,
                                  int rank, int cycle) {
  const double c = censoring.draw(rng);
  return {std::min(lifetime, c), lifetime <= c, rank, cycle};
}

} // namespace detail

/// Balanced RSS: for every cycle j and rank r, draw an independent candidate
/// set of k units, order it by ranking key (ties keep candidate order) and
/// measure only the unit in position r. Censoring draws never look at the
/// lifetime or the rank.
inline RankedSetSample draw_balanced_rss(const SuperpopulationModel& model, int k, int m,
                                         const CensoringLaw& censoring, const RngStream& stream) {
  if (k < 1 || m < 1) throw EmptyDesignError("set size and cycle count must be >= 1");
  Rng life(stream.substream(detail::kLifetimes));
  Rng proxy(stream.substream(detail::kProxies));
  Rng cens(stream.substream(detail::kCensoring));

  RankedSetSample sample;
  sample.set_size_k = k;
  sample.cycles_m = m;
  sample.observations.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(m));
  const auto ku = static_cast<std::size_t>(k);
  std::vector<CandidateUnit> set(ku);
  std::vector<std::size_t> order(ku);
  for (int j = 1; j <= m; ++j) {
    for (int r = 1; r <= k; ++r) {
      for (auto& u : set) u = draw_candidate(model, life, proxy);
      std::iota(order.begin(), order.end(), 0);
      const auto nth = order.begin() + (r - 1);
      std::nth_element(order.begin(), nth, order.end(), [&](std::size_t a, std::size_t b) {
        return set[a].key < set[b].key || (set[a].key == set[b].key && a < b);
      });
      sample.observations.push_back(detail::censor(set[*nth].lifetime, censoring, cens, r, j));
    }
  }
  return sample;
}

/// Simple random sample of size n, stored as a k = 1, m = n design.
inline RankedSetSample draw_srs(const SuperpopulationModel& model, int n,
                                const CensoringLaw& censoring, const RngStream& stream) {
  if (n < 1) throw EmptyDesignError("sample size must be >= 1");
  Rng life(stream.substream(detail::kLifetimes));
  Rng proxy(stream.substream(detail::kProxies));
  Rng cens(stream.substream(detail::kCensoring));
  RankedSetSample sample;
  sample.set_size_k = 1;
  sample.cycles_m = n;
  sample.observations.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    const auto unit = draw_candidate(model, life, proxy);
    sample.observations.push_back(detail::censor(unit.lifetime, censoring, cens, 1, j));
  }
  return sample;
}

} // namespace rsskm

#endif // RSSKM_SAMPLING_HPP
