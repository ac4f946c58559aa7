#ifndef RSSKM_MOMENTS_HPP
#define RSSKM_MOMENTS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace rsskm {

/// Pairwise sum; the split points depend only on the length.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const auto half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double mean(std::span<const double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  return pairwise_sum(x) / static_cast<double>(x.size());
}

/// Unbiased (n - 1) sample variance, two-pass on data shifted by x[0] so
/// that a constant sample gives exactly 0.
inline double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double shift = x[0];
  double sum = 0.0;
  for (double v : x) sum += v - shift;
  const double n = static_cast<double>(x.size());
  const double mu = sum / n;
  double ss = 0.0, comp = 0.0;
  for (double v : x) {
    const double d = (v - shift) - mu;
    ss += d * d;
    comp += d;
  }
  return (ss - comp * comp / n) / (n - 1.0);
}

} // namespace rsskm

#endif // RSSKM_MOMENTS_HPP
