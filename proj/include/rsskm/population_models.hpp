#ifndef RSSKM_POPULATION_MODELS_HPP
#define RSSKM_POPULATION_MODELS_HPP

// Superpopulation laws, order-statistic and judged-rank mixtures, ranking
// noise calibration, censoring construction and the asymptotic variance
// kernels of the Kaplan-Meier estimator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rsskm/error.hpp"
#include "rsskm/rng.hpp"

namespace rsskm {

/// Log-AFT lifetime X = exp(mu - beta Z + eps), Z ~ N(0,1), eps ~ N(0, sigma_eps^2).
/// Units are ranked on the concomitant Z + U with U ~ N(0, sigma_u^2).
/// `sigma_u` stays empty until calibrated; +infinity means the ranking key
/// carries no information about the unit.
struct AftModel {
  double mu = 0.0;
  double beta = 1.5;
  double sigma_eps = 0.4;
  std::optional<double> sigma_u;

  double log_sd() const { return std::sqrt(beta * beta + sigma_eps * sigma_eps); }
};

/// Weibull lifetime S(t) = exp(-(t/theta1)^nu), ranked on X + Z with
/// Z ~ N(0, sigma_z^2) (Dell-Clutter). sigma_z = 0 is perfect ranking,
/// +infinity an uninformative key.
struct WeibullModel {
  double shape_nu = 1.0;
  double scale_theta1 = 1.0;
  double sigma_z = 0.0;
};

using SuperpopulationModel = std::variant<AftModel, WeibullModel>;

enum class CensoringKind { none, exponential_rate, weibull_scale };

/// Independent censoring law. `parameter` is the exponential rate or the
/// Weibull scale; `shape` is only used by the Weibull kind.
struct CensoringLaw {
  CensoringKind kind = CensoringKind::none;
  double parameter = 0.0;
  double shape = 1.0;

  /// K(t) = P(C > t).
  double survival(double t) const {
    switch (kind) {
      case CensoringKind::none: return 1.0;
      case CensoringKind::exponential_rate: return std::exp(-parameter * t);
      case CensoringKind::weibull_scale: return std::exp(-std::pow(t / parameter, shape));
    }
    return 1.0;
  }

  /// Draws C; +infinity when there is no censoring.
  double draw(Rng& rng) const {
    switch (kind) {
      case CensoringKind::none: return std::numeric_limits<double>::infinity();
      case CensoringKind::exponential_rate: return rng.exponential() / parameter;
      case CensoringKind::weibull_scale:
        return parameter * std::pow(rng.exponential(), 1.0 / shape);
    }
    return std::numeric_limits<double>::infinity();
  }
};

namespace detail {

inline const boost::math::normal& std_normal() {
  static const boost::math::normal n(0.0, 1.0);
  return n;
}

inline void require_time(double t) {
  if (!(t >= 0.0)) throw ParameterError("time must be nonnegative, got " + std::to_string(t));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Population laws

inline double population_survival(const SuperpopulationModel& model, double t) {
  detail::require_time(t);
  if (const auto* aft = std::get_if<AftModel>(&model)) {
    if (t == 0.0) return 1.0;
    if (std::isinf(t)) return 0.0;
    const double z = (std::log(t) - aft->mu) / aft->log_sd();
    return boost::math::cdf(boost::math::complement(detail::std_normal(), z));
  }
  const auto& w = std::get<WeibullModel>(model);
  return std::exp(-std::pow(t / w.scale_theta1, w.shape_nu));
}

inline double population_density(const SuperpopulationModel& model, double t) {
  detail::require_time(t);
  if (const auto* aft = std::get_if<AftModel>(&model)) {
    if (t == 0.0 || std::isinf(t)) return 0.0;
    const double s = aft->log_sd();
    const double z = (std::log(t) - aft->mu) / s;
    return boost::math::pdf(detail::std_normal(), z) / (t * s);
  }
  const auto& w = std::get<WeibullModel>(model);
  const double x = t / w.scale_theta1;
  return (w.shape_nu / w.scale_theta1) * std::pow(x, w.shape_nu - 1.0) *
         std::exp(-std::pow(x, w.shape_nu));
}

/// E[X], analytic (lognormal mean for the AFT law).
inline double population_mean(const SuperpopulationModel& model) {
  if (const auto* aft = std::get_if<AftModel>(&model)) {
    const double s = aft->log_sd();
    return std::exp(aft->mu + 0.5 * s * s);
  }
  const auto& w = std::get<WeibullModel>(model);
  return w.scale_theta1 * std::tgamma(1.0 + 1.0 / w.shape_nu);
}

inline double population_variance(const SuperpopulationModel& model) {
  if (const auto* aft = std::get_if<AftModel>(&model)) {
    const double s2 = aft->log_sd() * aft->log_sd();
    return std::expm1(s2) * std::exp(2.0 * aft->mu + s2);
  }
  const auto& w = std::get<WeibullModel>(model);
  const double g1 = std::tgamma(1.0 + 1.0 / w.shape_nu);
  const double g2 = std::tgamma(1.0 + 2.0 / w.shape_nu);
  return w.scale_theta1 * w.scale_theta1 * (g2 - g1 * g1);
}

/// Times at which the population survival equals each level in (0,1).
inline std::vector<double> eval_times_from_levels(const SuperpopulationModel& model,
                                                  const std::vector<double>& levels) {
  std::vector<double> times;
  times.reserve(levels.size());
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw ParameterError("survival level must lie in (0,1), got " + std::to_string(level));
    }
    if (const auto* aft = std::get_if<AftModel>(&model)) {
      const double z = boost::math::quantile(boost::math::complement(detail::std_normal(), level));
      times.push_back(std::exp(aft->mu + aft->log_sd() * z));
    } else {
      const auto& w = std::get<WeibullModel>(model);
      times.push_back(w.scale_theta1 * std::pow(-std::log(level), 1.0 / w.shape_nu));
    }
  }
  return times;
}

// ---------------------------------------------------------------------------
// Unit generation

/// One candidate unit: its lifetime and the key it is ranked on. Keys are
/// oriented so that a larger key goes with a longer lifetime.
struct CandidateUnit {
  double lifetime;
  double key;
};

/// Lifetime randomness comes from `life`, ranking noise from `proxy`, so the
/// amount of ranking noise never perturbs the lifetime sequence.
inline CandidateUnit draw_candidate(const SuperpopulationModel& model, Rng& life, Rng& proxy) {
  if (const auto* aft = std::get_if<AftModel>(&model)) {
    if (!aft->sigma_u) throw ParameterError("AFT ranking noise sigma_u is not calibrated");
    const double z = life.normal();
    const double eps = aft->sigma_eps * life.normal();
    const double x = std::exp(aft->mu - aft->beta * z + eps);
    const double v = proxy.normal();
    if (std::isinf(*aft->sigma_u)) return {x, v};
    const double orient = aft->beta >= 0.0 ? -1.0 : 1.0;
    return {x, orient * (z + *aft->sigma_u * v)};
  }
  const auto& w = std::get<WeibullModel>(model);
  const double x = w.scale_theta1 * std::pow(life.exponential(), 1.0 / w.shape_nu);
  const double v = proxy.normal();
  if (std::isinf(w.sigma_z)) return {x, v};
  return {x, x + w.sigma_z * v};
}

// ---------------------------------------------------------------------------
// Order statistics

/// P(X_(r) > t) for the r-th smallest of k i.i.d. draws, given S(t):
/// sum_{i<r} C(k,i) F^i S^(k-i).
inline double order_statistic_survival(double s, int k, int r) {
  if (k < 1 || r < 1 || r > k) {
    throw ParameterError("order statistic rank r=" + std::to_string(r) + " outside 1.." +
                         std::to_string(k));
  }
  const double f = 1.0 - s;
  double total = 0.0;
  double binom = 1.0;
  for (int i = 0; i < r; ++i) {
    if (i > 0) binom = binom * static_cast<double>(k - i + 1) / static_cast<double>(i);
    total += binom * std::pow(f, i) * std::pow(s, k - i);
  }
  return std::clamp(total, 0.0, 1.0);
}

/// Same as above with the survival function given as a callable.
template <class SurvivalFn>
  requires std::is_invocable_r_v<double, SurvivalFn, double>
double order_statistic_survival(SurvivalFn&& survival, int k, int r, double t) {
  return order_statistic_survival(static_cast<double>(survival(t)), k, r);
}

/// Density of X_(r): k C(k-1, r-1) F^(r-1) S^(k-r) f.
inline double order_statistic_density(double s, double f_density, int k, int r) {
  if (k < 1 || r < 1 || r > k) throw ParameterError("order statistic rank out of range");
  double binom = 1.0;  // C(k-1, r-1)
  for (int i = 1; i <= r - 1; ++i) {
    binom = binom * static_cast<double>(k - i) / static_cast<double>(i);
  }
  return static_cast<double>(k) * binom * std::pow(1.0 - s, r - 1) * std::pow(s, k - r) *
         f_density;
}

// ---------------------------------------------------------------------------
// Ranking noise

/// sigma_Z^2 = Var(X) (rho^-2 - 1), returned as a variance.
inline double dell_clutter_sigma(double var_x, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw ParameterError("ranking correlation must lie in (0,1], got " + std::to_string(rho));
  }
  if (!(var_x > 0.0)) throw ParameterError("Var(X) must be positive");
  return var_x * (1.0 / (rho * rho) - 1.0);
}

/// Weibull model ranked by Dell-Clutter noise hitting correlation rho.
inline WeibullModel with_dell_clutter_noise(WeibullModel model, double rho) {
  model.sigma_z = std::sqrt(dell_clutter_sigma(population_variance(model), rho));
  return model;
}

struct CalibrationResult {
  double sigma_u = 0.0;
  double achieved_rho = 0.0;  // |corr| at sigma_u on the calibration draws
  double ceiling = 0.0;       // |corr| of the noiseless key Z
  std::size_t n_cal = 0;
  RngStream stream;
};

namespace detail {

/// Sample moments of (Z, X, V) used to evaluate corr(Z + s V, X) for any s
/// on one fixed set of draws.
struct ConcomitantMoments {
  double var_z = 0, var_x = 0, var_v = 0, cov_zx = 0, cov_vx = 0, cov_zv = 0;

  double abs_corr(double sigma) const {
    const double num = cov_zx + sigma * cov_vx;
    const double den = var_x * (var_z + 2.0 * sigma * cov_zv + sigma * sigma * var_v);
    return std::abs(num) / std::sqrt(den);
  }
};

inline ConcomitantMoments aft_moments(const AftModel& model, std::size_t n, const RngStream& stream) {
  if (n < 2) throw ParameterError("calibration needs at least 2 draws");
  Rng life(stream.substream(0));
  Rng noise(stream.substream(1));
  std::vector<double> z(n), x(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = life.normal();
    const double eps = model.sigma_eps * life.normal();
    x[i] = std::exp(model.mu - model.beta * z[i] + eps);
    v[i] = noise.normal();
  }
  const double dn = static_cast<double>(n);
  const double mz = std::accumulate(z.begin(), z.end(), 0.0) / dn;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / dn;
  const double mv = std::accumulate(v.begin(), v.end(), 0.0) / dn;
  ConcomitantMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    const double dz = z[i] - mz, dx = x[i] - mx, dv = v[i] - mv;
    m.var_z += dz * dz;
    m.var_x += dx * dx;
    m.var_v += dv * dv;
    m.cov_zx += dz * dx;
    m.cov_vx += dv * dx;
    m.cov_zv += dz * dv;
  }
  return m;
}

} // namespace detail

/// Monte-Carlo |corr(Z + sigma_u V, X)| on n fresh draws from `stream`.
inline double aft_concomitant_correlation(const AftModel& model, double sigma_u, std::size_t n,
                                          const RngStream& stream) {
  return detail::aft_moments(model, n, stream).abs_corr(sigma_u);
}

/// Finds sigma_u so that the Monte-Carlo |corr(Z + U, X)| over n_cal draws
/// is within tol of rho_target. Bisection on [0, sigma_max], doubling
/// sigma_max until the target is bracketed.
inline CalibrationResult calibrate_aft_concomitant(const AftModel& model, double rho_target,
                                                   std::size_t n_cal, double tol,
                                                   const RngStream& stream) {
  if (!(rho_target > 0.0 && rho_target <= 1.0)) {
    throw ParameterError("rho_target must lie in (0,1], got " + std::to_string(rho_target));
  }
  if (!(tol > 0.0)) throw ParameterError("calibration tolerance must be positive");
  const auto m = detail::aft_moments(model, n_cal, stream);
  CalibrationResult res;
  res.n_cal = n_cal;
  res.stream = stream;
  res.ceiling = m.abs_corr(0.0);
  if (rho_target > res.ceiling + tol) {
    throw CalibrationError("target correlation " + std::to_string(rho_target) +
                               " exceeds the noiseless-proxy ceiling " +
                               std::to_string(res.ceiling),
                           res.ceiling);
  }
  if (rho_target >= res.ceiling) {
    res.sigma_u = 0.0;
    res.achieved_rho = res.ceiling;
    return res;
  }
  double lo = 0.0, hi = 1.0;
  while (m.abs_corr(hi) > rho_target) {
    hi *= 2.0;
    if (hi > 1e12) throw CalibrationError("could not bracket the target correlation", res.ceiling);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (m.abs_corr(mid) > rho_target ? lo : hi) = mid;
  }
  res.sigma_u = 0.5 * (lo + hi);
  res.achieved_rho = m.abs_corr(res.sigma_u);
  if (std::abs(res.achieved_rho - rho_target) > tol) {
    throw CalibrationError("bisection did not reach the target within tolerance", res.ceiling);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Censoring

/// Censoring law aimed at a censored fraction p. AFT: exponential with rate
/// -log(1-p)/E[X]. Weibull: same shape, scale theta1 ((1-p)/p)^(1/nu).
inline CensoringLaw censoring_for_fraction(const SuperpopulationModel& model, double p_cens) {
  if (!(p_cens >= 0.0 && p_cens < 1.0)) {
    throw ParameterError("censoring fraction must lie in [0,1), got " + std::to_string(p_cens));
  }
  if (p_cens == 0.0) return {};
  if (std::holds_alternative<AftModel>(model)) {
    return {CensoringKind::exponential_rate, -std::log1p(-p_cens) / population_mean(model), 1.0};
  }
  const auto& w = std::get<WeibullModel>(model);
  return {CensoringKind::weibull_scale,
          w.scale_theta1 * std::pow((1.0 - p_cens) / p_cens, 1.0 / w.shape_nu), w.shape_nu};
}

// ---------------------------------------------------------------------------
// Judged-rank mixing

/// w[r][j] = P(true rank j | judged rank r), both 1-based in the accessors.
struct MixingMatrix {
  int k = 0;
  std::vector<double> w;  // row-major k x k
  std::size_t n_sets = 0;

  double operator()(int r, int j) const {
    return w[static_cast<std::size_t>((r - 1) * k + (j - 1))];
  }
  double row_sum(int r) const {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += (*this)(r, j);
    return s;
  }
  double column_sum(int j) const {
    double s = 0.0;
    for (int r = 1; r <= k; ++r) s += (*this)(r, j);
    return s;
  }
  /// Binomial standard error of one estimated entry.
  double standard_error(int r, int j) const {
    const double p = (*this)(r, j);
    return n_sets > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n_sets)) : 0.0;
  }

  static MixingMatrix identity(int k) {
    MixingMatrix m;
    m.k = k;
    m.w.assign(static_cast<std::size_t>(k * k), 0.0);
    for (int r = 0; r < k; ++r) m.w[static_cast<std::size_t>(r * k + r)] = 1.0;
    return m;
  }
};

/// Simulates n_sets candidate sets of size k, ranks each by key and by true
/// lifetime, and tallies P(T = j | J = r). Key ties keep candidate order.
inline MixingMatrix estimate_mixing_matrix(const SuperpopulationModel& model, int k,
                                           std::size_t n_sets, const RngStream& stream) {
  if (k < 1) throw ParameterError("set size must be >= 1");
  if (n_sets < 1) throw ParameterError("need at least one candidate set");
  Rng life(stream.substream(0));
  Rng proxy(stream.substream(1));
  const auto ku = static_cast<std::size_t>(k);
  std::vector<std::uint64_t> counts(ku * ku, 0);
  std::vector<CandidateUnit> units(ku);
  std::vector<std::size_t> by_key(ku), by_life(ku), true_rank(ku);
  for (std::size_t s = 0; s < n_sets; ++s) {
    for (auto& u : units) u = draw_candidate(model, life, proxy);
    std::iota(by_key.begin(), by_key.end(), 0);
    std::iota(by_life.begin(), by_life.end(), 0);
    std::stable_sort(by_key.begin(), by_key.end(),
                     [&](std::size_t a, std::size_t b) { return units[a].key < units[b].key; });
    std::stable_sort(by_life.begin(), by_life.end(), [&](std::size_t a, std::size_t b) {
      return units[a].lifetime < units[b].lifetime;
    });
    for (std::size_t j = 0; j < ku; ++j) true_rank[by_life[j]] = j;
    for (std::size_t r = 0; r < ku; ++r) ++counts[r * ku + true_rank[by_key[r]]];
  }
  MixingMatrix m;
  m.k = k;
  m.n_sets = n_sets;
  m.w.resize(ku * ku);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    m.w[i] = static_cast<double>(counts[i]) / static_cast<double>(n_sets);
  }
  return m;
}

/// Judged-rank survival sum_j w[r][j] S_[j](t).
inline double judged_rank_survival(const MixingMatrix& w, int r, double s) {
  double total = 0.0;
  for (int j = 1; j <= w.k; ++j) total += w(r, j) * order_statistic_survival(s, w.k, j);
  return total;
}

/// Limit of the rank average when true-rank frequencies are not uniform:
/// S*(t) = sum_j P(T=j) S_[j](t), with P(T=j) the column masses / k.
inline double rank_average_target(const SuperpopulationModel& model, const MixingMatrix& w,
                                  double t) {
  const double s = population_survival(model, t);
  double total = 0.0;
  for (int j = 1; j <= w.k; ++j) {
    total += w.column_sum(j) / w.k * order_statistic_survival(s, w.k, j);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Asymptotic KM variance kernels

namespace rank_law {
struct Population {};
/// True order-statistic law of rank r out of k.
struct TrueRank {
  int k;
  int r;
};
/// Judged rank r: mixture of true rank laws with the rows of `mixing`.
struct JudgedRank {
  const MixingMatrix* mixing;
  int r;
};
/// Balanced RSS under perfect ranking: average of the k rank kernels.
struct PerfectRss {
  int k;
};
/// Balanced RSS under judgment ranking.
struct JudgedRss {
  const MixingMatrix* mixing;
};
} // namespace rank_law

using RankLaw = std::variant<rank_law::Population, rank_law::TrueRank, rank_law::JudgedRank,
                             rank_law::PerfectRss, rank_law::JudgedRss>;

enum class KernelMethod { automatic, closed_form, quadrature };

namespace detail {

/// Survival and density of one (single-rank) lifetime law at t.
struct LawPoint {
  double survival;
  double density;
};

template <class Law>
LawPoint law_at(const SuperpopulationModel& model, const Law& law, double t) {
  const double s = population_survival(model, t);
  const double f = population_density(model, t);
  if constexpr (std::is_same_v<Law, rank_law::Population>) {
    return {s, f};
  } else if constexpr (std::is_same_v<Law, rank_law::TrueRank>) {
    return {order_statistic_survival(s, law.k, law.r),
            order_statistic_density(s, f, law.k, law.r)};
  } else {
    const auto& w = *law.mixing;
    LawPoint p{0.0, 0.0};
    for (int j = 1; j <= w.k; ++j) {
      const double wj = w(law.r, j);
      if (wj == 0.0) continue;
      p.survival += wj * order_statistic_survival(s, w.k, j);
      p.density += wj * order_statistic_density(s, f, w.k, j);
    }
    return p;
  }
}

inline bool weibull_same_shape(const SuperpopulationModel& model, const CensoringLaw& c) {
  const auto* w = std::get_if<WeibullModel>(&model);
  if (!w) return false;
  if (c.kind == CensoringKind::none) return true;
  if (c.kind == CensoringKind::exponential_rate) return w->shape_nu == 1.0;
  return c.shape == w->shape_nu;
}

/// Closed form of S(t)^2 int_0^t f / (S^2 K) for the population law where
/// the integral is elementary. Without censoring this is S_L (1 - S_L) for
/// any law; for Weibull lifetimes with same-shape Weibull censoring
/// int_0^t = theta1^-nu / a * (exp(a t^nu) - 1), a = theta1^-nu + theta2^-nu.
template <class Law>
std::optional<double> kernel_closed_form(const SuperpopulationModel& model,
                                         const CensoringLaw& censoring, const Law& law,
                                         double t) {
  if (censoring.kind == CensoringKind::none) {
    const auto p = law_at(model, law, t);
    return p.survival * (1.0 - p.survival);
  }
  if constexpr (std::is_same_v<Law, rank_law::Population>) {
    if (!weibull_same_shape(model, censoring)) return std::nullopt;
    const auto& w = std::get<WeibullModel>(model);
    const double nu = w.shape_nu;
    const double life_rate = std::pow(w.scale_theta1, -nu);
    const double cens_rate = censoring.kind == CensoringKind::exponential_rate
                                 ? censoring.parameter
                                 : std::pow(censoring.parameter, -nu);
    const double a = life_rate + cens_rate;
    const double s = population_survival(model, t);
    return s * s * (life_rate / a) * std::expm1(a * std::pow(t, nu));
  } else {
    return std::nullopt;
  }
}

template <class Law>
double kernel_quadrature(const SuperpopulationModel& model, const CensoringLaw& censoring,
                         const Law& law, double t) {
  auto integrand = [&](double u) {
    const auto p = law_at(model, law, u);
    if (p.density == 0.0) return 0.0;
    return p.density / (p.survival * p.survival * censoring.survival(u));
  };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, 0.0, t, 20, 1e-11, &error);
  const double s = law_at(model, law, t).survival;
  return s * s * integral;
}

template <class Law>
double single_kernel(const SuperpopulationModel& model, const CensoringLaw& censoring,
                     const Law& law, double t, KernelMethod method) {
  const auto p = law_at(model, law, t);
  if (!(p.survival * censoring.survival(t) > 0.0) || !std::isfinite(t)) {
    throw InferenceWindowError("observed-time survival vanishes at t=" + std::to_string(t));
  }
  if (method != KernelMethod::quadrature) {
    if (auto closed = kernel_closed_form(model, censoring, law, t)) return *closed;
    if (method == KernelMethod::closed_form) {
      throw ParameterError("no closed form for this lifetime/censoring/rank combination");
    }
  }
  return kernel_quadrature(model, censoring, law, t);
}

} // namespace detail

/// Asymptotic variance of sqrt(n)(S_hat(t) - S(t)):
/// V(t) = S_L(t)^2 int_0^t dH_1(u) / S_Y(u)^2 with dH_1 = K dF_L and
/// S_Y = S_L K, for the lifetime law L selected by `law`. The RSS variants
/// return the average of the k within-rank kernels, i.e. the per-observation
/// variance of the equal-weight RSS estimator.
inline double asymptotic_km_variance(const SuperpopulationModel& model,
                                     const CensoringLaw& censoring, const RankLaw& law, double t,
                                     KernelMethod method = KernelMethod::automatic) {
  detail::require_time(t);
  return std::visit(
      [&](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, rank_law::PerfectRss>) {
          double total = 0.0;
          for (int r = 1; r <= l.k; ++r) {
            total += detail::single_kernel(model, censoring, rank_law::TrueRank{l.k, r}, t, method);
          }
          return total / l.k;
        } else if constexpr (std::is_same_v<L, rank_law::JudgedRss>) {
          double total = 0.0;
          for (int r = 1; r <= l.mixing->k; ++r) {
            total += detail::single_kernel(model, censoring, rank_law::JudgedRank{l.mixing, r}, t,
                                           method);
          }
          return total / l.mixing->k;
        } else {
          return detail::single_kernel(model, censoring, l, t, method);
        }
      },
      law);
}

} // namespace rsskm

#endif // RSSKM_POPULATION_MODELS_HPP
