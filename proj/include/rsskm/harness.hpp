#ifndef RSSKM_HARNESS_HPP
#define RSSKM_HARNESS_HPP

// Grid-driven Monte-Carlo comparison of the RSS and SRS Kaplan-Meier
// estimators: per-cell replicate loops, relative-efficiency summaries and
// the versioned CSV report.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rsskm/config.hpp"
#include "rsskm/error.hpp"
#include "rsskm/moments.hpp"
#include "rsskm/parallel.hpp"
#include "rsskm/population_models.hpp"
#include "rsskm/rng.hpp"
#include "rsskm/rss_estimator.hpp"
#include "rsskm/sampling.hpp"

namespace rsskm {

inline constexpr int kCsvSchemaVersion = 1;

/// One grid cell. `model` carries the lifetime law; the ranking noise is
/// resolved from rho_target when the cell runs.
struct DesignPoint {
  SuperpopulationModel model = AftModel{};
  int k = 2;
  int m = 20;
  double rho_target = 0.5;
  double p_cens = 0.0;
  std::vector<double> eval_levels{0.75, 0.50, 0.25, 0.10};
};

struct CellOptions {
  std::size_t b_mc = 2000;
  std::size_t b_true = 1000;
  unsigned jobs = 1;
  std::size_t calibration_n = 1000000;
  double calibration_tol = 0.005;
  std::uint64_t calibration_seed = 0xC0FFEE;
  std::size_t mixing_sets = 1000000;
};

/// Ranking noise actually used in a cell.
struct ResolvedRanking {
  SuperpopulationModel model;
  double rho_achieved = 0.0;
  double noise_sigma = 0.0;
  bool clamped = false;  // target above the noiseless-proxy ceiling
  std::optional<MixingMatrix> mixing;  // Weibull judged ranking only
};

struct EfficiencyRecord {
  DesignPoint design;
  std::string model_name;
  double rho_achieved = 0.0;
  double noise_sigma = 0.0;
  bool rho_clamped = false;
  double level = 0.0;
  double t = 0.0;
  double s_true = 0.0;
  double mean_s_rss = 0.0;
  double mean_s_srs = 0.0;
  double v_rss_mc = 0.0;
  double v_srs_mc = 0.0;
  double mean_gw_rss = 0.0;
  double mean_gw_srs = 0.0;
  double v_rss_true = 0.0;
  double v_srs_true = 0.0;
  double re_true = 0.0;
  double re_mc = 0.0;
  double re_gw = 0.0;
  double censored_fraction = 0.0;
  std::size_t degenerate_rss = 0;
  std::size_t degenerate_srs = 0;
  std::size_t b_mc = 0;
  std::size_t b_true = 0;
  std::uint64_t seed = 0;
};

/// Caches calibrations and mixing matrices that depend only on
/// (model, k, rho), so a grid computes each once.
class RankingCache {
public:
  const ResolvedRanking& resolve(const DesignPoint& d, const CellOptions& opt) {
    const auto key = std::make_pair(d.k, d.rho_target);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    return cache_.emplace(key, compute(d, opt)).first->second;
  }

  static ResolvedRanking compute(const DesignPoint& d, const CellOptions& opt) {
    ResolvedRanking res;
    if (const auto* aft = std::get_if<AftModel>(&d.model)) {
      AftModel model = *aft;
      if (model.sigma_u) {
        res.noise_sigma = *model.sigma_u;
        res.rho_achieved = aft_concomitant_correlation(
            model, res.noise_sigma, opt.calibration_n, RngStream{opt.calibration_seed, 0});
      } else {
        try {
          const auto cal = calibrate_aft_concomitant(model, d.rho_target, opt.calibration_n,
                                                     opt.calibration_tol,
                                                     RngStream{opt.calibration_seed, 0});
          res.noise_sigma = cal.sigma_u;
          res.rho_achieved = cal.achieved_rho;
        } catch (const CalibrationError& e) {
          res.noise_sigma = 0.0;
          res.rho_achieved = e.ceiling();
          res.clamped = true;
        }
        model.sigma_u = res.noise_sigma;
      }
      res.model = model;
    } else {
      const auto wb = with_dell_clutter_noise(std::get<WeibullModel>(d.model), d.rho_target);
      res.model = wb;
      res.noise_sigma = wb.sigma_z;
      res.rho_achieved = d.rho_target;
      if (wb.sigma_z > 0.0 && d.k > 1) {
        const RngStream stream{opt.calibration_seed,
                               hash_combine(static_cast<std::uint64_t>(d.k),
                                            std::bit_cast<std::uint64_t>(d.rho_target))};
        res.mixing = estimate_mixing_matrix(wb, d.k, opt.mixing_sets, stream);
      }
    }
    return res;
  }

private:
  std::map<std::pair<int, double>, ResolvedRanking> cache_;
};

namespace detail {

/// Per-replicate values at every evaluation time.
struct ReplicateValues {
  std::vector<double> s_rss, s_srs, gw_rss, gw_srs;
  std::vector<std::uint8_t> degenerate_rss, degenerate_srs;
  std::size_t censored = 0;
};

inline ReplicateValues run_replicate(const SuperpopulationModel& model, int k, int m,
                                     const CensoringLaw& censoring,
                                     const std::vector<double>& times, const RngStream& stream) {
  ReplicateValues v;
  const auto rss = draw_balanced_rss(model, k, m, censoring, stream.substream(0));
  const auto srs = draw_srs(model, k * m, censoring, stream.substream(1));

  RssSurvivalEstimate est;
  est.k = k;
  for (const auto& obs : split_by_rank(rss)) est.rank_curves.push_back(kaplan_meier(obs));
  const auto srs_curve = kaplan_meier(srs.observations);

  for (double t : times) {
    const auto p = rss_evaluate(est, t);
    const auto q = evaluate(srs_curve, t);
    v.s_rss.push_back(p.survival);
    v.gw_rss.push_back(p.greenwood_var);
    v.degenerate_rss.push_back(p.degenerate_ranks > 0);
    v.s_srs.push_back(q.survival);
    v.gw_srs.push_back(q.greenwood_var);
    v.degenerate_srs.push_back(q.degenerate);
  }
  for (const auto& o : rss.observations) v.censored += !o.event;
  for (const auto& o : srs.observations) v.censored += !o.event;
  return v;
}

inline std::vector<ReplicateValues> run_replicates(const SuperpopulationModel& model, int k, int m,
                                                   const CensoringLaw& censoring,
                                                   const std::vector<double>& times,
                                                   std::uint64_t seed, std::size_t count,
                                                   unsigned jobs) {
  std::vector<ReplicateValues> reps(count);
  parallel_for(count, jobs, [&](std::size_t b) {
    reps[b] = run_replicate(model, k, m, censoring, times, RngStream{seed, b});
  });
  return reps;
}

inline std::vector<double> column(const std::vector<ReplicateValues>& reps,
                                  std::vector<double> ReplicateValues::*field, std::size_t i) {
  std::vector<double> out;
  out.reserve(reps.size());
  for (const auto& r : reps) out.push_back((r.*field)[i]);
  return out;
}

inline std::string model_name(const SuperpopulationModel& m) {
  return std::holds_alternative<AftModel>(m) ? "aft" : "weibull";
}

} // namespace detail

/// Runs one cell: b_mc paired replicates (one RSS and one SRS sample of size
/// mk under the same censoring law, on distinct substreams of the replicate
/// stream (cell_seed, b)). The "true" variances come from a second run of
/// b_true replicates for the AFT law and from the asymptotic kernels for
/// the Weibull law.
inline std::vector<EfficiencyRecord> run_cell(const DesignPoint& design, const CellOptions& opt,
                                              std::uint64_t cell_seed,
                                              RankingCache* cache = nullptr) {
  if (opt.b_mc < 2) throw ParameterError("b_mc must be >= 2");
  ResolvedRanking local;
  const ResolvedRanking* ranking;
  if (cache) {
    ranking = &cache->resolve(design, opt);
  } else {
    local = RankingCache::compute(design, opt);
    ranking = &local;
  }
  const auto& model = ranking->model;
  const auto censoring = censoring_for_fraction(model, design.p_cens);
  const auto times = eval_times_from_levels(model, design.eval_levels);
  const int n = design.k * design.m;

  const auto reps = detail::run_replicates(model, design.k, design.m, censoring, times, cell_seed,
                                           opt.b_mc, opt.jobs);
  const bool aft = std::holds_alternative<AftModel>(model);
  std::vector<detail::ReplicateValues> true_reps;
  if (aft && opt.b_true >= 2) {
    true_reps = detail::run_replicates(model, design.k, design.m, censoring, times,
                                       hash_combine(cell_seed, 0x74727565ULL), opt.b_true,
                                       opt.jobs);
  }

  std::size_t censored = 0;
  for (const auto& r : reps) censored += r.censored;

  std::vector<EfficiencyRecord> out;
  for (std::size_t i = 0; i < times.size(); ++i) {
    using RV = detail::ReplicateValues;
    EfficiencyRecord rec;
    rec.design = design;
    rec.model_name = detail::model_name(model);
    rec.rho_achieved = ranking->rho_achieved;
    rec.noise_sigma = ranking->noise_sigma;
    rec.rho_clamped = ranking->clamped;
    rec.level = design.eval_levels[i];
    rec.t = times[i];
    rec.s_true = population_survival(model, times[i]);
    const auto s_rss = detail::column(reps, &RV::s_rss, i);
    const auto s_srs = detail::column(reps, &RV::s_srs, i);
    rec.mean_s_rss = mean(s_rss);
    rec.mean_s_srs = mean(s_srs);
    rec.v_rss_mc = sample_variance(s_rss);
    rec.v_srs_mc = sample_variance(s_srs);
    rec.mean_gw_rss = mean(detail::column(reps, &RV::gw_rss, i));
    rec.mean_gw_srs = mean(detail::column(reps, &RV::gw_srs, i));
    rec.re_mc = rec.v_srs_mc / rec.v_rss_mc;
    rec.re_gw = rec.mean_gw_srs / rec.mean_gw_rss;
    for (const auto& r : reps) {
      rec.degenerate_rss += r.degenerate_rss[i];
      rec.degenerate_srs += r.degenerate_srs[i];
    }
    rec.censored_fraction = static_cast<double>(censored) /
                            (2.0 * static_cast<double>(n) * static_cast<double>(opt.b_mc));
    rec.b_mc = opt.b_mc;
    rec.seed = cell_seed;

    if (aft) {
      rec.b_true = true_reps.size();
      if (!true_reps.empty()) {
        rec.v_rss_true = sample_variance(detail::column(true_reps, &RV::s_rss, i));
        rec.v_srs_true = sample_variance(detail::column(true_reps, &RV::s_srs, i));
        rec.re_true = rec.v_srs_true / rec.v_rss_true;
      } else {
        rec.v_rss_true = rec.v_srs_true = rec.re_true = std::numeric_limits<double>::quiet_NaN();
      }
    } else {
      rec.b_true = 0;
      try {
        const double v_srs =
            asymptotic_km_variance(model, censoring, rank_law::Population{}, times[i]);
        const double v_rss =
            ranking->mixing
                ? asymptotic_km_variance(model, censoring, rank_law::JudgedRss{&*ranking->mixing},
                                         times[i])
                : asymptotic_km_variance(model, censoring, rank_law::PerfectRss{design.k},
                                         times[i]);
        rec.v_srs_true = v_srs / n;
        rec.v_rss_true = v_rss / n;
        rec.re_true = v_srs / v_rss;
      } catch (const InferenceWindowError&) {
        rec.v_rss_true = rec.v_srs_true = rec.re_true = std::numeric_limits<double>::quiet_NaN();
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

} // namespace detail

inline const char* efficiency_csv_header() {
  return "model,k,m,n,rho_target,rho_achieved,rho_clamped,noise_sigma,p_cens,level,t,s_true,"
         "mean_s_rss,mean_s_srs,v_rss_mc,v_srs_mc,mean_gw_rss,mean_gw_srs,v_rss_true,v_srs_true,"
         "re_true,re_mc,re_gw,censored_fraction,degenerate_rss,degenerate_srs,b_mc,b_true,seed";
}

inline void write_efficiency_csv_header(std::ostream& out) {
  out << "#schema_version=" << kCsvSchemaVersion << '\n' << efficiency_csv_header() << '\n';
}

inline void write_efficiency_row(std::ostream& out, const EfficiencyRecord& r) {
  using detail::fmt6;
  const auto& d = r.design;
  out << r.model_name << ',' << d.k << ',' << d.m << ',' << d.k * d.m << ',' << fmt6(d.rho_target)
      << ',' << fmt6(r.rho_achieved) << ',' << (r.rho_clamped ? 1 : 0) << ','
      << fmt6(r.noise_sigma) << ',' << fmt6(d.p_cens) << ',' << fmt6(r.level) << ','
      << fmt6(r.t) << ',' << fmt6(r.s_true) << ',' << fmt6(r.mean_s_rss) << ','
      << fmt6(r.mean_s_srs) << ',' << fmt6(r.v_rss_mc) << ',' << fmt6(r.v_srs_mc) << ','
      << fmt6(r.mean_gw_rss) << ',' << fmt6(r.mean_gw_srs) << ',' << fmt6(r.v_rss_true) << ','
      << fmt6(r.v_srs_true) << ',' << fmt6(r.re_true) << ',' << fmt6(r.re_mc) << ','
      << fmt6(r.re_gw) << ',' << fmt6(r.censored_fraction) << ',' << r.degenerate_rss << ','
      << r.degenerate_srs << ',' << r.b_mc << ',' << r.b_true << ',' << r.seed << '\n';
}

// ---------------------------------------------------------------------------
// Grid

/// Cells in grid order: k, then m, then rho, then p_cens.
inline std::vector<DesignPoint> grid_cells(const SimulationConfig& cfg) {
  std::vector<DesignPoint> cells;
  for (int k : cfg.k)
    for (int m : cfg.m)
      for (double rho : cfg.rho)
        for (double p : cfg.p_cens) cells.push_back({cfg.model, k, m, rho, p, cfg.levels});
  return cells;
}

inline std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t cell_index) {
  return hash_combine(master_seed, static_cast<std::uint64_t>(cell_index));
}

struct GridOptions {
  std::uint64_t master_seed = 0;
  unsigned jobs = 1;
  bool full = false;
};

inline CellOptions cell_options(const SimulationConfig& cfg, const GridOptions& g) {
  CellOptions opt;
  opt.b_mc = g.full ? kFullMonteCarloReps : cfg.b_mc;
  opt.b_true = g.full ? kFullTrueReps : cfg.b_true;
  opt.jobs = g.jobs;
  opt.calibration_n = cfg.calibration_n;
  opt.calibration_tol = cfg.calibration_tol;
  opt.calibration_seed = cfg.calibration_seed;
  opt.mixing_sets = cfg.mixing_sets;
  return opt;
}

/// Runs every cell and streams rows to `out`. Output depends only on
/// (config, master seed), never on the worker count.
inline std::vector<EfficiencyRecord> run_grid(const SimulationConfig& cfg, std::ostream& out,
                                              const GridOptions& g) {
  const auto opt = cell_options(cfg, g);
  RankingCache cache;
  std::vector<EfficiencyRecord> all;
  write_efficiency_csv_header(out);
  const auto cells = grid_cells(cfg);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (auto& rec : run_cell(cells[c], opt, cell_seed(g.master_seed, c), &cache)) {
      write_efficiency_row(out, rec);
      all.push_back(std::move(rec));
    }
    out.flush();
  }
  return all;
}

inline std::vector<EfficiencyRecord> run_grid(const std::string& config_path,
                                              const std::string& output_path,
                                              const GridOptions& g) {
  const auto cfg = load_config(config_path);
  std::ofstream out(output_path, std::ios::binary);
  if (!out) throw IoError(output_path + ": cannot open output file for writing");
  auto records = run_grid(cfg, out, g);
  if (!out) throw IoError(output_path + ": write failed");
  return records;
}

// ---------------------------------------------------------------------------
// Analytic kernel tables (Weibull path)

struct KernelRow {
  int k;
  double rho;
  double p_cens;
  double level;
  double t;
  double v_srs;
  double v_perf;
  double v_judg;
  double re_perf;
  double re_judg;
};

/// Asymptotic per-observation variances and REs over the config grid.
inline std::vector<KernelRow> kernel_table(const SimulationConfig& cfg) {
  if (!std::holds_alternative<WeibullModel>(cfg.model)) {
    throw ConfigError("kernel tables need model = weibull");
  }
  CellOptions opt;
  opt.calibration_seed = cfg.calibration_seed;
  opt.mixing_sets = cfg.mixing_sets;
  RankingCache cache;
  std::vector<KernelRow> rows;
  for (int k : cfg.k) {
    for (double rho : cfg.rho) {
      const DesignPoint d{cfg.model, k, 1, rho, 0.0, cfg.levels};
      const auto& ranking = cache.resolve(d, opt);
      for (double p : cfg.p_cens) {
        const auto cens = censoring_for_fraction(cfg.model, p);
        const auto times = eval_times_from_levels(cfg.model, cfg.levels);
        for (std::size_t i = 0; i < times.size(); ++i) {
          KernelRow row{k, rho, p, cfg.levels[i], times[i], 0, 0, 0, 0, 0};
          row.v_srs = asymptotic_km_variance(cfg.model, cens, rank_law::Population{}, times[i]);
          row.v_perf = asymptotic_km_variance(cfg.model, cens, rank_law::PerfectRss{k}, times[i]);
          row.v_judg = ranking.mixing ? asymptotic_km_variance(
                                            cfg.model, cens, rank_law::JudgedRss{&*ranking.mixing},
                                            times[i])
                                      : row.v_perf;
          row.re_perf = row.v_srs / row.v_perf;
          row.re_judg = row.v_srs / row.v_judg;
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

inline void write_kernel_csv(std::ostream& out, const std::vector<KernelRow>& rows) {
  using detail::fmt6;
  out << "#schema_version=" << kCsvSchemaVersion << '\n'
      << "k,rho,p_cens,level,t,v_srs,v_perf,v_judg,re_perf,re_judg\n";
  for (const auto& r : rows) {
    out << r.k << ',' << fmt6(r.rho) << ',' << fmt6(r.p_cens) << ',' << fmt6(r.level) << ','
        << fmt6(r.t) << ',' << fmt6(r.v_srs) << ',' << fmt6(r.v_perf) << ',' << fmt6(r.v_judg)
        << ',' << fmt6(r.re_perf) << ',' << fmt6(r.re_judg) << '\n';
  }
}

} // namespace rsskm

#endif // RSSKM_HARNESS_HPP
