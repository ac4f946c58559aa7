#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rsskm/harness.hpp"

using namespace rsskm;

namespace {

const SuperpopulationModel kExp = WeibullModel{1.0, 1.0, 0.0};

CellOptions small_options(std::size_t b_mc, std::size_t b_true = 200) {
  CellOptions opt;
  opt.b_mc = b_mc;
  opt.b_true = b_true;
  opt.calibration_n = 100000;
  opt.mixing_sets = 100000;
  return opt;
}

double re_mc_se(const EfficiencyRecord& r) {
  // delta-method s.e. of a ratio of two independent sample variances
  return r.re_mc * std::sqrt(4.0 / (static_cast<double>(r.b_mc) - 1.0));
}

} // namespace

TEST(RunCell, RecordInvariants) {
  const DesignPoint d{kExp, 3, 10, 0.8, 0.3, {0.75, 0.5, 0.25}};
  const auto recs = run_cell(d, small_options(300), 17);
  ASSERT_EQ(recs.size(), 3u);
  for (const auto& r : recs) {
    EXPECT_EQ(r.model_name, "weibull");
    EXPECT_GE(r.v_rss_mc, 0.0);
    EXPECT_GE(r.v_srs_mc, 0.0);
    EXPECT_GE(r.mean_gw_rss, 0.0);
    EXPECT_GE(r.mean_gw_srs, 0.0);
    EXPECT_EQ(r.re_mc, r.v_srs_mc / r.v_rss_mc);
    EXPECT_EQ(r.re_gw, r.mean_gw_srs / r.mean_gw_rss);
    EXPECT_EQ(r.re_true, r.v_srs_true / r.v_rss_true);
    EXPECT_EQ(r.s_true, population_survival(kExp, r.t));
    EXPECT_EQ(r.b_mc, 300u);
    EXPECT_EQ(r.seed, 17u);
  }
}

TEST(RunCell, Deterministic) {
  const DesignPoint d{AftModel{}, 2, 10, 0.3, 0.1, {0.75, 0.5}};
  auto opt = small_options(200);
  const auto a = run_cell(d, opt, 5);
  opt.jobs = 3;
  const auto b = run_cell(d, opt, 5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::ostringstream sa, sb;
    write_efficiency_row(sa, a[i]);
    write_efficiency_row(sb, b[i]);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_EQ(a[i].v_rss_mc, b[i].v_rss_mc);
    EXPECT_EQ(a[i].re_true, b[i].re_true);
  }
}

TEST(RunCell, SingleRankDesignCollapses) {
  const DesignPoint d{kExp, 1, 60, 1.0, 0.3, {0.75, 0.5}};
  const auto recs = run_cell(d, small_options(4000), 23);
  for (const auto& r : recs) {
    EXPECT_NEAR(r.re_mc, 1.0, 3 * re_mc_se(r));
    EXPECT_NEAR(r.re_gw, 1.0, 0.05);
    EXPECT_NEAR(r.re_true, 1.0, 1e-8);
  }
}

TEST(RunCell, UnbiasedAtUpperLevels) {
  const DesignPoint d{kExp, 4, 20, 0.7, 0.3, {0.75, 0.5}};
  const auto recs = run_cell(d, small_options(2000), 29);
  for (const auto& r : recs) {
    EXPECT_NEAR(r.mean_s_rss, r.s_true, 3 * std::sqrt(r.v_rss_mc / r.b_mc));
    EXPECT_NEAR(r.mean_s_srs, r.s_true, 3 * std::sqrt(r.v_srs_mc / r.b_mc));
  }
}

TEST(RunCell, EfficiencyGrowsWithRho) {
  auto opt = small_options(3000);
  for (double p : {0.0, 0.3}) {
    const auto weak = run_cell({kExp, 4, 20, 0.5, p, {0.75, 0.5}}, opt, 31);
    const auto strong = run_cell({kExp, 4, 20, 0.9, p, {0.75, 0.5}}, opt, 37);
    for (std::size_t i = 0; i < weak.size(); ++i) {
      const double se = std::hypot(re_mc_se(weak[i]), re_mc_se(strong[i]));
      EXPECT_GE(strong[i].re_mc, weak[i].re_mc - 2 * se);
      EXPECT_GT(strong[i].re_true, weak[i].re_true);
    }
  }
}

TEST(RunCell, AftAboveCeilingIsClamped) {
  const DesignPoint d{AftModel{}, 2, 10, 0.9, 0.0, {0.5}};
  const auto recs = run_cell(d, small_options(50), 1);
  EXPECT_TRUE(recs[0].rho_clamped);
  EXPECT_EQ(recs[0].noise_sigma, 0.0);
  EXPECT_LT(recs[0].rho_achieved, 0.5);
}

TEST(RunCell, AftSecondaryRunCanBeDisabled) {
  const DesignPoint d{AftModel{}, 2, 10, 0.3, 0.0, {0.5}};
  const auto recs = run_cell(d, small_options(50, 0), 1);
  EXPECT_TRUE(std::isnan(recs[0].re_true));
  EXPECT_EQ(recs[0].b_true, 0u);
}

TEST(RunCell, TooFewReplicates) {
  EXPECT_THROW(run_cell({kExp, 2, 5, 0.9, 0.0, {0.5}}, small_options(1), 1), ParameterError);
}

TEST(RunCell, CensoredFractionTracksWeibullTarget) {
  const auto recs = run_cell({kExp, 2, 50, 0.9, 0.3, {0.5}}, small_options(400), 2);
  EXPECT_NEAR(recs[0].censored_fraction, 0.3, 0.01);
}

// ---------------------------------------------------------------------------
// Grid

namespace {

SimulationConfig tiny_grid() {
  SimulationConfig cfg;
  cfg.model = AftModel{};
  cfg.k = {2, 3};
  cfg.m = {5};
  cfg.rho = {0.3, 0.9};
  cfg.p_cens = {0.0, 0.3};
  cfg.levels = {0.75, 0.5};
  cfg.b_mc = 40;
  cfg.b_true = 20;
  cfg.calibration_n = 20000;
  return cfg;
}

} // namespace

TEST(Grid, CellOrderAndSeeds) {
  const auto cells = grid_cells(tiny_grid());
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(cells[0].k, 2);
  EXPECT_EQ(cells[1].p_cens, 0.3);
  EXPECT_EQ(cells[2].rho_target, 0.9);
  EXPECT_EQ(cells[4].k, 3);
  EXPECT_NE(cell_seed(1, 0), cell_seed(1, 1));
  EXPECT_NE(cell_seed(1, 0), cell_seed(2, 0));
}

TEST(Grid, CsvShape) {
  std::ostringstream out;
  const auto recs = run_grid(tiny_grid(), out, {7, 1, false});
  EXPECT_EQ(recs.size(), 16u);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "#schema_version=1");
  std::getline(in, line);
  EXPECT_EQ(line, efficiency_csv_header());
  const auto columns = std::count(line.begin(), line.end(), ',');
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), columns);
  }
  EXPECT_EQ(rows, 16);
}

TEST(Grid, ByteIdenticalAcrossJobs) {
  std::ostringstream a, b;
  run_grid(tiny_grid(), a, {11, 1, false});
  run_grid(tiny_grid(), b, {11, 4, false});
  EXPECT_EQ(a.str(), b.str());
  std::ostringstream c;
  run_grid(tiny_grid(), c, {12, 1, false});
  EXPECT_NE(a.str(), c.str());
}

TEST(Grid, FullFlagUsesLargeReplicateCounts) {
  const auto opt = cell_options(tiny_grid(), {1, 1, true});
  EXPECT_EQ(opt.b_mc, kFullMonteCarloReps);
  EXPECT_EQ(opt.b_true, kFullTrueReps);
  EXPECT_EQ(cell_options(tiny_grid(), {1, 1, false}).b_mc, 40u);
}

TEST(Grid, FileErrorsCarryPaths) {
  const auto dir = std::filesystem::temp_directory_path() / "rsskm_grid_test";
  std::filesystem::create_directories(dir);
  const auto cfg_path = (dir / "grid.conf").string();
  {
    std::ofstream f(cfg_path);
    f << to_config_text(tiny_grid());
  }
  try {
    run_grid(cfg_path, (dir / "missing" / "out.csv").string(), {});
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("out.csv"), std::string::npos);
  }
  try {
    run_grid((dir / "nope.conf").string(), (dir / "out.csv").string(), {});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("nope.conf"), std::string::npos);
  }
  const auto recs = run_grid(cfg_path, (dir / "out.csv").string(), {3, 1, false});
  EXPECT_EQ(recs.size(), 16u);
  std::filesystem::remove_all(dir);
}

TEST(Kernels, TableNeedsWeibull) {
  EXPECT_THROW(kernel_table(tiny_grid()), ConfigError);
  SimulationConfig cfg;
  cfg.model = WeibullModel{1.0, 1.0, 0.0};
  cfg.k = {4};
  cfg.rho = {0.5, 1.0};
  cfg.p_cens = {0.0, 0.3};
  cfg.levels = {0.75, 0.5};
  cfg.mixing_sets = 100000;
  const auto rows = kernel_table(cfg);
  ASSERT_EQ(rows.size(), 8u);
  for (const auto& r : rows) {
    EXPECT_GE(r.re_perf, r.re_judg - 1e-12);
    EXPECT_GE(r.re_judg, 1.0);
    if (r.rho == 1.0) EXPECT_EQ(r.v_judg, r.v_perf);
  }
  std::ostringstream out;
  write_kernel_csv(out, rows);
  EXPECT_EQ(out.str().rfind("#schema_version=1\nk,rho,", 0), 0u);
}
