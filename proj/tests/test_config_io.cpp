#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "rsskm/config.hpp"
#include "rsskm/csv_io.hpp"
#include "rsskm/sampling.hpp"

using namespace rsskm;

namespace {

SimulationConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.conf");
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "no error";
}

} // namespace

TEST(Config, DefaultsMatchDeskScale) {
  const auto cfg = parse("");
  EXPECT_TRUE(std::holds_alternative<AftModel>(cfg.model));
  EXPECT_EQ(cfg.k, (std::vector<int>{2, 4, 6, 8, 10}));
  EXPECT_EQ(cfg.m, (std::vector<int>{20, 50}));
  EXPECT_EQ(cfg.b_mc, 2000u);
  EXPECT_EQ(cfg.b_true, 1000u);
}

TEST(Config, ParsesAllKeys) {
  const auto cfg = parse(R"(# grid
model = weibull
weibull.shape = 1.5   # comment
weibull.scale = 2
k = 2, 4 6
m = 20
rho = 0.5 1
p_cens = 0 0.3
levels = 0.75, 0.5
b_mc = 100
b_true = 50
seed = 0x10
output = out.csv
calibration.n = 1000
calibration.tol = 0.01
calibration.seed = 9
mixing.n_sets = 5000
)");
  const auto& w = std::get<WeibullModel>(cfg.model);
  EXPECT_EQ(w.shape_nu, 1.5);
  EXPECT_EQ(w.scale_theta1, 2.0);
  EXPECT_EQ(cfg.k, (std::vector<int>{2, 4, 6}));
  EXPECT_EQ(cfg.rho, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(cfg.seed, 16u);
  EXPECT_EQ(cfg.output, "out.csv");
  EXPECT_EQ(cfg.mixing_sets, 5000u);
}

TEST(Config, RoundTrip) {
  SimulationConfig cfg;
  cfg.model = AftModel{0.1, 1.2, 0.3, 0.7};
  cfg.k = {3};
  cfg.rho = {0.25};
  cfg.levels = {0.6};
  cfg.seed = 123456789012345ULL;
  const auto back = parse(to_config_text(cfg));
  EXPECT_EQ(to_config_text(back), to_config_text(cfg));
  const auto& a = std::get<AftModel>(back.model);
  EXPECT_EQ(a.mu, 0.1);
  EXPECT_EQ(a.sigma_u, 0.7);
}

TEST(Config, ErrorsNameFileLineAndField) {
  EXPECT_EQ(config_error("k = 2\nbogus = 1\n"), "config: test.conf:2: field 'bogus': unknown key");
  EXPECT_NE(config_error("k = 2\nk = 3\n").find("duplicate"), std::string::npos);
  EXPECT_NE(config_error("rho = 0.5 abc\n").find("field 'rho'"), std::string::npos);
  EXPECT_NE(config_error("rho = 1.5\n").find("test.conf:1: field 'rho'"), std::string::npos);
  EXPECT_NE(config_error("p_cens = 1\n").find("p_cens"), std::string::npos);
  EXPECT_NE(config_error("b_mc = 1\n").find("b_mc"), std::string::npos);
  EXPECT_NE(config_error("model = cox\n").find("unknown model"), std::string::npos);
  EXPECT_NE(config_error("weibull.shape = 2\n").find("selected model"), std::string::npos);
  EXPECT_NE(config_error("k =\n").find("missing value"), std::string::npos);
  EXPECT_NE(config_error("k = -2\n").find("field 'k'"), std::string::npos);
  EXPECT_NE(config_error("just text\n").find("test.conf:1"), std::string::npos);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/grid.conf"), ConfigError);
}

// ---------------------------------------------------------------------------
// Observation CSV

TEST(ObservationCsv, RoundTripIsExact) {
  const SuperpopulationModel model = WeibullModel{1.3, 2.0, 0.0};
  const auto s = draw_balanced_rss(model, 3, 6, censoring_for_fraction(model, 0.3), RngStream{1, 2});
  std::stringstream buf;
  write_observations_csv(buf, s);
  const auto back = read_observations_csv(buf);
  EXPECT_EQ(back.set_size_k, 3);
  EXPECT_EQ(back.cycles_m, 6);
  EXPECT_EQ(back.observations, s.observations);
}

TEST(ObservationCsv, OptionalRankAndCycle) {
  std::istringstream in("# comment\ntime,event\n1.0,1\n2.0,0\n3,true\n");
  const auto s = read_observations_csv(in);
  EXPECT_EQ(s.set_size_k, 1);
  EXPECT_EQ(s.cycles_m, 3);
  EXPECT_EQ(s.observations[2].cycle, 3);
  EXPECT_TRUE(s.observations[2].event);
  EXPECT_NO_THROW(validate_design(s));
}

TEST(ObservationCsv, Errors) {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return read_observations_csv(in, "obs.csv");
  };
  EXPECT_THROW(read("t,e\n1,1\n"), InvalidObservationError);
  EXPECT_THROW(read("time,event\n"), EmptySampleError);
  EXPECT_THROW(read("time,event\n-1,1\n"), InvalidObservationError);
  EXPECT_THROW(read("time,event\nabc,1\n"), InvalidObservationError);
  EXPECT_THROW(read("time,event\n1,2\n"), InvalidObservationError);
  EXPECT_THROW(read("time,event,rank\n1,1\n"), InvalidObservationError);
  try {
    read("time,event\n1,1\n1x,1\n");
    FAIL();
  } catch (const InvalidObservationError& e) {
    EXPECT_NE(std::string(e.what()).find(": obs.csv:3: "), std::string::npos);
  }
}

TEST(CurveCsv, RankRowsThenAverage) {
  const RankedSetSample s{2, 1, {{1.0, true, 1, 1}, {2.0, true, 2, 1}}};
  std::ostringstream out;
  write_rss_csv(out, rss_kaplan_meier(s));
  EXPECT_EQ(out.str(),
            "rank,time,survival,greenwood_var,cum_hazard,hazard_var\n"
            "1,1,0,0,1,1\n"
            "2,2,0,0,1,1\n"
            "0,1,0.5,0,0.5,0.25\n"
            "0,2,0,0,1,0.5\n");
}

TEST(BootstrapCsv, Columns) {
  BootstrapResult r;
  r.t_grid = {0.5};
  r.point_estimate = {0.75};
  r.greenwood_var = {0.01};
  r.bootstrap_var = {0.0125};
  r.n_excluded = {2};
  std::ostringstream out;
  write_bootstrap_csv(out, r);
  EXPECT_EQ(out.str(),
            "t,point_estimate,greenwood_var,bootstrap_var,n_excluded_reps\n"
            "0.5,0.75,0.01,0.0125,2\n");
}
