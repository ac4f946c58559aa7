// rsskm: command-line front end for the rank-aware survival library.
//
//   rsskm simulate  --config grid.conf [--out results.csv] [--seed N] [--jobs J] [--full]
//   rsskm estimate  --input obs.csv [--out curve.csv]
//   rsskm bootstrap --input obs.csv --times 0.5,1.0 [--reps B] [--law exp|gamma:S|one]
//   rsskm kernels   --config weibull.conf [--out kernels.csv] [--seed N]
//   rsskm draw      --config grid.conf --k K --m M --rho R --p-cens P [--seed N] [--out obs.csv]
//
// Failures print one JSON line {"error": kind, "message": text} on stderr
// and exit with status 1.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rsskm/rsskm.hpp"

namespace {

/// Output sink that is stdout unless a path is given.
class Output {
public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw rsskm::IoError(path + ": cannot open output file for writing");
    path_ = path;
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }
  void close() {
    if (path_.empty()) return;
    file_.close();
    if (!file_) throw rsskm::IoError(path_ + ": write failed");
  }

private:
  std::ofstream file_;
  std::string path_;
};

rsskm::RankedSetSample read_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rsskm::IoError(path + ": cannot open input file");
  return rsskm::read_observations_csv(in, path);
}

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> out;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::logic_error&) {
      throw rsskm::ParameterError("--times: cannot parse '" + tok + "'");
    }
  }
  if (out.empty()) throw rsskm::ParameterError("--times: empty time grid");
  return out;
}

rsskm::MultiplierLaw parse_law(const std::string& text) {
  if (text == "exp") return rsskm::MultiplierLaw::unit_exponential();
  if (text == "one") return rsskm::MultiplierLaw::degenerate_one();
  if (text.starts_with("gamma:")) {
    try {
      return rsskm::MultiplierLaw::gamma(std::stod(text.substr(6)));
    } catch (const std::logic_error&) {
    }
  }
  throw rsskm::ParameterError("--law: expected exp, one or gamma:<shape>, got '" + text + "'");
}

int report(const std::string& kind, const std::string& message) {
  nlohmann::json line{{"error", kind}, {"message", message}};
  std::cerr << line.dump() << '\n';
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-aware Kaplan-Meier estimation under ranked set sampling"};
  app.require_subcommand(1);

  std::string config_path, out_path, input_path, times_text, law_text = "exp";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  bool full = false;
  std::size_t reps = 1000;
  int draw_k = 2, draw_m = 20;
  double draw_rho = 0.5, draw_p = 0.0;

  auto* simulate = app.add_subcommand("simulate", "Run the Monte-Carlo efficiency grid");
  simulate->add_option("--config", config_path, "Grid configuration file")->required();
  simulate->add_option("--out", out_path, "Output CSV (defaults to the config's output)");
  simulate->add_option("--seed", seed, "Master seed (defaults to the config's seed)");
  simulate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_flag("--full", full, "Use 10000 / 4000 replicates");

  auto* estimate = app.add_subcommand("estimate", "KM/NA per rank and their RSS average");
  estimate->add_option("--input", input_path, "Observation CSV (cycle,rank,time,event)")
      ->required();
  estimate->add_option("--out", out_path, "Output CSV (stdout if omitted)");

  auto* boot = app.add_subcommand("bootstrap", "Rank-wise multiplier bootstrap");
  boot->add_option("--input", input_path, "Observation CSV")->required();
  boot->add_option("--times", times_text, "Comma-separated evaluation times")->required();
  boot->add_option("--reps", reps, "Bootstrap replicates");
  boot->add_option("--law", law_text, "Multiplier law: exp, one or gamma:<shape>");
  boot->add_option("--seed", seed, "Seed");
  boot->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  boot->add_option("--out", out_path, "Output CSV (stdout if omitted)");

  auto* kernels = app.add_subcommand("kernels", "Asymptotic variance / RE table (Weibull)");
  kernels->add_option("--config", config_path, "Configuration with model = weibull")->required();
  kernels->add_option("--out", out_path, "Output CSV (stdout if omitted)");
  kernels->add_option("--seed", seed, "Seed for the mixing-matrix simulation");

  auto* draw = app.add_subcommand("draw", "Draw one balanced RSS sample");
  draw->add_option("--config", config_path, "Configuration supplying the model")->required();
  draw->add_option("--k", draw_k, "Set size")->check(CLI::PositiveNumber);
  draw->add_option("--m", draw_m, "Cycles")->check(CLI::PositiveNumber);
  draw->add_option("--rho", draw_rho, "Target ranking correlation");
  draw->add_option("--p-cens", draw_p, "Target censoring fraction");
  draw->add_option("--seed", seed, "Seed");
  draw->add_option("--out", out_path, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report("usage", e.what());
  }

  try {
    if (*simulate) {
      auto cfg = rsskm::load_config(config_path);
      rsskm::GridOptions g;
      g.master_seed = seed.value_or(cfg.seed);
      g.jobs = jobs;
      g.full = full;
      Output out(out_path.empty() ? cfg.output : out_path);
      rsskm::run_grid(cfg, out.stream(), g);
      out.close();
    } else if (*estimate) {
      const auto sample = read_input(input_path);
      Output out(out_path);
      rsskm::write_rss_csv(out.stream(), rsskm::rss_kaplan_meier(sample));
      out.close();
    } else if (*boot) {
      const auto sample = read_input(input_path);
      const auto res = rsskm::multiplier_bootstrap(sample, parse_times(times_text), reps,
                                                   parse_law(law_text),
                                                   rsskm::RngStream{seed.value_or(1), 0}, jobs);
      Output out(out_path);
      rsskm::write_bootstrap_csv(out.stream(), res);
      out.close();
    } else if (*kernels) {
      auto cfg = rsskm::load_config(config_path);
      if (seed) cfg.calibration_seed = *seed;
      Output out(out_path);
      rsskm::write_kernel_csv(out.stream(), rsskm::kernel_table(cfg));
      out.close();
    } else if (*draw) {
      const auto cfg = rsskm::load_config(config_path);
      rsskm::DesignPoint d{cfg.model, draw_k, draw_m, draw_rho, draw_p, cfg.levels};
      rsskm::CellOptions opt;
      opt.calibration_n = cfg.calibration_n;
      opt.calibration_tol = cfg.calibration_tol;
      opt.calibration_seed = cfg.calibration_seed;
      opt.mixing_sets = 1;
      const auto ranking = rsskm::RankingCache::compute(d, opt);
      const auto cens = rsskm::censoring_for_fraction(ranking.model, draw_p);
      const auto sample = rsskm::draw_balanced_rss(ranking.model, draw_k, draw_m, cens,
                                                   rsskm::RngStream{seed.value_or(cfg.seed), 0});
      Output out(out_path);
      rsskm::write_observations_csv(out.stream(), sample);
      out.close();
    }
  } catch (const rsskm::Error& e) {
    return report(e.kind(), e.what());
  } catch (const std::exception& e) {
    return report("internal", e.what());
  }
  return 0;
}
