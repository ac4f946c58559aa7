#ifndef RSSKM_CONFIG_HPP
#define RSSKM_CONFIG_HPP

// Flat key/value configuration for the Monte-Carlo study.
//
//   # comment
//   model     = aft            # aft | weibull
//   aft.mu    = 0
//   k         = 2 4 6 8 10     # arrays: whitespace and/or comma separated
//
// Every key is optional; unknown keys are rejected so that typos surface.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "rsskm/error.hpp"
#include "rsskm/population_models.hpp"

namespace rsskm {

struct SimulationConfig {
  SuperpopulationModel model = AftModel{};
  std::vector<int> k{2, 4, 6, 8, 10};
  std::vector<int> m{20, 50};
  std::vector<double> rho{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> p_cens{0.0, 0.1, 0.3, 0.5};
  std::vector<double> levels{0.75, 0.50, 0.25, 0.10};
  std::size_t b_mc = 2000;
  std::size_t b_true = 1000;
  std::uint64_t seed = 20240601;
  std::string output = "results.csv";
  std::size_t calibration_n = 1000000;
  double calibration_tol = 0.005;
  std::uint64_t calibration_seed = 0xC0FFEE;
  std::size_t mixing_sets = 1000000;
};

/// Replicate counts used by the --full flag.
inline constexpr std::size_t kFullMonteCarloReps = 10000;
inline constexpr std::size_t kFullTrueReps = 4000;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class ConfigReader {
public:
  ConfigReader(std::string source, std::string key, std::string value, int line)
      : source_(std::move(source)), key_(std::move(key)), value_(std::move(value)), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": field '" + key_ + "': " + what);
  }

  std::vector<std::string> tokens() const {
    std::string v = value_;
    for (auto& c : v) {
      if (c == ',') c = ' ';
    }
    std::istringstream in(v);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    if (out.empty()) fail("missing value");
    return out;
  }

  double to_double(const std::string& tok) const {
    try {
      std::size_t pos = 0;
      const double d = std::stod(tok, &pos);
      if (pos != tok.size()) fail("trailing characters in number '" + tok + "'");
      return d;
    } catch (const std::logic_error&) {
      fail("expected a number, got '" + tok + "'");
    }
  }

  std::uint64_t to_uint(const std::string& tok) const {
    if (tok.empty() || tok[0] == '-') fail("expected a nonnegative integer, got '" + tok + "'");
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(tok, &pos, 0);
      if (pos != tok.size()) fail("expected an integer, got '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("expected an integer, got '" + tok + "'");
    }
  }

  std::string scalar() const {
    const auto t = tokens();
    if (t.size() != 1) fail("expected a single value");
    return t.front();
  }
  double number() const { return to_double(scalar()); }
  std::uint64_t integer() const { return to_uint(scalar()); }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (const auto& t : tokens()) out.push_back(to_double(t));
    return out;
  }
  std::vector<int> integers() const {
    std::vector<int> out;
    for (const auto& t : tokens()) out.push_back(static_cast<int>(to_uint(t)));
    return out;
  }

private:
  std::string source_, key_, value_;
  int line_;
};

} // namespace detail

/// Parses configuration text; `source` names the origin in error messages.
inline SimulationConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  SimulationConfig cfg;
  std::map<std::string, std::pair<std::string, int>> entries;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const auto key = detail::trim(line.substr(0, eq));
    if (entries.contains(key)) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": field '" + key +
                        "': duplicate key");
    }
    entries[key] = {detail::trim(line.substr(eq + 1)), lineno};
  }

  auto reader = [&](const std::string& key) {
    const auto& [value, lineno] = entries.at(key);
    return detail::ConfigReader(source, key, value, lineno);
  };

  if (entries.contains("model")) {
    const auto r = reader("model");
    const auto name = r.scalar();
    if (name == "aft") cfg.model = AftModel{};
    else if (name == "weibull") cfg.model = WeibullModel{};
    else r.fail("unknown model '" + name + "' (expected aft or weibull)");
  }

  for (const auto& [key, entry] : entries) {
    const auto r = reader(key);
    if (key == "model") continue;
    if (key.starts_with("aft.") || key.starts_with("weibull.")) {
      auto* aft = std::get_if<AftModel>(&cfg.model);
      auto* wb = std::get_if<WeibullModel>(&cfg.model);
      if (key == "aft.mu" && aft) aft->mu = r.number();
      else if (key == "aft.beta" && aft) aft->beta = r.number();
      else if (key == "aft.sigma_eps" && aft) aft->sigma_eps = r.number();
      else if (key == "aft.sigma_u" && aft) aft->sigma_u = r.number();
      else if (key == "weibull.shape" && wb) wb->shape_nu = r.number();
      else if (key == "weibull.scale" && wb) wb->scale_theta1 = r.number();
      else r.fail("not a parameter of the selected model");
    } else if (key == "k") cfg.k = r.integers();
    else if (key == "m") cfg.m = r.integers();
    else if (key == "rho") cfg.rho = r.numbers();
    else if (key == "p_cens") cfg.p_cens = r.numbers();
    else if (key == "levels") cfg.levels = r.numbers();
    else if (key == "b_mc") cfg.b_mc = r.integer();
    else if (key == "b_true") cfg.b_true = r.integer();
    else if (key == "seed") cfg.seed = r.integer();
    else if (key == "output") cfg.output = r.scalar();
    else if (key == "calibration.n") cfg.calibration_n = r.integer();
    else if (key == "calibration.tol") cfg.calibration_tol = r.number();
    else if (key == "calibration.seed") cfg.calibration_seed = r.integer();
    else if (key == "mixing.n_sets") cfg.mixing_sets = r.integer();
    else r.fail("unknown key");
  }

  auto check = [&](const std::string& key, bool ok, const std::string& what) {
    if (ok) return;
    if (entries.contains(key)) reader(key).fail(what);
    throw ConfigError(source + ": field '" + key + "': " + what);
  };
  for (int k : cfg.k) check("k", k >= 1, "set sizes must be >= 1");
  for (int m : cfg.m) check("m", m >= 1, "cycle counts must be >= 1");
  for (double r : cfg.rho) check("rho", r > 0.0 && r <= 1.0, "rho values must lie in (0,1]");
  for (double p : cfg.p_cens) check("p_cens", p >= 0.0 && p < 1.0, "p_cens must lie in [0,1)");
  for (double l : cfg.levels) check("levels", l > 0.0 && l < 1.0, "levels must lie in (0,1)");
  check("k", !cfg.k.empty(), "empty grid");
  check("b_mc", cfg.b_mc >= 2, "needs at least 2 replicates");
  check("calibration.tol", cfg.calibration_tol > 0.0, "must be positive");
  if (const auto* aft = std::get_if<AftModel>(&cfg.model)) {
    check("aft.sigma_eps", aft->sigma_eps > 0.0, "must be positive");
    check("aft.sigma_u", !aft->sigma_u || *aft->sigma_u >= 0.0, "must be nonnegative");
  } else {
    const auto& w = std::get<WeibullModel>(cfg.model);
    check("weibull.shape", w.shape_nu > 0.0, "must be positive");
    check("weibull.scale", w.scale_theta1 > 0.0, "must be positive");
  }
  return cfg;
}

inline SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  return parse_config(in, path);
}

/// Serializes a configuration in the format parse_config reads.
inline std::string to_config_text(const SimulationConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  auto list = [&](const char* key, const auto& values) {
    out << key << " =";
    for (const auto& v : values) out << ' ' << v;
    out << '\n';
  };
  if (const auto* aft = std::get_if<AftModel>(&cfg.model)) {
    out << "model = aft\n"
        << "aft.mu = " << aft->mu << "\naft.beta = " << aft->beta
        << "\naft.sigma_eps = " << aft->sigma_eps << '\n';
    if (aft->sigma_u) out << "aft.sigma_u = " << *aft->sigma_u << '\n';
  } else {
    const auto& w = std::get<WeibullModel>(cfg.model);
    out << "model = weibull\n"
        << "weibull.shape = " << w.shape_nu << "\nweibull.scale = " << w.scale_theta1 << '\n';
  }
  list("k", cfg.k);
  list("m", cfg.m);
  list("rho", cfg.rho);
  list("p_cens", cfg.p_cens);
  list("levels", cfg.levels);
  out << "b_mc = " << cfg.b_mc << "\nb_true = " << cfg.b_true << "\nseed = " << cfg.seed
      << "\noutput = " << cfg.output << "\ncalibration.n = " << cfg.calibration_n
      << "\ncalibration.tol = " << cfg.calibration_tol
      << "\ncalibration.seed = " << cfg.calibration_seed
      << "\nmixing.n_sets = " << cfg.mixing_sets << '\n';
  return out.str();
}

} // namespace rsskm

#endif // RSSKM_CONFIG_HPP
