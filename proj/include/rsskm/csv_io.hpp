#ifndef RSSKM_CSV_IO_HPP
#define RSSKM_CSV_IO_HPP

// CSV readers and writers for observations, curves and bootstrap output.

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rsskm/bootstrap.hpp"
#include "rsskm/error.hpp"
#include "rsskm/rss_estimator.hpp"
#include "rsskm/survival_core.hpp"

namespace rsskm {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cell.erase(std::remove_if(cell.begin(), cell.end(),
                              [](char c) { return c == ' ' || c == '\t' || c == '\r'; }),
               cell.end());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Shortest text that reads back to the same double.
inline std::string fmt_full(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

} // namespace detail

/// Reads observations with a header row naming the columns `time`, `event`
/// and optionally `rank` and `cycle` (any order). Lines starting with '#'
/// are skipped. Missing cycles are numbered per rank in file order. The
/// design size is taken from the largest rank and cycle seen.
inline RankedSetSample read_observations_csv(std::istream& in,
                                             const std::string& source = "<input>") {
  std::string line;
  int lineno = 0;
  std::map<std::string, std::size_t> col;
  auto fail = [&](const std::string& what) -> void {
    throw InvalidObservationError(source + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto names = detail::split_csv_line(line);
    for (std::size_t i = 0; i < names.size(); ++i) col[names[i]] = i;
    break;
  }
  if (!col.contains("time") || !col.contains("event")) {
    fail("header must name at least the columns time and event");
  }
  RankedSetSample sample;
  std::map<int, int> next_cycle;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    auto field = [&](const std::string& name) -> const std::string& {
      const auto i = col.at(name);
      if (i >= cells.size()) fail("missing column '" + name + "'");
      return cells[i];
    };
    CensoredObservation o;
    try {
      std::size_t pos = 0;
      o.time = std::stod(field("time"), &pos);
      if (pos != field("time").size()) fail("bad time '" + field("time") + "'");
      const auto& ev = field("event");
      if (ev == "1" || ev == "true") o.event = true;
      else if (ev == "0" || ev == "false") o.event = false;
      else fail("event must be 0 or 1, got '" + ev + "'");
      o.rank = col.contains("rank") ? std::stoi(field("rank")) : 1;
      o.cycle = col.contains("cycle") ? std::stoi(field("cycle")) : ++next_cycle[o.rank];
    } catch (const std::logic_error&) {
      fail("unparseable number");
    }
    try {
      detail::validate(o);
    } catch (const Error& e) {
      fail(e.what());
    }
    sample.set_size_k = std::max(sample.set_size_k, o.rank);
    sample.cycles_m = std::max(sample.cycles_m, o.cycle);
    sample.observations.push_back(o);
  }
  if (sample.observations.empty()) throw EmptySampleError(source + ": no observations");
  return sample;
}

inline void write_observations_csv(std::ostream& out, const RankedSetSample& sample) {
  out << "cycle,rank,time,event\n";
  for (const auto& o : sample.observations) {
    out << o.cycle << ',' << o.rank << ',' << detail::fmt_full(o.time) << ',' << (o.event ? 1 : 0)
        << '\n';
  }
}

inline void write_curve_csv_header(std::ostream& out) {
  out << "rank,time,survival,greenwood_var,cum_hazard,hazard_var\n";
}

/// Curve rows at its jump times, tagged with `rank` (0 = RSS average).
inline void write_curve_rows(std::ostream& out, const StepSurvivalCurve& c, int rank) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << rank << ',' << detail::fmt_full(c.jump_times[i]) << ','
        << detail::fmt_full(c.survival[i]) << ',' << detail::fmt_full(c.greenwood_var[i]) << ','
        << detail::fmt_full(c.cum_hazard[i]) << ',' << detail::fmt_full(c.hazard_var[i]) << '\n';
  }
}

/// Per-rank curves followed by the rank-average rows (rank 0).
inline void write_rss_csv(std::ostream& out, const RssSurvivalEstimate& est) {
  write_curve_csv_header(out);
  for (std::size_t r = 0; r < est.rank_curves.size(); ++r) {
    write_curve_rows(out, est.rank_curves[r], static_cast<int>(r + 1));
  }
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    out << 0 << ',' << detail::fmt_full(est.grid[i]) << ','
        << detail::fmt_full(est.rss_survival[i]) << ',' << detail::fmt_full(est.rss_greenwood[i])
        << ',' << detail::fmt_full(est.rss_cum_hazard[i]) << ','
        << detail::fmt_full(est.rss_hazard_var[i]) << '\n';
  }
}

inline void write_bootstrap_csv(std::ostream& out, const BootstrapResult& res) {
  out << "t,point_estimate,greenwood_var,bootstrap_var,n_excluded_reps\n";
  for (std::size_t i = 0; i < res.t_grid.size(); ++i) {
    out << detail::fmt_full(res.t_grid[i]) << ',' << detail::fmt_full(res.point_estimate[i])
        << ',' << detail::fmt_full(res.greenwood_var[i]) << ','
        << detail::fmt_full(res.bootstrap_var[i]) << ',' << res.n_excluded[i] << '\n';
  }
}

} // namespace rsskm

#endif // RSSKM_CSV_IO_HPP
