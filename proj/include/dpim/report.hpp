#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dpim/error.hpp"
#include "dpim/harness.hpp"

namespace dpim {

/// One CSV row: a grid point with optional simulation and bound values.
struct SweepRow {
  double snr_db = 0.0;
  Scheme scheme = Scheme::dpim;
  Detector detector = Detector::otd;
  bool coded = false;
  std::optional<BerEstimate> sim;
  BoundPair bounds;
  std::size_t packets = 0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kCsvHeader =
    "snr_db,scheme,detector,coded,ber_sim,ci,per_sim,ber_bound_exact,ber_bound_tractable,packets,seed";

/// Shortest round-trip-safe text: 17 significant digits.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

inline void write_csv_row(std::ostream& os, const SweepRow& r) {
  os << format_double(r.snr_db) << ',' << to_string(r.scheme) << ',' << to_string(r.detector) << ','
     << (r.coded ? 1 : 0) << ',';
  if (r.sim) {
    os << format_double(r.sim->ber()) << ',' << format_double(r.sim->ci_halfwidth()) << ','
       << format_double(r.sim->per()) << ',';
  } else {
    os << ",,,";
  }
  os << format_optional(r.bounds.exact) << ',' << format_optional(r.bounds.tractable) << ',' << r.packets << ','
     << r.seed << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) write_csv_row(os, r);
}

inline std::string csv_string(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

/// Writes header plus rows to `path`.
inline void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  require(!rows.empty(), "no rows to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file: " + path);
  write_csv(out, rows);
  out.flush();
  if (!out) throw ConfigError("failed writing output file: " + path);
}

/// Runs one configuration: Monte Carlo when `simulate`, bound columns when
/// `bounds`. Bounds-only rows leave the simulation columns empty and report
/// zero packets.
inline std::vector<SweepRow> run_sweep(const RunConfig& config, bool simulate, bool bounds) {
  config.validate();
  std::vector<SweepRow> rows;
  std::optional<LinkSimulator> sim;
  if (simulate) sim.emplace(config);
  for (std::size_t i = 0; i < config.snr_db.size(); ++i) {
    SweepRow r;
    r.snr_db = config.snr_db[i];
    r.scheme = config.scheme;
    r.detector = config.detector;
    r.coded = config.coded;
    r.seed = config.seed;
    if (sim) {
      r.sim = simulate_point(*sim, i, r.snr_db, config.packets);
      r.packets = config.packets;
    }
    if (bounds) r.bounds = evaluate_bounds(config, r.snr_db);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dpim
