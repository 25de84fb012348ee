#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dpim/bounds.hpp"
#include "dpim/harness.hpp"
#include "dpim/optimize.hpp"
#include "dpim/report.hpp"

namespace dpim {

/// Operating points for barrier optimization: the bound objective is
/// evaluated near the uncoded 1e-3 threshold, the Monte Carlo objective near
/// the coded one.
inline constexpr double kUncodedOperatingSnrDb = 17.0;
inline constexpr double kCodedOperatingSnrDb = 15.5;
inline constexpr std::size_t kCodedObjectivePackets = 4000;

/// Monte Carlo BER probe with common random numbers: every call replays the
/// same bits and unit-variance noise draws, only the SNR changes.
inline ThresholdProbe probe_ber(const RunConfig& config, double snr_db, std::size_t packets) {
  const LinkSimulator sim(config);
  const auto est = simulate_point(sim, 0, snr_db, packets);
  return {snr_db, est.ber(), est.ci_halfwidth()};
}

/// A_L minimizing the exact packet bound of the configured BDPIM detector at
/// `snr_db`.
inline BarrierOptimum optimize_barrier_bound(const RunConfig& config, double snr_db, double tol = 1e-3) {
  require(config.scheme == Scheme::bdpim, "barrier optimization needs the BDPIM scheme");
  const auto base = BoundInput::at_snr(config.modulation(), config.symbols, snr_db, 1.0, config.amplitude);
  const auto kind = config.detector == Detector::bdpim_otd_osd ? BoundKind::bdpim_otd_osd : BoundKind::bdpim_osd;
  return optimize_barrier(config.period, config.amplitude, [&](const BarrierSpec& b) {
    return evaluate_bound(kind, base.with_barrier(b), BoundMode::exact)->value;
  }, tol);
}

/// A_L minimizing Monte Carlo BER at `snr_db` (used for coded links).
inline BarrierOptimum optimize_barrier_mc(const RunConfig& config, double snr_db, std::size_t packets,
                                          double tol = 2e-3) {
  require(config.scheme == Scheme::bdpim, "barrier optimization needs the BDPIM scheme");
  return optimize_barrier(config.period, config.amplitude, [&](const BarrierSpec& b) {
    RunConfig c = config;
    c.low = b.low;
    return probe_ber(c, snr_db, packets).ber;
  }, tol);
}

/// Bound objective for uncoded links, Monte Carlo for coded ones.
inline BarrierOptimum optimize_barrier_auto(const RunConfig& config) {
  return config.coded ? optimize_barrier_mc(config, kCodedOperatingSnrDb, kCodedObjectivePackets)
                      : optimize_barrier_bound(config, kUncodedOperatingSnrDb);
}

inline ThresholdResult find_snr_threshold(const RunConfig& config, double target, double lo_db, double hi_db,
                                          double min_window_db = kThresholdWindowDb) {
  return snr_threshold_search([&](double snr) { return probe_ber(config, snr, config.packets); }, target, lo_db,
                              hi_db, min_window_db);
}

/// One row of a barrier-period study.
struct PeriodStudyRow {
  int period = 0;
  bool coded = false;
  BarrierOptimum optimum;
  std::optional<ThresholdResult> threshold;
};

/// For each K: optimize A_L, then (when `thresholds`) search the SNR at
/// which BER reaches `target` inside [lo_db, hi_db].
inline std::vector<PeriodStudyRow> period_study(const RunConfig& base, const std::vector<int>& periods,
                                                bool thresholds, double target, double lo_db, double hi_db) {
  std::vector<PeriodStudyRow> rows;
  for (int k : periods) {
    RunConfig c = base;
    c.period = k;
    PeriodStudyRow row;
    row.period = k;
    row.coded = c.coded;
    row.optimum = optimize_barrier_auto(c);
    c.low = row.optimum.barrier.low;
    if (thresholds) row.threshold = find_snr_threshold(c, target, lo_db, hi_db);
    rows.push_back(row);
  }
  return rows;
}

inline constexpr const char* kStudyHeader = "K,coded,A_L,A_H,objective,snr_threshold_db,resolved,packets,seed";

inline void write_study_csv(std::ostream& os, const std::vector<PeriodStudyRow>& rows, std::size_t packets,
                            std::uint64_t seed) {
  os << kStudyHeader << '\n';
  for (const auto& r : rows) {
    os << r.period << ',' << (r.coded ? 1 : 0) << ',' << format_double(r.optimum.barrier.low) << ','
       << format_double(r.optimum.barrier.high) << ',' << format_double(r.optimum.objective) << ',';
    if (r.threshold) os << format_double(r.threshold->snr_db) << ',' << (r.threshold->resolved ? 1 : 0);
    else os << ',';
    os << ',' << packets << ',' << seed << '\n';
  }
}

/// Sweep presets.
struct Preset {
  std::string name;
  std::vector<RunConfig> runs;
  bool period_study = false;
  std::vector<int> periods;
};

inline const std::vector<std::string_view>& preset_names() {
  static const std::vector<std::string_view> names = {"fig4", "fig5", "fig6", "fig7", "fig8",
                                                      "fig9", "fig10", "fig11", "mlsd"};
  return names;
}

inline RunConfig preset_run(const RunConfig& base, Scheme scheme, Detector detector, bool coded = false) {
  RunConfig c = base;
  c.scheme = scheme;
  c.detector = detector;
  c.coded = coded;
  return c;
}

/// Builds a preset. Packet count, seed, workers, A_L and (when non-empty)
/// the SNR grid come from `base`.
inline Preset make_preset(std::string_view name, RunConfig base) {
  Preset p;
  p.name = std::string(name);
  if (base.snr_db.empty()) base.snr_db = RunConfig::grid(0.0, 20.0, 1.0);
  auto comparison = [&](bool coded) {
    return std::vector<RunConfig>{preset_run(base, Scheme::mdpim, Detector::otd, coded),
                                  preset_run(base, Scheme::dpim, Detector::otd, coded),
                                  preset_run(base, Scheme::dpim, Detector::osd, coded),
                                  preset_run(base, Scheme::bdpim, Detector::bdpim_osd, coded),
                                  preset_run(base, Scheme::bdpim, Detector::bdpim_otd_osd, coded)};
  };
  if (name == "fig4") {
    p.runs = {preset_run(base, Scheme::dpim, Detector::otd)};
  } else if (name == "fig5") {
    p.runs = {preset_run(base, Scheme::dpim, Detector::osd)};
  } else if (name == "fig6") {
    p.runs = {preset_run(base, Scheme::bdpim, Detector::bdpim_osd)};
  } else if (name == "fig7") {
    p.runs = {preset_run(base, Scheme::bdpim, Detector::bdpim_otd_osd)};
  } else if (name == "fig8") {
    p.runs = comparison(false);
  } else if (name == "fig9") {
    p.runs = comparison(true);
  } else if (name == "fig10") {
    p.period_study = true;
    p.periods = {5, 10, 20, 25, 50};
    p.runs = {preset_run(base, Scheme::bdpim, Detector::bdpim_osd, false),
              preset_run(base, Scheme::bdpim, Detector::bdpim_osd, true)};
  } else if (name == "fig11") {
    if (base.channel.kind != ChannelModel::Kind::gamma_gamma) base.channel = ChannelModel::gamma_gamma(11.6, 10.1);
    p.runs = comparison(false);
  } else if (name == "mlsd") {
    base.symbols = 4;
    p.runs = {preset_run(base, Scheme::dpim, Detector::otd), preset_run(base, Scheme::dpim, Detector::osd),
              preset_run(base, Scheme::dpim, Detector::mlsd)};
  } else {
    throw ConfigError("unknown preset: " + std::string(name));
  }
  for (auto& r : p.runs) r.validate();
  return p;
}

}  // namespace dpim
