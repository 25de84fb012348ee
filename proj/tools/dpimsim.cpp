// dpimsim: Monte Carlo sweeps, bound tables, barrier optimization and
// sweep presets for DPIM/BDPIM links.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dpim/dpim.hpp"

namespace {

struct Options {
  std::string scheme = "dpim";
  std::string detector;
  int order = 4;
  int guard = 1;
  int period = 10;
  std::string low = "0.86";
  int symbols = 100;
  double snr_start = 0.0;
  double snr_stop = 20.0;
  double snr_step = 1.0;
  std::size_t packets = 100000;
  std::uint64_t seed = 1;
  bool coded = false;
  std::string channel = "awgn";
  std::string out;
  unsigned workers = 1;
  double alpha = dpim::kDefaultAlpha;
  // optimize / fig10
  std::vector<int> periods;
  bool thresholds = false;
  double target = 1e-3;
  double window_lo = 10.0;
  double window_hi = 22.0;
  std::string preset;
};

void add_common(CLI::App* cmd, Options& o, std::vector<CLI::Option*>& grid_flags) {
  cmd->add_option("--scheme", o.scheme, "dpim | bdpim | ppm | mdpim")
      ->check(CLI::IsMember({"dpim", "bdpim", "ppm", "mdpim"}));
  cmd->add_option("--detector", o.detector, "otd | osd | mlsd | bdpim-osd | bdpim-otd-osd")
      ->check(CLI::IsMember({"otd", "osd", "mlsd", "bdpim-osd", "bdpim-otd-osd"}));
  cmd->add_option("--M", o.order, "modulation order");
  cmd->add_option("--g", o.guard, "guard chips");
  cmd->add_option("--K", o.period, "barrier period");
  cmd->add_option("--AL", o.low, "BDPIM low amplitude, or 'auto'");
  cmd->add_option("--Ns", o.symbols, "symbols per packet");
  grid_flags.push_back(cmd->add_option("--snr-start", o.snr_start, "first SNR in dB"));
  grid_flags.push_back(cmd->add_option("--snr-stop", o.snr_stop, "last SNR in dB"));
  grid_flags.push_back(cmd->add_option("--snr-step", o.snr_step, "SNR step in dB"));
  cmd->add_option("--packets", o.packets, "packets per SNR point");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_flag("--coded", o.coded, "rate-1/2 convolutional code with block interleaving");
  cmd->add_option("--channel", o.channel, "awgn | gg:lambda,mu");
  cmd->add_option("--out", o.out, "CSV output path (stdout when omitted)");
  cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", o.alpha, "order-statistic scaling for tractable bounds");
}

dpim::RunConfig to_config(const Options& o, bool with_grid) {
  dpim::RunConfig c;
  c.scheme = *dpim::parse_scheme(o.scheme);
  std::string det = o.detector;
  if (det.empty()) det = c.scheme == dpim::Scheme::bdpim ? "bdpim-osd" : "otd";
  c.detector = *dpim::parse_detector(det);
  c.order = o.order;
  c.guard = o.guard;
  c.period = o.period;
  c.symbols = o.symbols;
  if (o.low != "auto") {
    try {
      std::size_t used = 0;
      c.low = std::stod(o.low, &used);
      if (used != o.low.size()) throw std::invalid_argument(o.low);
    } catch (const std::logic_error&) {
      throw dpim::ConfigError("--AL must be a number or 'auto'");
    }
  }
  if (with_grid) c.snr_db = dpim::RunConfig::grid(o.snr_start, o.snr_stop, o.snr_step);
  c.packets = o.packets;
  c.seed = o.seed;
  c.coded = o.coded;
  c.channel = dpim::ChannelModel::parse(o.channel);
  c.workers = o.workers;
  c.alpha = o.alpha;
  return c;
}

// Replaces A_L by its optimized value when requested.
void resolve_low(dpim::RunConfig& c, const Options& o) {
  if (o.low == "auto" && c.scheme == dpim::Scheme::bdpim) c.low = dpim::optimize_barrier_auto(c).barrier.low;
}

void write_output(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
  if (!f) throw dpim::ConfigError("cannot open output file: " + o.out);
  f << text;
  if (!f.flush()) throw dpim::ConfigError("failed writing output file: " + o.out);
}

std::string run_sweeps(const std::vector<dpim::RunConfig>& configs, const Options& o, bool simulate, bool bounds) {
  std::vector<dpim::SweepRow> rows;
  for (auto c : configs) {
    resolve_low(c, o);
    auto part = dpim::run_sweep(c, simulate, bounds);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return dpim::csv_string(rows);
}

std::string run_study(const dpim::RunConfig& base, const std::vector<int>& periods, const Options& o,
                      bool thresholds) {
  const auto rows = dpim::period_study(base, periods, thresholds, o.target, o.window_lo, o.window_hi);
  std::ostringstream os;
  dpim::write_study_csv(os, rows, base.packets, base.seed);
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DPIM/BDPIM link simulator"};
  app.require_subcommand(1);
  Options o;
  std::vector<CLI::Option*> grid_flags;

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sweep with bound columns");
  auto* bounds = app.add_subcommand("bounds", "evaluate the packet BER bounds over an SNR grid");
  auto* optimize = app.add_subcommand("optimize", "optimize A_L for each barrier period");
  auto* sweep = app.add_subcommand("sweep", "preset sweeps");
  for (auto* cmd : {simulate, bounds, optimize, sweep}) add_common(cmd, o, grid_flags);

  for (auto* cmd : {optimize, sweep}) {
    cmd->add_option("--K-list", o.periods, "barrier periods to study")->delimiter(',');
    cmd->add_option("--target", o.target, "BER for the SNR threshold");
    cmd->add_option("--window-lo", o.window_lo, "lower end of the threshold search window (dB)");
    cmd->add_option("--window-hi", o.window_hi, "upper end of the threshold search window (dB)");
  }
  optimize->add_flag("--thresholds", o.thresholds, "also search the SNR threshold for each K");
  std::vector<std::string> names;
  for (auto n : dpim::preset_names()) names.emplace_back(n);
  sweep->add_option("preset", o.preset, "fig4 ... fig11, mlsd")->required()->check(CLI::IsMember(names));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::string text;
    if (simulate->parsed()) {
      text = run_sweeps({to_config(o, true)}, o, true, true);
    } else if (bounds->parsed()) {
      text = run_sweeps({to_config(o, true)}, o, false, true);
    } else if (optimize->parsed()) {
      auto base = to_config(o, true);
      base.scheme = dpim::Scheme::bdpim;
      if (base.detector != dpim::Detector::bdpim_otd_osd) base.detector = dpim::Detector::bdpim_osd;
      const auto periods = o.periods.empty() ? std::vector<int>{base.period} : o.periods;
      text = run_study(base, periods, o, o.thresholds);
    } else {
      bool user_grid = false;
      for (auto* f : grid_flags) user_grid = user_grid || f->count() > 0;
      const auto base = to_config(o, user_grid);
      const auto preset = dpim::make_preset(o.preset, base);
      if (preset.period_study) {
        const auto periods = o.periods.empty() ? preset.periods : o.periods;
        std::string all;
        for (const auto& run : preset.runs) {
          auto part = run_study(run, periods, o, true);
          if (!all.empty()) part.erase(0, part.find('\n') + 1);
          all += part;
        }
        text = all;
      } else {
        text = run_sweeps(preset.runs, o, true, true);
      }
    }
    write_output(o, text);
  } catch (const dpim::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const dpim::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
