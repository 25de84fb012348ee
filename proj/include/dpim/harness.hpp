#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dpim/bounds.hpp"
#include "dpim/channel.hpp"
#include "dpim/coding.hpp"
#include "dpim/detect.hpp"
#include "dpim/error.hpp"
#include "dpim/random.hpp"
#include "dpim/signal.hpp"

namespace dpim {

enum class Detector { otd, osd, mlsd, bdpim_osd, bdpim_otd_osd };

inline std::string_view to_string(Detector d) {
  switch (d) {
    case Detector::otd: return "otd";
    case Detector::osd: return "osd";
    case Detector::mlsd: return "mlsd";
    case Detector::bdpim_osd: return "bdpim-osd";
    case Detector::bdpim_otd_osd: return "bdpim-otd-osd";
  }
  return "?";
}

inline std::optional<Detector> parse_detector(std::string_view s) {
  for (auto d : {Detector::otd, Detector::osd, Detector::mlsd, Detector::bdpim_osd, Detector::bdpim_otd_osd})
    if (to_string(d) == s) return d;
  return std::nullopt;
}

struct ChannelModel {
  enum class Kind { awgn, gamma_gamma } kind = Kind::awgn;
  TurbulenceSpec turbulence{};

  static ChannelModel awgn() { return {}; }
  static ChannelModel gamma_gamma(double lambda, double mu) { return {Kind::gamma_gamma, {lambda, mu}}; }

  /// "awgn" or "gg:<lambda>,<mu>".
  static ChannelModel parse(std::string_view s) {
    if (s == "awgn") return awgn();
    if (s.substr(0, 3) == "gg:") {
      const std::string body(s.substr(3));
      const auto comma = body.find(',');
      require(comma != std::string::npos, "gamma-gamma channel must be given as gg:lambda,mu");
      try {
        std::size_t used_l = 0, used_m = 0;
        const double lambda = std::stod(body.substr(0, comma), &used_l);
        const double mu = std::stod(body.substr(comma + 1), &used_m);
        require(used_l == comma && used_m == body.size() - comma - 1, "malformed gamma-gamma parameters");
        auto m = gamma_gamma(lambda, mu);
        m.turbulence.validate();
        return m;
      } catch (const std::logic_error&) {
        throw ConfigError("malformed gamma-gamma parameters: " + body);
      }
    }
    throw ConfigError("unknown channel: " + std::string(s));
  }

  std::string label() const {
    if (kind == Kind::awgn) return "awgn";
    char buf[64];
    std::snprintf(buf, sizeof buf, "gg:%g,%g", turbulence.lambda, turbulence.mu);
    return buf;
  }
};

/// One Monte Carlo / bound sweep.
struct RunConfig {
  Scheme scheme = Scheme::dpim;
  Detector detector = Detector::otd;
  int order = 4;               // M
  int guard = 1;               // g
  int period = 10;             // K
  double amplitude = 1.0;      // A: DPIM/PPM pulse height, BDPIM average
  double low = 0.86;           // A_L
  int symbols = 100;           // N_s
  std::vector<double> snr_db;
  std::size_t packets = 100000;
  std::uint64_t seed = 1;
  bool coded = false;
  ChannelModel channel{};
  unsigned workers = 1;
  double alpha = kDefaultAlpha;
  std::size_t interleaver_depth = 0;  // 0: K·log2(M)
  double mlsd_cap = kDefaultEnumerationCap;

  ModulationSpec modulation() const { return ModulationSpec(order, guard); }
  BarrierSpec barrier() const { return BarrierSpec::from_low(period, amplitude, low); }
  std::size_t depth() const {
    return interleaver_depth > 0 ? interleaver_depth
                                 : static_cast<std::size_t>(period) * modulation().bits_per_symbol();
  }
  std::size_t payload_bits() const { return static_cast<std::size_t>(symbols) * modulation().bits_per_symbol(); }
  std::size_t info_bits() const { return coded ? ConvCodeSpec::info_length(payload_bits()) : payload_bits(); }

  /// Evenly spaced grid; the endpoint is included when it lies on the grid.
  static std::vector<double> grid(double start, double stop, double step) {
    require(step > 0.0, "SNR step must be positive");
    require(stop >= start, "SNR stop must not precede start");
    std::vector<double> g;
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= count; ++i) g.push_back(start + static_cast<double>(i) * step);
    return g;
  }

  void validate() const {
    require(!snr_db.empty(), "SNR grid must not be empty");
    for (double s : snr_db) require(std::isfinite(s), "SNR values must be finite");
    validate_link();
  }

  /// Everything except the SNR grid.
  void validate_link() const {
    const auto spec = modulation();  // validates M and g
    require(packets >= 1, "packets must be >= 1");
    require(symbols >= 1, "N_s must be >= 1");
    require(amplitude > 0.0, "amplitude must be positive");
    require(workers >= 1, "workers must be >= 1");
    require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    if (channel.kind == ChannelModel::Kind::gamma_gamma) channel.turbulence.validate();
    switch (scheme) {
      case Scheme::dpim:
        require(detector == Detector::otd || detector == Detector::osd || detector == Detector::mlsd,
                "DPIM supports the otd, osd and mlsd detectors");
        break;
      case Scheme::bdpim:
        require(detector == Detector::bdpim_osd || detector == Detector::bdpim_otd_osd,
                "BDPIM supports the bdpim-osd and bdpim-otd-osd detectors");
        barrier().validate();
        require(symbols % period == 0, "BDPIM needs N_s divisible by K");
        break;
      case Scheme::ppm:
        require(detector == Detector::otd || detector == Detector::osd, "PPM supports the otd and osd detectors");
        break;
      case Scheme::mdpim:
        require(detector == Detector::otd, "MDPIM supports the otd detector");
        require(spec.order() >= 4, "MDPIM needs M >= 4");
        break;
      case Scheme::dhpim:
        throw ConfigError("DHPIM is available as a mapper only");
    }
    if (coded) {
      require(payload_bits() % 2 == 0 && payload_bits() >= 2 * (ConvCodeSpec::kTailBits + 1),
              "coded packets need an even payload of at least 6 bits");
      require(payload_bits() % depth() == 0, "coded payload must be a multiple of the interleaver depth");
    }
  }
};

/// Counters for one SNR point. All sums are integers so that any split of
/// the packet range reduces to the same totals.
struct BerEstimate {
  double snr_db = 0.0;
  std::uint64_t packets = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_total = 0;
  std::uint64_t packet_errors = 0;
  std::uint64_t bit_error_squares = 0;  // Σ (errors per packet)^2
  std::uint64_t chips_total = 0;
  std::uint64_t flagged_packets = 0;    // detector/demapper reported a repair

  double ber() const { return bits_total ? static_cast<double>(bit_errors) / static_cast<double>(bits_total) : 0.0; }
  double per() const { return packets ? static_cast<double>(packet_errors) / static_cast<double>(packets) : 0.0; }
  double mean_chips() const { return packets ? static_cast<double>(chips_total) / static_cast<double>(packets) : 0.0; }

  /// 95% half-width of the BER from the spread of per-packet error counts,
  /// so bursty packets widen the interval.
  double ci_halfwidth() const {
    if (packets < 2 || bits_total == 0) return 0.0;
    const double n = static_cast<double>(packets);
    const double sum = static_cast<double>(bit_errors);
    const double var = std::max(0.0, (static_cast<double>(bit_error_squares) - sum * sum / n) / (n - 1.0));
    const double bits_per_packet = static_cast<double>(bits_total) / n;
    return 1.96 * std::sqrt(var / n) / bits_per_packet;
  }

  BerEstimate& operator+=(const BerEstimate& o) {
    packets += o.packets;
    bit_errors += o.bit_errors;
    bits_total += o.bits_total;
    packet_errors += o.packet_errors;
    bit_error_squares += o.bit_error_squares;
    chips_total += o.chips_total;
    flagged_packets += o.flagged_packets;
    return *this;
  }
};

/// Outcome of one packet through the full chain.
struct PacketOutcome {
  std::size_t bit_errors = 0;
  std::size_t bits = 0;
  std::size_t chips = 0;
  bool flagged = false;
};

/// Pre-computed per-run constants and the per-packet chain.
class LinkSimulator {
 public:
  explicit LinkSimulator(RunConfig config) : cfg_(std::move(config)), spec_(cfg_.modulation()) {
    cfg_.validate_link();
    if (cfg_.scheme == Scheme::bdpim) barrier_ = cfg_.barrier();
    if (cfg_.scheme == Scheme::mdpim) levels_ = mdpim_levels(spec_, cfg_.amplitude);
    if (cfg_.scheme == Scheme::ppm) levels_.peak = cfg_.amplitude;
  }

  const RunConfig& config() const { return cfg_; }

  /// Pulse-count-exact detectors map one symbol per detected pulse.
  IntervalPolicy demap_policy() const {
    return cfg_.detector == Detector::otd ? IntervalPolicy::greedy_split : IntervalPolicy::one_per_pulse;
  }

  template <class Rng>
  PacketOutcome run_packet(double snr_db, Rng& rng) const {
    const std::size_t info = cfg_.info_bits();
    Bits bits(info);
    for (std::size_t i = 0; i < info; i += 64) {
      const std::uint64_t word = rng();
      for (std::size_t j = 0; j < 64 && i + j < info; ++j) bits[i + j] = static_cast<std::uint8_t>((word >> j) & 1);
    }
    const InterleaverSpec il{cfg_.depth()};
    const Bits payload = cfg_.coded ? interleave(conv_encode(bits), il) : bits;

    const ChipFrame frame = map(payload);
    double h = 1.0;
    if (cfg_.channel.kind == ChannelModel::Kind::gamma_gamma) h = gamma_gamma_sample(cfg_.channel.turbulence, rng);
    const auto state = ChannelState::from_snr_db(snr_db, cfg_.amplitude, h);
    std::vector<double> y;
    apply_awgn(frame.chips, state, rng, y);

    PacketOutcome out;
    out.chips = frame.chips.size();
    const auto det = detect(y, state);
    auto dem = demap(det.chips);
    out.flagged = det.flags.any() || dem.flagged();
    Bits decoded = cfg_.coded ? viterbi_decode(deinterleave(dem.bits, il)) : std::move(dem.bits);
    out.bits = info;
    for (std::size_t i = 0; i < info; ++i) out.bit_errors += decoded[i] != bits[i];
    return out;
  }

  ChipFrame map(const Bits& payload) const {
    switch (cfg_.scheme) {
      case Scheme::dpim: return map_dpim(payload, spec_, cfg_.amplitude);
      case Scheme::bdpim: return map_bdpim(payload, spec_, barrier_);
      default: return map_baseline(cfg_.scheme, payload, spec_, levels_);
    }
  }

  DetectionResult detect(std::span<const double> y, const ChannelState& state) const {
    const double gamma = state.gamma(cfg_.amplitude);
    const auto ns = static_cast<std::size_t>(cfg_.symbols);
    switch (cfg_.scheme) {
      case Scheme::dpim:
        if (cfg_.detector == Detector::otd) {
          const double at = otd_threshold(cfg_.amplitude, state.h, gamma, spec_.avg_symbol_duration());
          return otd_detect(y, {state.h * at, cfg_.amplitude});
        }
        if (cfg_.detector == Detector::mlsd) return mlsd_exhaustive(y, state.h, ns, cfg_.amplitude, cfg_.mlsd_cap);
        return osd_detect(y, ns, cfg_.amplitude);
      case Scheme::bdpim:
        if (cfg_.detector == Detector::bdpim_osd) return bdpim_osd_detect(y, ns, barrier_);
        return bdpim_otd_osd_detect(y, state.h * bdpim_otd_threshold(barrier_, state.h, state.sigma_n), barrier_,
                                    spec_, ns);
      case Scheme::ppm:
        if (cfg_.detector == Detector::osd) return ppm_osd_detect(y, spec_, cfg_.amplitude);
        return otd_detect(y, {state.h * otd_threshold(cfg_.amplitude, state.h, gamma, spec_.order()),
                              cfg_.amplitude});
      case Scheme::mdpim: return mdpim_otd_detect(y, levels_, spec_, state.h, state.sigma_n);
      default: throw ConfigError("unsupported scheme");
    }
  }

  Demapped demap(std::span<const double> chips) const {
    const auto ns = static_cast<std::size_t>(cfg_.symbols);
    switch (cfg_.scheme) {
      case Scheme::ppm: return demap_ppm(chips, spec_, ns);
      case Scheme::mdpim: return demap_mdpim(chips, spec_, 0.5 * (levels_.low + levels_.high), ns);
      default: return demap_dpim(chips, spec_, ns, demap_policy());
    }
  }

 private:
  RunConfig cfg_;
  ModulationSpec spec_;
  BarrierSpec barrier_{};
  BaselineLevels levels_{};
};

inline constexpr std::size_t kPacketChunk = 256;

/// Packets [first, last) of SNR point `index`, each on its own derived stream.
inline BerEstimate simulate_range(const LinkSimulator& sim, std::size_t index, double snr_db, std::size_t first,
                                  std::size_t last) {
  BerEstimate acc;
  acc.snr_db = snr_db;
  for (std::size_t p = first; p < last; ++p) {
    auto rng = make_engine(sim.config().seed, index, p);
    const auto o = sim.run_packet(snr_db, rng);
    ++acc.packets;
    acc.bit_errors += o.bit_errors;
    acc.bits_total += o.bits;
    acc.packet_errors += o.bit_errors > 0;
    acc.bit_error_squares += static_cast<std::uint64_t>(o.bit_errors) * o.bit_errors;
    acc.chips_total += o.chips;
    acc.flagged_packets += o.flagged;
  }
  return acc;
}

/// One SNR point with `packets` packets spread over the configured workers.
inline BerEstimate simulate_point(const LinkSimulator& sim, std::size_t index, double snr_db, std::size_t packets) {
  const unsigned workers = std::max(1u, sim.config().workers);
  BerEstimate total;
  total.snr_db = snr_db;
  if (workers == 1 || packets <= kPacketChunk) {
    total += simulate_range(sim, index, snr_db, 0, packets);
    return total;
  }
  std::atomic<std::size_t> next{0};
  std::mutex merge;
  std::exception_ptr failure;
  auto work = [&] {
    try {
      BerEstimate local;
      while (true) {
        const std::size_t first = next.fetch_add(kPacketChunk);
        if (first >= packets) break;
        local += simulate_range(sim, index, snr_db, first, std::min(packets, first + kPacketChunk));
      }
      std::lock_guard lock(merge);
      total += local;
    } catch (...) {
      std::lock_guard lock(merge);
      if (!failure) failure = std::current_exception();
      next.store(packets);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return total;
}

/// Monte Carlo sweep over the configured SNR grid.
inline std::vector<BerEstimate> run_monte_carlo(const RunConfig& config) {
  const LinkSimulator sim(config);
  std::vector<BerEstimate> out;
  for (std::size_t i = 0; i < config.snr_db.size(); ++i)
    out.push_back(simulate_point(sim, i, config.snr_db[i], config.packets));
  return out;
}

/// Packet-level bound paired with a scheme/detector, if the analysis covers it.
inline std::optional<BoundKind> bound_kind(const RunConfig& c) {
  if (c.coded) return std::nullopt;
  if (c.scheme == Scheme::dpim) return c.detector == Detector::otd ? BoundKind::dpim_otd : BoundKind::dpim_osd;
  if (c.scheme == Scheme::bdpim)
    return c.detector == Detector::bdpim_osd ? BoundKind::bdpim_osd : BoundKind::bdpim_otd_osd;
  return std::nullopt;
}

struct BoundPair {
  std::optional<double> exact;
  std::optional<double> tractable;
};

/// Bound columns at one SNR; averaged over the fading density for
/// Gamma-Gamma channels.
inline BoundPair evaluate_bounds(const RunConfig& c, double snr_db) {
  BoundPair out;
  const auto kind = bound_kind(c);
  if (!kind) return out;
  auto in = BoundInput::at_snr(c.modulation(), c.symbols, snr_db, 1.0, c.amplitude);
  in.alpha = c.alpha;
  if (c.scheme == Scheme::bdpim) in = in.with_barrier(c.barrier());
  for (auto mode : {BoundMode::exact, BoundMode::tractable}) {
    if (*kind == BoundKind::dpim_otd && mode == BoundMode::tractable) continue;
    double value;
    if (c.channel.kind == ChannelModel::Kind::gamma_gamma) {
      value = ergodic_bound([&](double h) { return evaluate_bound(*kind, in.with_h(h), mode)->value; },
                            c.channel.turbulence)
                  .value;
    } else {
      value = evaluate_bound(*kind, in, mode)->value;
    }
    (mode == BoundMode::exact ? out.exact : out.tractable) = value;
  }
  return out;
}

}  // namespace dpim
