// Sends one BDPIM packet through an AWGN channel, detects it two ways and
// prints the bound for the same operating point.

#include <cstdio>
#include <vector>

#include "dpim/dpim.hpp"

int main() {
  const dpim::ModulationSpec spec(4, 1);
  const auto barrier = dpim::BarrierSpec::from_low(10, 1.0, 0.86);
  const double snr_db = 14.0;

  auto rng = dpim::make_engine(7, 0, 0);
  dpim::Bits bits(200);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);

  const auto frame = dpim::map_bdpim(bits, spec, barrier);
  const auto state = dpim::ChannelState::from_snr_db(snr_db);
  const auto y = dpim::apply_awgn(frame.chips, state, rng);

  const auto sorted = dpim::bdpim_osd_detect(y, frame.symbols, barrier);
  const double threshold = dpim::bdpim_otd_threshold(barrier, state.h, state.sigma_n);
  const auto streamed = dpim::bdpim_otd_osd_detect(y, threshold, barrier, spec, frame.symbols);

  auto errors = [&](const dpim::DetectionResult& d) {
    const auto out = dpim::demap_dpim(d.chips, spec, frame.symbols, dpim::IntervalPolicy::one_per_pulse);
    int n = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) n += out.bits[i] != bits[i];
    return n;
  };

  const auto in = dpim::BoundInput::at_snr(spec, 100, snr_db).with_barrier(barrier);
  std::printf("chips %zu, SNR %.1f dB\n", frame.chips.size(), snr_db);
  std::printf("two-phase OSD     bit errors %d\n", errors(sorted));
  std::printf("threshold + OSD   bit errors %d\n", errors(streamed));
  std::printf("bound (sorting)   %.3e\n", dpim::ber_bound_bdpim_osd(in, dpim::BoundMode::exact).value);
  std::printf("bound (streaming) %.3e\n", dpim::ber_bound_bdpim_otd_osd(in, dpim::BoundMode::exact).value);
}
