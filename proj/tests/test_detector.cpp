// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "ssflood/detector.hpp"
#include "ssflood/phy.hpp"

using namespace ssflood;

namespace {

Waveform constant(std::size_t n, double power_w, double start = 0.0) {
  return Waveform{std::vector<Complex>(n, Complex(std::sqrt(power_w), 0.0)), 96e6, start};
}

}  // namespace

TEST_CASE("single buffer votes") {
  SimConfig c;
  CHECK(process_buffer(constant(10, dbm_to_watts(-80.0)), c).pulse);
  const auto zero = process_buffer(constant(10, 0.0), c);
  CHECK_FALSE(zero.pulse);
  CHECK(zero.retained == kComparatorValuesPerBuffer);
  CHECK_THROWS_AS(process_buffer(constant(11, 0.0), c), std::invalid_argument);
}

TEST_CASE("pure noise rarely fires") {
  SimConfig c;
  NoiseSource noise(c, 11);
  BufferProcessor bp(c);
  std::vector<Complex> buf(c.samples_per_buffer());
  std::size_t fired = 0;
  const std::size_t n = 200000;
  for (std::size_t b = 0; b < n; ++b) {
    noise.fill(static_cast<std::int64_t>(b * buf.size()), buf);
    fired += bp.process(buf).pulse ? 1 : 0;
  }
  CHECK(static_cast<double>(fired) / n <= 1e-3);
}

// One second of receiver noise, voted buffer by buffer. The reference builds
// the same process from first principles: white Gaussian samples scaled to
// the in-band level, a direct convolution, a zero-state per-buffer filter and
// a plain count. Samples within one buffer are strongly correlated by the
// 10 MHz band limit, so the rate is far above an independent-sample estimate.
TEST_CASE("false alarms over one second of noise agree with a reference process") {
  SimConfig c;
  const auto& lp = channel_filter(c);
  const std::size_t nb = c.samples_per_buffer();
  const std::size_t n_buffers = static_cast<std::size_t>(c.baseband_sample_rate_hz) / nb;

  NoiseSource noise(c, 2024);
  BufferProcessor bp(c);
  std::vector<Complex> buf(nb);
  std::size_t detector_hits = 0;
  for (std::size_t b = 0; b < n_buffers; ++b) {
    noise.fill(static_cast<std::int64_t>(b * nb), buf);
    detector_hits += bp.process(buf).pulse ? 1 : 0;
  }

  double h2 = 0.0;  // mean |H|^2 over the band, by direct summation
  const int grid = 4000;
  for (int i = 0; i <= grid; ++i) {
    const double f = -c.signal_bandwidth_hz / 2 + c.signal_bandwidth_hz * i / grid;
    Complex h{};
    for (std::size_t k = 0; k < lp.taps.size(); ++k)
      h += lp.taps[k] * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(k) / c.baseband_sample_rate_hz);
    h2 += std::norm(h) / (grid + 1);
  }
  const double sigma = std::sqrt(c.inband_noise_watts() * c.baseband_sample_rate_hz / (c.signal_bandwidth_hz * h2) / 2);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, sigma);
  const std::size_t nt = lp.taps.size();
  std::vector<Complex> white(nt - 1 + nb);
  for (auto& w : white) w = Complex(g(rng), g(rng));
  std::vector<Complex> coloured(nb), padded(nb + nt - 1);
  const double theta = c.detection_threshold();
  std::size_t reference_hits = 0;
  for (std::size_t b = 0; b < n_buffers; ++b) {
    for (std::size_t i = 0; i < nb; ++i) {
      Complex acc{};
      for (std::size_t k = 0; k < nt; ++k) acc += lp.taps[k] * white[i + nt - 1 - k];
      coloured[i] = acc;
    }
    std::copy(white.end() - static_cast<long>(nt - 1), white.end(), white.begin());
    for (std::size_t i = nt - 1; i < white.size(); ++i) white[i] = Complex(g(rng), g(rng));

    std::fill(padded.begin(), padded.end(), Complex{});
    std::copy(coloured.begin(), coloured.end(), padded.begin() + static_cast<long>(lp.group_delay));
    std::size_t above = 0;
    for (std::size_t i = 0; i < nb; ++i) {
      Complex acc{};
      for (std::size_t k = 0; k < nt; ++k) acc += lp.taps[k] * padded[i + nt - 1 - k];
      above += std::abs(acc) > theta ? 1 : 0;
    }
    reference_hits += 2 * above > nb ? 1 : 0;
  }
  MESSAGE("false alarms in 1 s: detector " << detector_hits << ", reference " << reference_hits << " of "
                                           << n_buffers << " buffers");
  const double a = static_cast<double>(detector_hits), r = static_cast<double>(reference_hits);
  CHECK(r > 0.0);
  CHECK(std::abs(a - r) <= 5.0 * std::sqrt(a + r));
}

TEST_CASE("raising the threshold never creates a pulse") {
  SimConfig c;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 2e-6);
  std::vector<Complex> buf(10);
  for (int trial = 0; trial < 2000; ++trial) {
    for (auto& s : buf) s = Complex(g(rng), g(rng));
    bool prev = true;
    for (double t = 1e-7; t < 1e-5; t *= 1.3) {
      const bool now = BufferProcessor(c, t).process(buf).pulse;
      CHECK((prev || !now));
      prev = now;
    }
  }
}

TEST_CASE("brute-force envelope oracle agrees on clean pulses") {
  SimConfig c;
  std::mt19937_64 rng(17);
  BufferProcessor bp(c);
  const std::size_t nb = c.samples_per_buffer();
  std::size_t compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto pc = oracle::random_pulse_case(rng, c);
    for (std::size_t b = 0; b < std::size_t(c.detections_per_window); ++b) {
      if (oracle::straddles(pc, b, nb, static_cast<long>(c.samples_per_pulse()))) continue;
      std::span<const Complex> s(pc.window.data() + b * nb, nb);
      CHECK(bp.process(s).pulse == oracle::envelope_vote(s, c.detection_threshold()));
      ++compared;
    }
  }
  CHECK(compared > 3000);
}

TEST_CASE("symbol decisions") {
  SimConfig c;
  const double start = 5e-6;
  const double buffer = c.buffer_duration_s;
  Waveform rx = constant(c.samples_per_window(), 0.0, start);

  SUBCASE("silence") {
    const auto d = detect_symbol(rx, c);
    CHECK(d.bit == 0);
    CHECK(d.decision_time_s == doctest::Approx(start + 1.875e-6));
    CHECK(d.buffers_evaluated == 18);
  }
  SUBCASE("pulse in buffer 0") {
    for (std::size_t i = 0; i < 20; ++i) rx.samples[i] = Complex(1e-5, 0);
    const auto d = detect_symbol(rx, c);
    CHECK(d.bit == 1);
    CHECK(d.buffer_index == 0);
    CHECK(d.decision_time_s == doctest::Approx(start + c.window_L_s / 18));
    CHECK(d.buffers_evaluated == 1);  // early termination
  }
  SUBCASE("pulse later in the window") {
    for (std::size_t i = 70; i < 90; ++i) rx.samples[i] = Complex(1e-5, 0);
    const auto d = detect_symbol(rx, c);
    CHECK(d.bit == 1);
    CHECK(d.buffer_index == 7);
    CHECK(d.buffers_evaluated == d.buffer_index + 1);
    CHECK(d.decision_time_s <= start + (d.buffer_index + 1) * buffer + 1e-15);
  }
  SUBCASE("pulse just after the window") {
    Waveform longer = constant(c.samples_per_window() + 40, 0.0, start);
    for (std::size_t i = 180; i < 200; ++i) longer.samples[i] = Complex(1e-5, 0);
    CHECK(detect_symbol(longer, c).bit == 0);
  }
}

TEST_CASE("preamble sync anchors to the end of the firing buffer") {
  SimConfig c;
  Waveform rx = constant(2000, 0.0, 0.0);
  CHECK_FALSE(detect_preamble(rx, c).has_value());
  const std::size_t t0 = 1234;
  for (std::size_t i = t0; i < t0 + 20; ++i) rx.samples[i] = Complex(1e-5, 0);
  const auto sync = detect_preamble(rx, c);
  REQUIRE(sync.has_value());
  // A pulse straddling a buffer edge is caught in the buffer holding t0 or
  // in the next one.
  CHECK(sync->buffer_index >= t0 / 10);
  CHECK(sync->buffer_index <= t0 / 10 + 1);
  CHECK(sync->sync_anchor_s == doctest::Approx((sync->buffer_index + 1) * c.buffer_duration_s));

  Waveform aligned = constant(2000, 0.0, 0.0);
  for (std::size_t i = 1230; i < 1250; ++i) aligned.samples[i] = Complex(1e-5, 0);
  const auto s2 = detect_preamble(aligned, c);
  REQUIRE(s2.has_value());
  CHECK(s2->sync_anchor_s == doctest::Approx(124 * c.buffer_duration_s));
}

TEST_CASE("receive clock after sync") {
  SimConfig c;
  const auto st = DetectorState::synced_at(3e-6, c);
  CHECK(st.symbol_index == 1);
  CHECK(st.symbol_start(1, c) == doctest::Approx(3e-6 - c.buffer_duration_s + c.symbol_interval_Ts_s));
  CHECK(st.symbol_start(5, c) - st.symbol_start(4, c) == doctest::Approx(c.symbol_interval_Ts_s));
  auto next = st;
  next.advance(c);
  CHECK(next.symbol_index == 2);
  CHECK(next.next_symbol_start_s == doctest::Approx(st.symbol_start(2, c)));
}
