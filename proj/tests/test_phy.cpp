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
#include <fftw3.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "ssflood/phy.hpp"
#include "ssflood/topology.hpp"

using namespace ssflood;

namespace {

std::vector<Complex> fft(std::vector<Complex> x) {
  const int n = static_cast<int>(x.size());
  std::vector<Complex> out(x.size());
  fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(x.data()),
                                 reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);
  return out;
}

double bin_freq(std::size_t k, std::size_t n, double fs) {
  const double f = static_cast<double>(k) * fs / static_cast<double>(n);
  return k <= n / 2 ? f : f - fs;
}

// FSPL oracle: 20 log10(4 pi d f / c), evaluated directly.
double fspl_db(double d, double f) { return 20.0 * std::log10(4.0 * kPi * d * f / kSpeedOfLight); }

}  // namespace

TEST_CASE("lowpass design") {
  SimConfig c;
  const auto& f = channel_filter(c);
  CHECK(f.taps.size() == kLowpassTaps);
  CHECK(f.group_delay == 15);
  CHECK(std::accumulate(f.taps.begin(), f.taps.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(frequency_response(f.taps, 5e6, 96e6)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  for (std::size_t k = 0; k < f.taps.size(); ++k) CHECK(f.taps[k] == doctest::Approx(f.taps[f.taps.size() - 1 - k]));
}

TEST_CASE("rectangular pulse") {
  SimConfig c;
  const Waveform p = make_pulse(c);
  CHECK(p.size() == 20);
  CHECK(p.start_time_s == 0.0);
  CHECK(p.peak_power_watts() == doctest::Approx(1e-3));
  CHECK(symbol_waveform(0, c).empty());

  SimConfig longer;
  longer.pulse_duration_Tp_s = longer.symbol_interval_Ts_s / 10.0;
  CHECK(make_pulse(longer).size() == 96);
}

TEST_CASE("shaped pulse spectrum") {
  SimConfig c;
  const Waveform s = shape_pulse(make_pulse(c), c);
  CHECK(s.size() == 20 + kLowpassTaps - 1);
  CHECK(s.start_time_s == doctest::Approx(-15.0 / 96e6));

  const std::size_t n = 8192;
  std::vector<Complex> x(n);
  std::copy(s.samples.begin(), s.samples.end(), x.begin());
  const auto X = fft(x);
  std::vector<Complex> r(n);
  const Waveform rect = make_pulse(c);
  std::copy(rect.samples.begin(), rect.samples.end(), r.begin());
  const auto R = fft(r);

  const double dc = std::norm(X[0]);
  CHECK(dc == doctest::Approx(std::norm(R[0])).epsilon(1e-9));  // unit DC gain
  double peak = 0.0, out_of_band = 0.0, at_null = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = std::abs(bin_freq(k, n, 96e6));
    peak = std::max(peak, std::norm(X[k]));
    if (f >= c.signal_bandwidth_hz) out_of_band = std::max(out_of_band, std::norm(X[k]));
    if (std::abs(f - 4.8e6) < 96e6 / n) at_null = std::max(at_null, std::norm(X[k]));
  }
  CHECK(peak == doctest::Approx(dc));
  // First null of a 20-sample rectangle sits at 96 MHz / 20 = 4.8 MHz.
  CHECK(10 * std::log10(at_null / dc) < -20.0);
  CHECK(10 * std::log10(out_of_band / dc) <= -40.0);
}

TEST_CASE("shaping edge cases") {
  SimConfig c;
  CHECK(shape_pulse(Waveform{{}, 96e6, 0.0}, c).empty());
  Waveform dc{std::vector<Complex>(400, Complex(0.3, -0.1)), 96e6, 0.0};
  const Waveform s = shape_pulse(dc, c);
  for (std::size_t i = 100; i < 300; ++i) {
    const double ratio_db = 20 * std::log10(std::abs(s.samples[i + 15]) / std::abs(dc.samples[i]));
    CHECK(std::abs(ratio_db) < 1.0);
  }
}

TEST_CASE("free-space path model") {
  SimConfig c;
  const auto t = build_grid(1, 3, 100.0);
  const auto p = path_model(t, 0, 1, c);
  REQUIRE(p.size() == 1);
  CHECK(-20 * std::log10(std::abs(p[0].gain)) == doctest::Approx(fspl_db(100.0, 2.4e9)).epsilon(1e-9));
  CHECK(free_space_path_loss_db(100.0, 2.4e9) == doctest::Approx(80.05).epsilon(1e-4));
  CHECK(free_space_path_loss_db(200.0, 2.4e9) == doctest::Approx(86.07).epsilon(1e-4));
  CHECK(p[0].delay_s == doctest::Approx(333.6e-9).epsilon(1e-4));
  const auto far = path_model(t, 0, 2, c);
  CHECK(std::abs(far[0].gain) == doctest::Approx(std::abs(p[0].gain) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(path_model(t, 1, 1, c), std::invalid_argument);

  // Lattice nodes on a wall see an image at the LOS length; use interior nodes.
  Topology inner = t;
  inner.node_positions = {{500.0, 700.0}, {600.0, 700.0}};
  SimConfig r = c;
  r.reflections_enabled = true;
  const auto rp = path_model(inner, 0, 1, r);
  CHECK(rp.size() == 5);
  CHECK(rp[0].gain == p[0].gain);
  for (std::size_t i = 1; i < rp.size(); ++i) CHECK(rp[i].delay_s > rp[0].delay_s);
}

TEST_CASE("superposition") {
  const double fs = 96e6;
  Waveform w{{Complex(1, 0), Complex(2, 0), Complex(0, 1)}, fs, 0.0};
  PathModel unit{0, 9, Complex(1, 0), 0.0};

  SUBCASE("identity") {
    Emission e{{0, 0.0, 0.0}, &w};
    const Waveform out = superpose(std::span(&e, 1), std::span(&unit, 1), 0.0, 3, fs);
    for (std::size_t i = 0; i < 3; ++i) CHECK(out.samples[i] == w.samples[i]);
  }
  SUBCASE("destructive and coherent pairs") {
    PathModel paths[] = {unit, {1, 9, Complex(1, 0), 0.0}};
    Emission opposite[] = {{{0, 0.0, 0.0}, &w}, {{1, 0.0, kPi}, &w}};
    const Waveform z = superpose(opposite, paths, 0.0, 3, fs);
    for (const auto& s : z.samples) CHECK(std::abs(s) < 1e-12);
    Emission same[] = {{{0, 0.0, 0.0}, &w}, {{1, 0.0, 0.0}, &w}};
    const Waveform two = superpose(same, paths, 0.0, 3, fs);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::norm(two.samples[i]) == doctest::Approx(4 * std::norm(w.samples[i])));
  }
  SUBCASE("sample-rate mismatch") {
    Waveform slow{{Complex(1, 0)}, fs / 2, 0.0};
    Emission e{{0, 0.0, 0.0}, &slow};
    CHECK_THROWS_AS(superpose(std::span(&e, 1), std::span(&unit, 1), 0.0, 3, fs), std::invalid_argument);
  }
}

TEST_CASE("superposition is linear") {
  SimConfig c;
  const auto t = build_grid(3, 3, 80.0);
  const Waveform pulse = shape_pulse(make_pulse(c), c);
  std::vector<PathModel> paths;
  for (NodeId tx = 0; tx < t.size(); ++tx)
    if (tx != 4) paths.push_back(path_model(t, tx, 4, c)[0]);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ph(0, 2 * kPi), when(0, 2e-6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Emission> all;
    for (NodeId tx = 0; tx < t.size(); ++tx)
      if (tx != 4) all.push_back({{tx, when(rng), ph(rng)}, &pulse});
    const std::size_t half = all.size() / 2;
    const auto a = superpose(std::span(all).first(half), paths, 0.0, 400, 96e6);
    const auto b = superpose(std::span(all).subspan(half), paths, 0.0, 400, 96e6);
    const auto ab = superpose(all, paths, 0.0, 400, 96e6);
    for (std::size_t i = 0; i < 400; ++i) CHECK(std::abs(ab.samples[i] - (a.samples[i] + b.samples[i])) < 1e-18);
  }
}

TEST_CASE("noise in-band power matches the configured level") {
  SimConfig c;
  const std::size_t n = 1 << 20;
  NoiseSource src(c, 42);
  std::vector<Complex> x(n);
  src.fill(0, x);
  const auto X = fft(x);
  double inband = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(bin_freq(k, n, c.baseband_sample_rate_hz)) <= c.signal_bandwidth_hz / 2) inband += std::norm(X[k]);
  inband /= static_cast<double>(n) * static_cast<double>(n);  // Parseval, per-sample power
  CHECK(std::abs(watts_to_dbm(inband) - (-98.0)) <= 0.1);
}

TEST_CASE("noise switch, seeds and continuity") {
  SimConfig c;
  Waveform w{std::vector<Complex>(64, Complex(1e-6, 0)), 96e6, 0.0};
  SimConfig quiet = c;
  quiet.noise_enabled = false;
  Rng rng(1);
  CHECK(add_noise(w, quiet, rng).samples == w.samples);

  const std::size_t n = 1000000;
  std::vector<Complex> a(n), b(n);
  NoiseSource(c, 1).fill(0, a);
  NoiseSource(c, 2).fill(0, b);
  Complex cross{};
  double ea = 0, eb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cross += a[i] * std::conj(b[i]);
    ea += std::norm(a[i]);
    eb += std::norm(b[i]);
  }
  CHECK(std::abs(cross) / std::sqrt(ea * eb) < 0.01);

  NoiseSource whole(c, 5), parts(c, 5);
  std::vector<Complex> one(300), two(300);
  whole.fill(100, one);
  parts.fill(100, std::span(two).first(120));
  parts.fill(220, std::span(two).subspan(120));
  CHECK(one == two);
}
