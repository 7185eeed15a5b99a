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

#include "ssflood/phy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "ssflood/simd/kernels.hpp"

namespace ssflood {

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

std::vector<double> windowed_sinc(std::size_t n_taps, double cutoff_hz, double fs, double beta) {
  std::vector<double> h(n_taps);
  const double mid = static_cast<double>(n_taps - 1) / 2.0;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  const double fc = cutoff_hz / fs;
  double sum = 0.0;
  for (std::size_t k = 0; k < n_taps; ++k) {
    const double m = static_cast<double>(k) - mid;
    const double r = mid > 0 ? m / mid : 0.0;
    const double w = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[k] = 2.0 * fc * sinc(2.0 * fc * m) * w;
    sum += h[k];
  }
  for (auto& v : h) v /= sum;
  return h;
}

}  // namespace

Complex frequency_response(std::span<const double> taps, double freq_hz, double sample_rate_hz) {
  Complex acc{0.0, 0.0};
  const double w = -2.0 * kPi * freq_hz / sample_rate_hz;
  for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * std::polar(1.0, w * static_cast<double>(k));
  return acc;
}

LowpassFilter design_lowpass(double sample_rate_hz, double bandwidth_hz, std::size_t n_taps,
                             double kaiser_beta) {
  if (n_taps < 3 || n_taps % 2 == 0) throw std::invalid_argument("lowpass needs an odd tap count >= 3");
  const double edge = bandwidth_hz / 2.0;
  const double target = 1.0 / std::sqrt(2.0);

  // |H(edge)| grows with the design cutoff; bisect for the -3 dB point.
  double lo = edge * 0.5;
  double hi = std::min(sample_rate_hz / 2.0, edge * 3.0);
  std::vector<double> taps;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    taps = windowed_sinc(n_taps, mid, sample_rate_hz, kaiser_beta);
    if (std::abs(frequency_response(taps, edge, sample_rate_hz)) > target) hi = mid;
    else lo = mid;
  }
  LowpassFilter f;
  f.design_cutoff_hz = 0.5 * (lo + hi);
  f.taps = windowed_sinc(n_taps, f.design_cutoff_hz, sample_rate_hz, kaiser_beta);
  f.group_delay = (n_taps - 1) / 2;
  f.sample_rate_hz = sample_rate_hz;

  constexpr int kGrid = 4000;
  double acc = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double freq = -edge + (i + 0.5) * (2.0 * edge / kGrid);
    acc += std::norm(frequency_response(f.taps, freq, sample_rate_hz));
  }
  f.inband_power_gain = acc / kGrid;
  return f;
}

const LowpassFilter& channel_filter(const SimConfig& cfg) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, LowpassFilter> cache;
  const auto key = std::make_pair(cfg.baseband_sample_rate_hz, cfg.signal_bandwidth_hz);
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, design_lowpass(cfg.baseband_sample_rate_hz, cfg.signal_bandwidth_hz)).first;
  return it->second;
}

Waveform make_pulse(const SimConfig& cfg) {
  Waveform w;
  w.sample_rate_hz = cfg.baseband_sample_rate_hz;
  w.start_time_s = 0.0;
  w.samples.assign(cfg.samples_per_pulse(), Complex(std::sqrt(dbm_to_watts(cfg.tx_power_dbm)), 0.0));
  return w;
}

Waveform shape_pulse(const Waveform& w, const SimConfig& cfg) {
  const LowpassFilter& lp = channel_filter(cfg);
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.start_time_s = w.start_time_s - static_cast<double>(lp.group_delay) / w.sample_rate_hz;
  if (w.empty()) {
    out.start_time_s = w.start_time_s;
    return out;
  }
  const std::size_t m = lp.taps.size();
  std::vector<Complex> padded(w.size() + 2 * (m - 1), Complex{});
  std::copy(w.samples.begin(), w.samples.end(), padded.begin() + static_cast<std::ptrdiff_t>(m - 1));
  out.samples.resize(w.size() + m - 1);
  simd::active_kernels().fir_real(padded.data(), out.samples.size(), lp.taps.data(), m, out.samples.data());
  return out;
}

Waveform symbol_waveform(int bit, const SimConfig& cfg) {
  if (bit == 0) {
    Waveform silent;
    silent.sample_rate_hz = cfg.baseband_sample_rate_hz;
    return silent;
  }
  return shape_pulse(make_pulse(cfg), cfg);
}

double free_space_path_loss_db(double distance_m, double carrier_hz) {
  return 20.0 * std::log10(4.0 * kPi * distance_m * carrier_hz / kSpeedOfLight);
}

namespace {

PathModel make_path(NodeId tx, NodeId rx, double length_m, double reflection, const SimConfig& cfg) {
  const double amplitude = kSpeedOfLight / (4.0 * kPi * length_m * cfg.carrier_freq_hz);
  // Reduce the cycle count before scaling by 2*pi to keep the phase exact.
  const double cycles = cfg.carrier_freq_hz * length_m / kSpeedOfLight;
  const double phase = -2.0 * kPi * (cycles - std::floor(cycles));
  PathModel p;
  p.tx = tx;
  p.rx = rx;
  p.gain = reflection * std::polar(amplitude, phase);
  p.delay_s = length_m / kSpeedOfLight;
  return p;
}

}  // namespace

std::vector<PathModel> path_model(const Topology& topo, NodeId tx, NodeId rx, const SimConfig& cfg) {
  if (tx == rx) throw std::invalid_argument("path_model: tx and rx must differ");
  const double d = pairwise_distance(topo, tx, rx);
  if (!(d > 0.0)) throw std::invalid_argument("path_model: zero distance between nodes");

  std::vector<PathModel> paths;
  paths.push_back(make_path(tx, rx, d, 1.0, cfg));
  if (cfg.reflections_enabled) {
    const auto& s = topo.node_positions[tx];
    const auto& r = topo.node_positions[rx];
    const double a = topo.area_side_m;
    const std::array<Position, 4> images{{
        {-s.x_m, s.y_m},
        {2.0 * a - s.x_m, s.y_m},
        {s.x_m, -s.y_m},
        {s.x_m, 2.0 * a - s.y_m},
    }};
    for (const auto& img : images)
      paths.push_back(make_path(tx, rx, std::hypot(img.x_m - r.x_m, img.y_m - r.y_m), -1.0, cfg));
  }
  return paths;
}

std::int64_t sample_index(double t_s, double sample_rate_hz) { return std::llround(t_s * sample_rate_hz); }

void accumulate_arrival(std::span<Complex> out, std::int64_t out_start_index, const Waveform& w,
                        std::int64_t arrival_index, Complex gain) {
  const std::int64_t out_end = out_start_index + static_cast<std::int64_t>(out.size());
  const std::int64_t w_end = arrival_index + static_cast<std::int64_t>(w.size());
  const std::int64_t lo = std::max(out_start_index, arrival_index);
  const std::int64_t hi = std::min(out_end, w_end);
  if (lo >= hi) return;
  simd::active_kernels().cmul_accumulate(out.data() + (lo - out_start_index),
                                         w.samples.data() + (lo - arrival_index),
                                         static_cast<std::size_t>(hi - lo), gain);
}

Waveform superpose(std::span<const Emission> emissions, std::span<const PathModel> paths,
                   double span_start_s, std::size_t n_samples, double sample_rate_hz) {
  Waveform out;
  out.sample_rate_hz = sample_rate_hz;
  out.start_time_s = span_start_s;
  out.samples.assign(n_samples, Complex{});
  const std::int64_t start = sample_index(span_start_s, sample_rate_hz);
  for (const auto& e : emissions) {
    if (!e.waveform) continue;
    const Waveform& w = *e.waveform;
    if (w.empty()) continue;
    if (w.sample_rate_hz != sample_rate_hz)
      throw std::invalid_argument("superpose: waveform sample rate does not match the receiver grid");
    const Complex rot = std::polar(1.0, e.event.phase0);
    for (const auto& p : paths) {
      if (p.tx != e.event.tx) continue;
      const std::int64_t arrival = sample_index(e.event.emit_time_s, sample_rate_hz) +
                                   sample_index(p.delay_s, sample_rate_hz) +
                                   sample_index(w.start_time_s, sample_rate_hz);
      accumulate_arrival(out.samples, start, w, arrival, p.gain * rot);
    }
  }
  return out;
}

NoiseSource::NoiseSource(const SimConfig& cfg, std::uint64_t seed)
    : filter_(&channel_filter(cfg)), enabled_(cfg.noise_enabled), rng_(seed) {
  white_variance_ = cfg.inband_noise_watts() * cfg.baseband_sample_rate_hz /
                    (cfg.signal_bandwidth_hz * filter_->inband_power_gain);
  component_sigma_ = std::sqrt(white_variance_ / 2.0);
}

void NoiseSource::draw_white(std::span<Complex> out) {
  for (auto& s : out) {
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    s = Complex(component_sigma_ * re, component_sigma_ * im);
  }
}

void NoiseSource::fill(std::int64_t start_index, std::span<Complex> out) {
  if (!enabled_) {
    std::fill(out.begin(), out.end(), Complex{});
    return;
  }
  const std::size_t hist = filter_->taps.size() - 1;
  const std::size_t n = out.size();
  if (!primed_ || start_index != next_index_) {
    work_.assign(hist, Complex{});
    draw_white(work_);
    primed_ = true;
  }
  // work_ = [history (hist) | fresh (n)]
  work_.resize(hist + n);
  draw_white(std::span<Complex>(work_).subspan(hist, n));
  simd::active_kernels().fir_real(work_.data(), n, filter_->taps.data(), filter_->taps.size(), out.data());
  std::copy(work_.end() - static_cast<std::ptrdiff_t>(hist), work_.end(), work_.begin());
  work_.resize(hist);
  next_index_ = start_index + static_cast<std::int64_t>(n);
}

Waveform add_noise(const Waveform& w, const SimConfig& cfg, Rng& rng) {
  Waveform out = w;
  if (!cfg.noise_enabled || w.empty()) return out;
  NoiseSource src(cfg, rng());
  std::vector<Complex> noise(w.size());
  src.fill(sample_index(w.start_time_s, w.sample_rate_hz), noise);
  for (std::size_t i = 0; i < w.size(); ++i) out.samples[i] += noise[i];
  return out;
}

}  // namespace ssflood
