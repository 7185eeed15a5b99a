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

#pragma once

// Pulse-based OOK transmitter, free-space channel and receiver noise, all in
// complex baseband at SimConfig::baseband_sample_rate_hz.

#include <cstdint>
#include <span>
#include <vector>

#include "ssflood/core.hpp"
#include "ssflood/topology.hpp"

namespace ssflood {

/// Linear-phase lowpass FIR (Kaiser-windowed sinc) with unit DC gain.
///
/// The same response limits the transmitted pulse, colours the receiver
/// noise and serves as the detector's in-band filter.
struct LowpassFilter {
  std::vector<double> taps;
  std::size_t group_delay = 0;  // samples, (taps - 1) / 2
  double sample_rate_hz = 0.0;
  double design_cutoff_hz = 0.0;
  /// Mean |H(f)|^2 over the signal band |f| <= B/2.
  double inband_power_gain = 0.0;
};

inline constexpr std::size_t kLowpassTaps = 31;
inline constexpr double kLowpassKaiserBeta = 5.0;

/// Designs the filter so that |H(bandwidth/2)| = 1/sqrt(2).
LowpassFilter design_lowpass(double sample_rate_hz, double bandwidth_hz,
                             std::size_t n_taps = kLowpassTaps,
                             double kaiser_beta = kLowpassKaiserBeta);

/// Filter for cfg, memoised on (sample rate, bandwidth).
const LowpassFilter& channel_filter(const SimConfig& cfg);

Complex frequency_response(std::span<const double> taps, double freq_hz, double sample_rate_hz);

/// Rectangular pulse of samples_per_pulse() samples at peak power
/// tx_power_dbm, starting at t = 0. This is the unshaped symbol-1 waveform.
Waveform make_pulse(const SimConfig& cfg);

/// Full convolution with the channel lowpass, re-timed by the group delay so
/// that the pulse body stays at its original time.
Waveform shape_pulse(const Waveform& w, const SimConfig& cfg);

/// What a transmitter radiates for one OOK symbol: the shaped pulse for 1,
/// an empty waveform for 0.
Waveform symbol_waveform(int bit, const SimConfig& cfg);

/// One propagation path between two nodes.
struct PathModel {
  NodeId tx = 0;
  NodeId rx = 0;
  Complex gain;        // dimensionless amplitude, carrier phase included
  double delay_s = 0;  // path length / c
};

struct TxEvent {
  NodeId tx = 0;
  double emit_time_s = 0.0;
  double phase0 = 0.0;  // transmitter carrier phase, radians
};

double free_space_path_loss_db(double distance_m, double carrier_hz);

/// Line-of-sight path, plus four first-order wall images (reflection
/// coefficient -1) when cfg.reflections_enabled. LOS is always element 0.
/// Throws std::invalid_argument for tx == rx or coincident nodes.
std::vector<PathModel> path_model(const Topology& topo, NodeId tx, NodeId rx, const SimConfig& cfg);

/// A transmission and the waveform it radiated.
struct Emission {
  TxEvent event;
  const Waveform* waveform = nullptr;
};

/// Received samples on the grid [span_start, span_start + n/fs).
///
/// Each emission is delivered over every path in `paths` whose tx matches
/// the emitter. The envelope lands on the nearest sample of
/// emit + delay + waveform start; the carrier phase uses the exact delay
/// (it is part of PathModel::gain) rotated by the emitter's phase0.
/// Throws std::invalid_argument if any waveform's sample rate differs from
/// `sample_rate_hz`.
Waveform superpose(std::span<const Emission> emissions, std::span<const PathModel> paths,
                   double span_start_s, std::size_t n_samples, double sample_rate_hz);

/// Sample index on the grid k / fs nearest to `t`.
std::int64_t sample_index(double t_s, double sample_rate_hz);

/// Adds gain * w, with w's first sample at grid index `arrival_index`, into
/// `out` whose first sample is grid index `out_start_index`. Only the
/// overlapping part is touched.
void accumulate_arrival(std::span<Complex> out, std::int64_t out_start_index, const Waveform& w,
                        std::int64_t arrival_index, Complex gain);

/// Continuous band-limited receiver noise for one node.
///
/// White circular Gaussian samples are drawn at the baseband rate and passed
/// through the channel lowpass; the white variance is scaled so that the
/// power inside |f| <= B/2 equals cfg.inband_noise_watts(). Consecutive
/// fill() calls on adjacent sample ranges produce one continuous process; a
/// gap restarts the filter history from fresh samples.
class NoiseSource {
 public:
  NoiseSource(const SimConfig& cfg, std::uint64_t seed);

  /// Overwrites `out` with noise for grid indices [start_index, start_index + out.size()).
  void fill(std::int64_t start_index, std::span<Complex> out);

  /// Per-sample variance of the white input, watts.
  double white_variance() const { return white_variance_; }
  bool enabled() const { return enabled_; }

 private:
  void draw_white(std::span<Complex> out);

  const LowpassFilter* filter_;
  bool enabled_;
  double white_variance_;
  double component_sigma_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<Complex> work_;
  std::int64_t next_index_ = 0;
  bool primed_ = false;
};

/// `w` plus receiver noise drawn from `rng`; unchanged when noise is disabled.
Waveform add_noise(const Waveform& w, const SimConfig& cfg, Rng& rng);

}  // namespace ssflood
