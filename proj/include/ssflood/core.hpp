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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssflood {

/// Complex-envelope sample. |s|^2 is instantaneous power in watts.
using Complex = std::complex<double>;

/// Node identifier (index into Topology::node_positions).
using NodeId = std::size_t;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Every physical-layer and detector parameter of a simulation run.
///
/// Field names double as the keys of the configuration file, so they keep
/// their unit suffixes.
struct SimConfig {
  double carrier_freq_hz = 2.4e9;
  double symbol_interval_Ts_s = 10e-6;
  double pulse_duration_Tp_s = 0.2e-6;
  double window_L_s = 1.875e-6;
  double buffer_duration_s = 1.875e-6 / 18.0;
  int detections_per_window = 18;
  double tx_power_dbm = 0.0;
  double noise_power_dbm = -103.0;
  double noise_figure_db = 5.0;
  double rx_sensitivity_dbm = -90.0;
  double signal_bandwidth_hz = 10e6;
  double baseband_sample_rate_hz = 96e6;
  double data_rate_bps = 1e5;
  bool reflections_enabled = false;
  bool noise_enabled = true;
  std::uint64_t rng_seed = 1;

  // Derived sample counts on the baseband grid.
  std::size_t samples_per_buffer() const;
  std::size_t samples_per_window() const;
  std::size_t samples_per_symbol() const;
  std::size_t samples_per_pulse() const;
  double sample_period_s() const { return 1.0 / baseband_sample_rate_hz; }
  /// Comparator amplitude: sqrt of the sensitivity power.
  double detection_threshold() const;
  /// Receiver noise power inside the signal bandwidth, noise figure included.
  double inband_noise_watts() const;

  bool operator==(const SimConfig&) const = default;
};

/// Raised by validate_config. what() lists every violated invariant.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Invariant violations of `cfg`, each naming the offending field pair.
/// Empty when the configuration is usable.
std::vector<std::string> config_violations(const SimConfig& cfg);

/// Returns `cfg` unchanged when every invariant holds, throws ConfigError
/// otherwise.
SimConfig validate_config(const SimConfig& cfg);

// Flat key/value JSON text, keys named exactly as the SimConfig fields.
// Missing keys keep their defaults; buffer_duration_s and data_rate_bps
// follow window_L_s / symbol_interval_Ts_s when absent. Unknown keys are
// rejected.
std::string config_to_text(const SimConfig& cfg);
SimConfig config_from_text(const std::string& text);
SimConfig load_config(const std::filesystem::path& path);
void save_config(const SimConfig& cfg, const std::filesystem::path& path);

/// FNV-1a over the canonical text form; stable across runs.
std::uint64_t config_hash(const SimConfig& cfg);

/// A block of complex-baseband samples. Sample k sits at
/// start_time_s + k / sample_rate_hz.
struct Waveform {
  std::vector<Complex> samples;
  double sample_rate_hz = 0.0;
  double start_time_s = 0.0;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  double time_of(std::size_t k) const {
    return start_time_s + static_cast<double>(k) / sample_rate_hz;
  }
  double energy_joules() const;
  double peak_power_watts() const;
};

void write_waveform_csv(const Waveform& w, const std::filesystem::path& path);

// Deterministic seed splitting.
//
// split_seed(seed, stream) = splitmix64(seed + (stream + 1) * 0x9E3779B97F4A7C15)
//
// Each trial, node and purpose draws from its own stream, so results do not
// depend on the order in which trials or nodes are evaluated.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

using Rng = std::mt19937_64;

/// Stream identifiers used under a trial seed.
namespace stream {
inline constexpr std::uint64_t kPayload = 0;
inline constexpr std::uint64_t kCarrierPhase = 1;
inline constexpr std::uint64_t kNodeNoiseBase = 1024;
}  // namespace stream

}  // namespace ssflood
