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

#include "ssflood/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace ssflood {

namespace {

constexpr double kRelTol = 1e-9;

std::size_t to_samples(double seconds, double rate) {
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

std::size_t SimConfig::samples_per_buffer() const {
  return std::max<std::size_t>(1, to_samples(buffer_duration_s, baseband_sample_rate_hz));
}

std::size_t SimConfig::samples_per_window() const {
  return samples_per_buffer() * static_cast<std::size_t>(detections_per_window);
}

std::size_t SimConfig::samples_per_symbol() const {
  return to_samples(symbol_interval_Ts_s, baseband_sample_rate_hz);
}

std::size_t SimConfig::samples_per_pulse() const {
  // 0.2 us at 96 MHz is 19.2 samples; the pulse covers it fully (20).
  const double exact = pulse_duration_Tp_s * baseband_sample_rate_hz;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(exact - 1e-9)));
}

double SimConfig::detection_threshold() const {
  return std::sqrt(dbm_to_watts(rx_sensitivity_dbm));
}

double SimConfig::inband_noise_watts() const {
  return dbm_to_watts(noise_power_dbm + noise_figure_db);
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument([&] {
        std::string msg = "invalid SimConfig:";
        for (const auto& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::vector<std::string> config_violations(const SimConfig& cfg) {
  std::vector<std::string> out;
  auto require_positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + ": must be positive");
  };
  require_positive(cfg.carrier_freq_hz, "carrier_freq_hz");
  require_positive(cfg.symbol_interval_Ts_s, "symbol_interval_Ts_s");
  require_positive(cfg.pulse_duration_Tp_s, "pulse_duration_Tp_s");
  require_positive(cfg.window_L_s, "window_L_s");
  require_positive(cfg.buffer_duration_s, "buffer_duration_s");
  require_positive(cfg.signal_bandwidth_hz, "signal_bandwidth_hz");
  require_positive(cfg.baseband_sample_rate_hz, "baseband_sample_rate_hz");
  require_positive(cfg.data_rate_bps, "data_rate_bps");
  if (cfg.detections_per_window < 1) out.push_back("detections_per_window: must be at least 1");
  if (!out.empty()) return out;

  if (cfg.pulse_duration_Tp_s > cfg.symbol_interval_Ts_s / 10.0 * (1 + kRelTol))
    out.push_back("pulse_duration_Tp_s/symbol_interval_Ts_s: pulse must satisfy Tp <= Ts/10");
  if (!(cfg.window_L_s < cfg.symbol_interval_Ts_s))
    out.push_back("window_L_s/symbol_interval_Ts_s: window must be shorter than the symbol interval");
  if (cfg.buffer_duration_s * cfg.detections_per_window > cfg.window_L_s * (1 + kRelTol))
    out.push_back("buffer_duration_s/detections_per_window: buffers must fit inside window_L_s");
  if (cfg.baseband_sample_rate_hz < 2.0 * cfg.signal_bandwidth_hz)
    out.push_back("baseband_sample_rate_hz/signal_bandwidth_hz: sample rate below twice the bandwidth");
  if (std::abs(cfg.data_rate_bps * cfg.symbol_interval_Ts_s - 1.0) > 1e-9)
    out.push_back("data_rate_bps/symbol_interval_Ts_s: data rate must equal 1/Ts");
  return out;
}

SimConfig validate_config(const SimConfig& cfg) {
  auto violations = config_violations(cfg);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  return cfg;
}

namespace {

nlohmann::ordered_json to_json(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["carrier_freq_hz"] = c.carrier_freq_hz;
  j["symbol_interval_Ts_s"] = c.symbol_interval_Ts_s;
  j["pulse_duration_Tp_s"] = c.pulse_duration_Tp_s;
  j["window_L_s"] = c.window_L_s;
  j["buffer_duration_s"] = c.buffer_duration_s;
  j["detections_per_window"] = c.detections_per_window;
  j["tx_power_dbm"] = c.tx_power_dbm;
  j["noise_power_dbm"] = c.noise_power_dbm;
  j["noise_figure_db"] = c.noise_figure_db;
  j["rx_sensitivity_dbm"] = c.rx_sensitivity_dbm;
  j["signal_bandwidth_hz"] = c.signal_bandwidth_hz;
  j["baseband_sample_rate_hz"] = c.baseband_sample_rate_hz;
  j["data_rate_bps"] = c.data_rate_bps;
  j["reflections_enabled"] = c.reflections_enabled;
  j["noise_enabled"] = c.noise_enabled;
  j["rng_seed"] = c.rng_seed;
  return j;
}

}  // namespace

std::string config_to_text(const SimConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

SimConfig config_from_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a flat key/value object");

  SimConfig c;
  bool has_buffer = false;
  bool has_rate = false;
  for (const auto& [key, value] : j.items()) {
    auto num = [&]() {
      if (!value.is_number()) throw std::invalid_argument("config key '" + key + "' must be numeric");
      return value.get<double>();
    };
    auto flag = [&]() {
      if (!value.is_boolean()) throw std::invalid_argument("config key '" + key + "' must be boolean");
      return value.get<bool>();
    };
    if (key == "carrier_freq_hz") c.carrier_freq_hz = num();
    else if (key == "symbol_interval_Ts_s") c.symbol_interval_Ts_s = num();
    else if (key == "pulse_duration_Tp_s") c.pulse_duration_Tp_s = num();
    else if (key == "window_L_s") c.window_L_s = num();
    else if (key == "buffer_duration_s") { c.buffer_duration_s = num(); has_buffer = true; }
    else if (key == "detections_per_window") c.detections_per_window = static_cast<int>(num());
    else if (key == "tx_power_dbm") c.tx_power_dbm = num();
    else if (key == "noise_power_dbm") c.noise_power_dbm = num();
    else if (key == "noise_figure_db") c.noise_figure_db = num();
    else if (key == "rx_sensitivity_dbm") c.rx_sensitivity_dbm = num();
    else if (key == "signal_bandwidth_hz") c.signal_bandwidth_hz = num();
    else if (key == "baseband_sample_rate_hz") c.baseband_sample_rate_hz = num();
    else if (key == "data_rate_bps") { c.data_rate_bps = num(); has_rate = true; }
    else if (key == "reflections_enabled") c.reflections_enabled = flag();
    else if (key == "noise_enabled") c.noise_enabled = flag();
    else if (key == "rng_seed") {
      if (!value.is_number_unsigned()) throw std::invalid_argument("config key 'rng_seed' must be a non-negative integer");
      c.rng_seed = value.get<std::uint64_t>();
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  if (!has_buffer && c.detections_per_window > 0)
    c.buffer_duration_s = c.window_L_s / c.detections_per_window;
  if (!has_rate && c.symbol_interval_Ts_s > 0) c.data_rate_bps = 1.0 / c.symbol_interval_Ts_s;
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_text(ss.str());
}

void save_config(const SimConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file " + path.string());
  out << config_to_text(cfg);
}

std::uint64_t config_hash(const SimConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(cfg).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double Waveform::energy_joules() const {
  double e = 0.0;
  for (const auto& s : samples) e += std::norm(s);
  return e / sample_rate_hz;
}

double Waveform::peak_power_watts() const {
  double p = 0.0;
  for (const auto& s : samples) p = std::max(p, std::norm(s));
  return p;
}

void write_waveform_csv(const Waveform& w, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write waveform dump " + path.string());
  out << "time_s,re,im\n" << std::setprecision(12);
  for (std::size_t k = 0; k < w.size(); ++k)
    out << w.time_of(k) << ',' << w.samples[k].real() << ',' << w.samples[k].imag() << '\n';
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace ssflood
