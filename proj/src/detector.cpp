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

#include "ssflood/detector.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ssflood/simd/kernels.hpp"

namespace ssflood {

BufferProcessor::BufferProcessor(const SimConfig& cfg) : BufferProcessor(cfg, cfg.detection_threshold()) {}

BufferProcessor::BufferProcessor(const SimConfig& cfg, double threshold)
    : filter_(&channel_filter(cfg)),
      n_(cfg.samples_per_buffer()),
      decimation_(std::max<std::size_t>(1, n_ / kComparatorValuesPerBuffer)),
      threshold_(threshold) {
  padded_.assign(n_ + filter_->taps.size() - 1, Complex{});
  filtered_.resize(n_);
  envelope_.resize(n_);
  comparator_.reserve(n_);
}

BufferVote BufferProcessor::process(std::span<const Complex> samples) {
  if (samples.size() != n_)
    throw std::invalid_argument("process_buffer: expected " + std::to_string(n_) + " samples, got " +
                                std::to_string(samples.size()));
  const auto& k = simd::active_kernels();
  const std::size_t g = filter_->group_delay;

  // Centred ("same") convolution with zero state on both sides.
  std::fill(padded_.begin(), padded_.end(), Complex{});
  std::copy(samples.begin(), samples.end(), padded_.begin() + static_cast<std::ptrdiff_t>(g));
  k.fir_real(padded_.data(), n_, filter_->taps.data(), filter_->taps.size(), filtered_.data());
  k.magnitude(filtered_.data(), n_, envelope_.data());

  BufferVote v;
  if (decimation_ == 1) {
    v.retained = n_;
    v.above = k.count_above(envelope_.data(), n_, threshold_);
  } else {
    comparator_.clear();
    for (std::size_t i = 0; i < n_; i += decimation_) comparator_.push_back(envelope_[i]);
    v.retained = comparator_.size();
    v.above = k.count_above(comparator_.data(), comparator_.size(), threshold_);
  }
  v.pulse = 2 * v.above > v.retained;
  return v;
}

BufferVote process_buffer(const Waveform& segment, const SimConfig& cfg) {
  BufferProcessor p(cfg);
  return p.process(segment.samples);
}

SymbolDecision detect_symbol(const Waveform& rx, const SimConfig& cfg) {
  const std::size_t nb = cfg.samples_per_buffer();
  const auto buffers = static_cast<std::size_t>(cfg.detections_per_window);
  if (rx.size() < nb * buffers) throw std::invalid_argument("detect_symbol: window shorter than L");

  BufferProcessor proc(cfg);
  SymbolDecision d;
  for (std::size_t b = 0; b < buffers; ++b) {
    ++d.buffers_evaluated;
    const auto vote = proc.process(std::span<const Complex>(rx.samples).subspan(b * nb, nb));
    if (vote.pulse) {
      d.bit = 1;
      d.buffer_index = b;
      d.decision_time_s = rx.time_of((b + 1) * nb);
      return d;
    }
  }
  d.bit = 0;
  d.buffer_index = buffers - 1;
  d.decision_time_s = rx.time_of(buffers * nb);
  return d;
}

std::optional<PreambleSync> detect_preamble(const Waveform& rx, const SimConfig& cfg) {
  const std::size_t nb = cfg.samples_per_buffer();
  BufferProcessor proc(cfg);
  for (std::size_t b = 0; (b + 1) * nb <= rx.size(); ++b) {
    if (proc.process(std::span<const Complex>(rx.samples).subspan(b * nb, nb)).pulse)
      return PreambleSync{rx.time_of((b + 1) * nb), b};
  }
  return std::nullopt;
}

DetectorState DetectorState::synced_at(double sync_anchor_s, const SimConfig& cfg) {
  DetectorState s;
  s.sync_anchor_s = sync_anchor_s;
  s.symbol_index = 1;
  s.next_symbol_start_s = s.symbol_start(1, cfg);
  return s;
}

double DetectorState::symbol_start(std::size_t k, const SimConfig& cfg) const {
  const double fs = cfg.baseband_sample_rate_hz;
  const double buffer = static_cast<double>(cfg.samples_per_buffer()) / fs;
  const double ts = static_cast<double>(cfg.samples_per_symbol()) / fs;
  return sync_anchor_s - buffer + static_cast<double>(k) * ts;
}

void DetectorState::advance(const SimConfig& cfg) {
  ++symbol_index;
  next_symbol_start_s = symbol_start(symbol_index, cfg);
}

}  // namespace ssflood
