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

// Non-coherent windowed OOK detector.
//
// A buffer of received samples is lowpass filtered (filter state starts
// empty in every buffer), reduced to its envelope, decimated to ten
// comparator values and put to a vote against the sensitivity threshold.
// A detection window is a run of consecutive buffers evaluated in order
// until one of them votes "pulse".

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ssflood/core.hpp"
#include "ssflood/phy.hpp"

namespace ssflood {

inline constexpr std::size_t kComparatorValuesPerBuffer = 10;

struct BufferVote {
  std::size_t above = 0;     // comparator values over the threshold
  std::size_t retained = 0;  // comparator values after decimation
  bool pulse = false;        // above > retained / 2, strictly
};

/// Reusable per-node buffer pipeline; owns its scratch memory.
class BufferProcessor {
 public:
  explicit BufferProcessor(const SimConfig& cfg);
  BufferProcessor(const SimConfig& cfg, double threshold);

  /// Throws std::invalid_argument unless samples.size() == samples_per_buffer().
  BufferVote process(std::span<const Complex> samples);

  /// Envelope after the in-band filter, before decimation (debug and tests).
  std::span<const double> last_envelope() const { return envelope_; }

  std::size_t samples_per_buffer() const { return n_; }
  std::size_t decimation() const { return decimation_; }
  double threshold() const { return threshold_; }

 private:
  const LowpassFilter* filter_;
  std::size_t n_;
  std::size_t decimation_;
  double threshold_;
  std::vector<Complex> padded_;
  std::vector<Complex> filtered_;
  std::vector<double> envelope_;
  std::vector<double> comparator_;
};

/// One-shot form of BufferProcessor::process. `segment` must span exactly
/// buffer_duration_s worth of samples.
BufferVote process_buffer(const Waveform& segment, const SimConfig& cfg);

struct SymbolDecision {
  int bit = 0;
  double decision_time_s = 0.0;
  std::size_t buffer_index = 0;       // firing buffer; meaningful for bit 1
  std::size_t buffers_evaluated = 0;  // early termination instrumentation
};

/// Decides one symbol from a window starting at rx.start_time_s. `rx` must
/// hold at least samples_per_window() samples; extra samples are ignored.
SymbolDecision detect_symbol(const Waveform& rx, const SimConfig& cfg);

struct PreambleSync {
  double sync_anchor_s = 0.0;  // end of the buffer that fired
  std::size_t buffer_index = 0;
};

/// Runs the buffer pipeline back to back from rx.start_time_s and returns
/// the first firing buffer, or nothing if no buffer fires.
std::optional<PreambleSync> detect_preamble(const Waveform& rx, const SimConfig& cfg);

/// Per-node receive clock after synchronisation.
///
/// The anchor is the end of the buffer that caught the preamble. Data
/// symbol k >= 1 is listened for in [symbol_start(k), symbol_start(k) + L)
/// with symbol_start(k) = anchor - buffer + k * Ts, so that buffer 0 of every
/// later window sits on the same slot of the symbol period as the buffer
/// that fired on the preamble.
struct DetectorState {
  double sync_anchor_s = 0.0;
  std::size_t symbol_index = 1;
  double next_symbol_start_s = 0.0;

  static DetectorState synced_at(double sync_anchor_s, const SimConfig& cfg);
  double symbol_start(std::size_t k, const SimConfig& cfg) const;
  void advance(const SimConfig& cfg);
};

struct DetectionEvent {
  NodeId node = 0;
  std::size_t symbol_index = 0;  // 0 = preamble
  int bit = 0;
  double decision_time_s = 0.0;
  std::size_t buffer_index = 0;  // in the window; for the preamble, buffers since listening began
};

/// Per-buffer vote tally, for the debug CSV.
struct VoteRecord {
  NodeId node = 0;
  long symbol_index = -1;  // -1 while idle (preamble search)
  std::size_t buffer_index = 0;
  double buffer_start_s = 0.0;
  std::size_t above = 0;
  std::size_t retained = 0;
  bool pulse = false;
};

using VoteSink = std::function<void(const VoteRecord&)>;

}  // namespace ssflood
