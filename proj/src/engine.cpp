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

#include "ssflood/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace ssflood {

namespace {

struct ArrivalPath {
  Complex gain;
  std::int64_t delay = 0;  // samples
};

struct ScheduledPulse {
  std::int64_t emit = 0;  // grid index
  NodeId tx = 0;
  Complex rotation;  // e^{j phase0}
};

struct Node {
  NodeMode mode = NodeMode::idle;
  DetectorState clock;
  bool relayed_this_symbol = false;
  bool finished = false;
  std::int64_t anchor = 0;        // grid index of the sync anchor
  std::int64_t window_start = 0;  // grid index of the current window
  std::size_t buffer = 0;         // buffer index inside the window / idle count
  std::int64_t next_start = 0;    // grid index of the pending buffer
};

// Min-heap on (buffer end, node id): every buffer is decided only after all
// pulses that can reach it have been scheduled.
using PendingBuffer = std::pair<std::int64_t, NodeId>;

class Flood {
 public:
  Flood(const Topology& topo, const Bits& tx_bits, const SimConfig& cfg, std::uint64_t seed,
        const EngineOptions& opt)
      : topo_(topo), cfg_(cfg), opt_(opt), proc_(cfg) {
    fs_ = cfg.baseband_sample_rate_hz;
    nb_ = static_cast<std::int64_t>(cfg.samples_per_buffer());
    ns_ = static_cast<std::int64_t>(cfg.samples_per_symbol());
    buffers_per_window_ = static_cast<std::size_t>(cfg.detections_per_window);
    pulse_ = symbol_waveform(1, cfg);
    pulse_offset_ = sample_index(pulse_.start_time_s, fs_);
    pulse_len_ = static_cast<std::int64_t>(pulse_.size());

    const std::size_t n_nodes = topo.size();
    trace_.tx_bits = tx_bits;
    trace_.per_node_bits.assign(n_nodes, {});
    trace_.per_node_events.assign(n_nodes, {});
    trace_.trial_seed = seed;
    trace_.config_hash = config_hash(cfg);
    trace_.initiator = topo.initiator_index;
    trace_.per_node_bits[topo.initiator_index] = tx_bits;

    Rng phase_rng(split_seed(seed, stream::kCarrierPhase));
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * kPi);
    phase0_.resize(n_nodes);
    for (auto& p : phase0_) p = uniform(phase_rng);

    build_paths();
    for (NodeId n = 0; n < n_nodes; ++n)
      noise_.emplace_back(cfg, split_seed(seed, stream::kNodeNoiseBase + n));
    nodes_.resize(n_nodes);

    // Initiator emits on its own clock: symbol k at k * Ts.
    for (std::size_t k = 0; k < tx_bits.size(); ++k)
      if (tx_bits[k]) emit(topo.initiator_index, static_cast<std::int64_t>(k) * ns_, k);

    idle_horizon_ = static_cast<std::int64_t>(tx_bits.size()) * ns_;
    scratch_.resize(static_cast<std::size_t>(nb_));
  }

  PacketTrace run() {
    std::priority_queue<PendingBuffer, std::vector<PendingBuffer>, std::greater<>> pending;
    for (NodeId n = 0; n < topo_.size(); ++n) {
      if (n == topo_.initiator_index) continue;
      nodes_[n].next_start = 0;
      pending.emplace(nb_, n);
    }
    while (!pending.empty()) {
      const NodeId n = pending.top().second;
      pending.pop();
      if (step(n)) pending.emplace(nodes_[n].next_start + nb_, n);
    }
    return std::move(trace_);
  }

 private:
  void build_paths() {
    const std::size_t n = topo_.size();
    paths_.assign(n * n, {});
    min_delay_ = std::numeric_limits<std::int64_t>::max();
    max_delay_ = 0;
    for (NodeId rx = 0; rx < n; ++rx) {
      for (NodeId tx = 0; tx < n; ++tx) {
        if (tx == rx) continue;
        for (const auto& p : path_model(topo_, tx, rx, cfg_)) {
          const std::int64_t d = sample_index(p.delay_s, fs_);
          paths_[rx * n + tx].push_back({p.gain, d});
          min_delay_ = std::min(min_delay_, d);
          max_delay_ = std::max(max_delay_, d);
        }
      }
    }
    if (n > 1 && min_delay_ + pulse_offset_ < 0)
      throw std::invalid_argument(
          "lattice too dense: the shaped pulse would arrive before its relay decision "
          "(grid spacing must exceed " +
          std::to_string(-pulse_offset_ / fs_ * kSpeedOfLight) + " m)");
    if (n == 1) min_delay_ = max_delay_ = 0;
  }

  const std::vector<ArrivalPath>& paths(NodeId rx, NodeId tx) const { return paths_[rx * topo_.size() + tx]; }

  void emit(NodeId tx, std::int64_t at, std::size_t symbol) {
    ScheduledPulse p{at, tx, std::polar(1.0, phase0_[tx])};
    auto it = std::upper_bound(schedule_.begin(), schedule_.end(), at,
                               [](std::int64_t t, const ScheduledPulse& s) { return t < s.emit; });
    schedule_.insert(it, p);
    trace_.emissions.push_back({TxEvent{tx, static_cast<double>(at) / fs_, phase0_[tx]}, symbol});
  }

  void synthesize(NodeId rx, std::int64_t start) {
    noise_[rx].fill(start, scratch_);
    // Pulses that overlap [start, start + nb) satisfy
    //   start - len - max_delay - offset < emit < start + nb - min_delay - offset.
    const std::int64_t lo = start - pulse_len_ - max_delay_ - pulse_offset_;
    const std::int64_t min_d = opt_.self_muting ? min_delay_ : 0;
    const std::int64_t hi = start + nb_ - min_d - pulse_offset_;
    auto it = std::upper_bound(schedule_.begin(), schedule_.end(), lo,
                               [](std::int64_t t, const ScheduledPulse& s) { return t < s.emit; });
    for (; it != schedule_.end() && it->emit < hi; ++it) {
      if (it->tx == rx) {
        if (opt_.self_muting) continue;
        // Debug path: hear yourself through a zero-length link.
        accumulate_arrival(scratch_, start, pulse_, it->emit + pulse_offset_, it->rotation);
        continue;
      }
      for (const auto& p : paths(rx, it->tx))
        accumulate_arrival(scratch_, start, pulse_, it->emit + p.delay + pulse_offset_, p.gain * it->rotation);
    }
    if (opt_.samples) opt_.samples(rx, start, scratch_);
  }

  void record(NodeId n, std::size_t symbol, int bit, std::int64_t decision, std::size_t buffer) {
    trace_.per_node_events[n].push_back(
        DetectionEvent{n, symbol, bit, static_cast<double>(decision) / fs_, buffer});
    trace_.per_node_bits[n].push_back(static_cast<std::uint8_t>(bit));
  }

  // Decides the node's pending buffer. Returns true if the node has another
  // buffer to listen to.
  bool step(NodeId n) {
    Node& node = nodes_[n];
    const std::int64_t start = node.next_start;
    const std::int64_t end = start + nb_;
    synthesize(n, start);
    const BufferVote vote = proc_.process(scratch_);
    if (opt_.votes) {
      const long symbol = node.mode == NodeMode::idle ? -1 : static_cast<long>(node.clock.symbol_index);
      opt_.votes(VoteRecord{n, symbol, node.buffer, static_cast<double>(start) / fs_, vote.above,
                            vote.retained, vote.pulse});
    }

    if (node.mode == NodeMode::idle) {
      if (vote.pulse) {
        node.anchor = end;
        node.clock = DetectorState::synced_at(static_cast<double>(end) / fs_, cfg_);
        record(n, 0, 1, end, node.buffer);
        emit(n, end, 0);
        node.relayed_this_symbol = true;
        return open_window(node, 1);
      }
      ++node.buffer;
      node.next_start = end;
      if (node.next_start >= idle_horizon_) {
        node.finished = true;
        return false;
      }
      return true;
    }

    const std::size_t k = node.clock.symbol_index;
    if (vote.pulse) {
      record(n, k, 1, end, node.buffer);
      emit(n, end, k);
      node.relayed_this_symbol = true;
      node.mode = NodeMode::transmitting_sleep;
    } else if (node.buffer + 1 == buffers_per_window_) {
      record(n, k, 0, end, node.buffer);
    } else {
      ++node.buffer;
      node.next_start = end;
      return true;
    }
    if (k + 1 >= trace_.tx_bits.size()) {
      node.finished = true;
      return false;
    }
    node.clock.advance(cfg_);
    return open_window(node, k + 1);
  }

  bool open_window(Node& node, std::size_t k) {
    node.mode = NodeMode::synced;
    node.relayed_this_symbol = false;
    if (k >= trace_.tx_bits.size()) {
      node.finished = true;
      return false;
    }
    node.window_start = node.anchor - nb_ + static_cast<std::int64_t>(k) * ns_;
    node.buffer = 0;
    node.next_start = node.window_start;
    return true;
  }

  const Topology& topo_;
  SimConfig cfg_;
  const EngineOptions& opt_;
  BufferProcessor proc_;
  double fs_ = 0.0;
  std::int64_t nb_ = 0;
  std::int64_t ns_ = 0;
  std::size_t buffers_per_window_ = 0;
  Waveform pulse_;
  std::int64_t pulse_offset_ = 0;
  std::int64_t pulse_len_ = 0;
  std::int64_t min_delay_ = 0;
  std::int64_t max_delay_ = 0;
  std::int64_t idle_horizon_ = 0;
  std::vector<std::vector<ArrivalPath>> paths_;
  std::vector<double> phase0_;
  std::vector<NoiseSource> noise_;
  std::vector<Node> nodes_;
  std::vector<ScheduledPulse> schedule_;
  std::vector<Complex> scratch_;
  PacketTrace trace_;
};

}  // namespace

PacketTrace run_packet(const Topology& topo, const Bits& payload, const SimConfig& cfg,
                       std::uint64_t seed, const EngineOptions& options) {
  if (payload.empty()) throw std::invalid_argument("run_packet: payload must not be empty");
  validate_config(cfg);
  Bits tx_bits;
  tx_bits.reserve(payload.size() + 1);
  tx_bits.push_back(1);
  for (auto b : payload) tx_bits.push_back(b ? 1 : 0);
  Flood flood(topo, tx_bits, cfg, seed, options);
  return flood.run();
}

Bits random_payload(std::size_t payload_len, std::uint64_t trial_seed) {
  Rng rng(split_seed(trial_seed, stream::kPayload));
  Bits bits(payload_len);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return bits;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::vector<PacketTrace> run_trials(const Topology& topo, std::size_t payload_len,
                                    std::size_t n_packets, const SimConfig& cfg, std::uint64_t seed,
                                    unsigned threads) {
  if (payload_len == 0) throw std::invalid_argument("run_trials: payload_len must be at least 1");
  validate_config(cfg);
  std::vector<PacketTrace> traces(n_packets);
  parallel_for(n_packets, threads, [&](std::size_t k) {
    const std::uint64_t trial_seed = split_seed(seed, k);
    traces[k] = run_packet(topo, random_payload(payload_len, trial_seed), cfg, trial_seed);
  });
  return traces;
}

std::string bits_to_hex(const Bits& bits) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) nibble = (nibble << 1) | (i + j < bits.size() && bits[i + j] ? 1u : 0u);
    out.push_back(kHex[nibble]);
  }
  return out;
}

std::string trace_to_json_line(const PacketTrace& trace) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(trace.config_hash));
  nlohmann::ordered_json j;
  j["seed"] = trace.trial_seed;
  j["config_hash"] = hash;
  j["n_bits"] = trace.tx_bits.size();
  j["tx_bits"] = bits_to_hex(trace.tx_bits);
  auto nodes = nlohmann::ordered_json::array();
  for (NodeId n = 0; n < trace.per_node_bits.size(); ++n) {
    nlohmann::ordered_json node;
    node["id"] = n;
    node["synced"] = trace.synced(n);
    node["bits"] = bits_to_hex(trace.per_node_bits[n]);
    auto times = nlohmann::ordered_json::array();
    for (const auto& e : trace.per_node_events[n]) times.push_back(std::round(e.decision_time_s * 1e9) / 1e3);
    node["times_us"] = std::move(times);
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  return j.dump();
}

}  // namespace ssflood
