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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ssflood/core.hpp"
#include "ssflood/detector.hpp"
#include "ssflood/phy.hpp"
#include "ssflood/topology.hpp"

namespace ssflood {

using Bits = std::vector<std::uint8_t>;

enum class NodeMode { idle, synced, transmitting_sleep };

/// A radiated pulse and the sender's symbol numbering for it.
struct TxRecord {
  TxEvent event;
  std::size_t symbol_index = 0;
};

/// Full record of one flood.
struct PacketTrace {
  Bits tx_bits;  // tx_bits[0] == 1 is the preamble
  /// Decoded bits per node, preamble included (length tx_bits.size()).
  /// Empty for nodes that never synchronised. The initiator's entry is
  /// tx_bits.
  std::vector<Bits> per_node_bits;
  std::vector<std::vector<DetectionEvent>> per_node_events;
  std::vector<TxRecord> emissions;
  double initiator_start_s = 0.0;
  std::uint64_t trial_seed = 0;
  std::uint64_t config_hash = 0;
  NodeId initiator = 0;

  bool synced(NodeId n) const { return !per_node_bits[n].empty(); }
};

struct EngineOptions {
  /// A node never hears its own pulses. Turning this off is a debug aid.
  bool self_muting = true;
  VoteSink votes;
  /// Called with each synthesised receive buffer (node, first grid index, samples).
  std::function<void(NodeId, std::int64_t, std::span<const Complex>)> samples;
};

/// Simulates one packet. A preamble 1 is prepended to `payload`.
/// Throws std::invalid_argument for an empty payload, an invalid config, or a
/// lattice so dense that a relay's pulse would reach a neighbour before the
/// relay decided to send it.
PacketTrace run_packet(const Topology& topo, const Bits& payload, const SimConfig& cfg,
                       std::uint64_t seed, const EngineOptions& options = {});

/// Payload bits for a trial, drawn from the trial seed's payload stream.
Bits random_payload(std::size_t payload_len, std::uint64_t trial_seed);

/// `n_packets` independent trials; trial k uses split_seed(seed, k). The
/// result does not depend on `threads`.
std::vector<PacketTrace> run_trials(const Topology& topo, std::size_t payload_len,
                                    std::size_t n_packets, const SimConfig& cfg, std::uint64_t seed,
                                    unsigned threads = 1);

/// Runs `fn(i)` for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// One JSON object on one line: seed, config hash, per-node bits as hex,
/// per-node decision times in microseconds (3 decimals).
std::string trace_to_json_line(const PacketTrace& trace);

std::string bits_to_hex(const Bits& bits);

}  // namespace ssflood
