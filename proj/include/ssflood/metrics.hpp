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

#include <cstddef>
#include <span>
#include <vector>

#include "ssflood/engine.hpp"
#include "ssflood/topology.hpp"

namespace ssflood {

/// Per-trial figures of merit.
///
/// BER counts payload bits only (the preamble is a sync symbol). Nodes that
/// never synchronised are scored as having decoded all zeros. Latencies run
/// from the initiator's first emission (the preamble) to a node's decision
/// on the last symbol; they are NaN for nodes without a decision.
struct TrialMetrics {
  std::vector<double> ber_per_node;  // NaN at the initiator
  double ber_avg = 0.0;              // mean over non-initiator nodes
  double latency_e2e_s = 0.0;        // max over nodes that decided; NaN if none did
  std::vector<double> latency_per_node;
  std::vector<std::size_t> hops_per_node;
  std::size_t unsynced_nodes = 0;
};

TrialMetrics compute_metrics(const PacketTrace& trace, const Topology& topo);

/// (1 - ber)^frame_bits, assuming independent bit errors.
/// Throws std::invalid_argument when ber is outside [0, 1].
double frame_delivery_ratio(double ber, std::size_t frame_bits);

struct HopLatency {
  std::size_t hops = 0;
  double latency_mean_s = 0.0;
  std::size_t samples = 0;
};

struct Summary {
  std::size_t trials = 0;
  double ber_avg = 0.0;
  double latency_mean_s = 0.0;
  double latency_p99_s = 0.0;  // nearest-rank
  std::vector<HopLatency> latency_by_hops;  // ascending hops
};

/// Throws std::invalid_argument for an empty list.
Summary aggregate(std::span<const TrialMetrics> metrics);

}  // namespace ssflood
