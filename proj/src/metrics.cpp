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

#include "ssflood/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ssflood {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TrialMetrics compute_metrics(const PacketTrace& trace, const Topology& topo) {
  const std::size_t n_nodes = topo.size();
  if (trace.per_node_bits.size() != n_nodes) throw std::invalid_argument("trace does not match topology");
  const std::size_t n_bits = trace.tx_bits.size();
  const std::size_t payload = n_bits > 0 ? n_bits - 1 : 0;

  TrialMetrics m;
  m.ber_per_node.assign(n_nodes, kNaN);
  m.latency_per_node.assign(n_nodes, kNaN);
  m.hops_per_node.resize(n_nodes);
  m.latency_e2e_s = kNaN;

  double ber_sum = 0.0;
  std::size_t receivers = 0;
  for (NodeId n = 0; n < n_nodes; ++n) {
    m.hops_per_node[n] = hop_count(topo, n);
    if (n == trace.initiator) continue;
    ++receivers;
    const Bits& got = trace.per_node_bits[n];
    std::size_t errors = 0;
    for (std::size_t k = 1; k < n_bits; ++k) {
      const std::uint8_t decoded = k < got.size() ? got[k] : 0;
      errors += decoded != trace.tx_bits[k] ? 1 : 0;
    }
    m.ber_per_node[n] = payload ? static_cast<double>(errors) / static_cast<double>(payload) : 0.0;
    ber_sum += m.ber_per_node[n];
    if (got.empty()) ++m.unsynced_nodes;

    const auto& events = trace.per_node_events[n];
    if (!events.empty() && events.back().symbol_index + 1 == n_bits) {
      m.latency_per_node[n] = events.back().decision_time_s - trace.initiator_start_s;
      if (std::isnan(m.latency_e2e_s) || m.latency_per_node[n] > m.latency_e2e_s)
        m.latency_e2e_s = m.latency_per_node[n];
    }
  }
  m.ber_avg = receivers ? ber_sum / static_cast<double>(receivers) : 0.0;
  return m;
}

double frame_delivery_ratio(double ber, std::size_t frame_bits) {
  if (!(ber >= 0.0 && ber <= 1.0)) throw std::invalid_argument("frame_delivery_ratio: ber outside [0, 1]");
  return std::pow(1.0 - ber, static_cast<double>(frame_bits));
}

Summary aggregate(std::span<const TrialMetrics> metrics) {
  if (metrics.empty()) throw std::invalid_argument("aggregate: no trials");
  Summary s;
  s.trials = metrics.size();

  double ber = 0.0;
  std::vector<double> latencies;
  std::map<std::size_t, std::pair<double, std::size_t>> by_hops;
  for (const auto& m : metrics) {
    ber += m.ber_avg;
    if (!std::isnan(m.latency_e2e_s)) latencies.push_back(m.latency_e2e_s);
    for (std::size_t n = 0; n < m.latency_per_node.size(); ++n) {
      if (std::isnan(m.latency_per_node[n])) continue;
      auto& [sum, count] = by_hops[m.hops_per_node[n]];
      sum += m.latency_per_node[n];
      ++count;
    }
  }
  s.ber_avg = ber / static_cast<double>(metrics.size());

  if (latencies.empty()) {
    s.latency_mean_s = s.latency_p99_s = kNaN;
  } else {
    double sum = 0.0;
    for (double v : latencies) sum += v;
    s.latency_mean_s = sum / static_cast<double>(latencies.size());
    std::sort(latencies.begin(), latencies.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(latencies.size())));
    s.latency_p99_s = latencies[std::max<std::size_t>(rank, 1) - 1];
  }
  for (const auto& [hops, acc] : by_hops)
    s.latency_by_hops.push_back({hops, acc.first / static_cast<double>(acc.second), acc.second});
  return s;
}

}  // namespace ssflood
