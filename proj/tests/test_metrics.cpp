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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssflood/metrics.hpp"

using namespace ssflood;

namespace {

// Hand-built trace: 2x2 grid, node 3 never synced.
PacketTrace toy_trace() {
  PacketTrace tr;
  tr.tx_bits = {1, 1, 0, 1, 1, 0, 0, 0, 1};
  tr.per_node_bits = {tr.tx_bits, tr.tx_bits, tr.tx_bits, {}};
  tr.per_node_bits[2][2] = 1;  // one error
  tr.per_node_events.resize(4);
  for (NodeId n = 1; n < 3; ++n)
    for (std::size_t k = 0; k < tr.tx_bits.size(); ++k)
      tr.per_node_events[n].push_back({n, k, tr.per_node_bits[n][k], k * 10e-6 + n * 1e-7, 0});
  return tr;
}

}  // namespace

TEST_CASE("per-node BER and latency") {
  const auto t = build_grid(2, 2, 60.0);
  const auto m = compute_metrics(toy_trace(), t);
  CHECK(std::isnan(m.ber_per_node[0]));
  CHECK(m.ber_per_node[1] == 0.0);
  CHECK(m.ber_per_node[2] == doctest::Approx(1.0 / 8));
  CHECK(m.ber_per_node[3] == doctest::Approx(4.0 / 8));  // all-zero output vs four 1-bits
  CHECK(m.ber_avg == doctest::Approx((0.0 + 1.0 / 8 + 4.0 / 8) / 3));
  CHECK(m.unsynced_nodes == 1);
  CHECK(m.latency_per_node[2] == doctest::Approx(80e-6 + 2e-7));
  CHECK(m.latency_e2e_s == doctest::Approx(80e-6 + 2e-7));
  CHECK(std::isnan(m.latency_per_node[3]));
  CHECK(m.hops_per_node[3] == 1);
}

TEST_CASE("frame delivery ratio") {
  CHECK(frame_delivery_ratio(0.0004, 32) == doctest::Approx(0.98729).epsilon(1e-5));
  CHECK(frame_delivery_ratio(0.0, 1000) == 1.0);
  CHECK(frame_delivery_ratio(1.0, 1) == 0.0);
  CHECK_THROWS_AS(frame_delivery_ratio(1.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(frame_delivery_ratio(NAN, 4), std::invalid_argument);
  for (double b = 0.0; b < 0.05; b += 0.001) {
    CHECK(frame_delivery_ratio(b + 0.001, 32) <= frame_delivery_ratio(b, 32));
    CHECK(frame_delivery_ratio(b, 64) <= frame_delivery_ratio(b, 32));
  }
}

TEST_CASE("aggregation") {
  const auto t = build_grid(2, 2, 60.0);
  const auto one = compute_metrics(toy_trace(), t);
  std::vector<TrialMetrics> same(100, one);
  const auto s = aggregate(same);
  CHECK(s.trials == 100);
  CHECK(s.ber_avg == doctest::Approx(one.ber_avg));
  CHECK(s.latency_mean_s == doctest::Approx(one.latency_e2e_s));
  CHECK(s.latency_p99_s == doctest::Approx(one.latency_e2e_s));

  TrialMetrics a, b;
  a.ber_avg = 0.0;
  b.ber_avg = 0.02;
  a.latency_e2e_s = b.latency_e2e_s = 1.0;
  const std::vector<TrialMetrics> two{a, b};
  CHECK(aggregate(two).ber_avg == doctest::Approx(0.01));
  CHECK_THROWS_AS(aggregate(std::vector<TrialMetrics>{}), std::invalid_argument);

  std::vector<TrialMetrics> spread(100);
  for (int i = 0; i < 100; ++i) spread[i].latency_e2e_s = i + 1;
  CHECK(aggregate(spread).latency_p99_s == 99.0);
}

TEST_CASE("latency grows with hop count on a clean lattice") {
  SimConfig c;
  c.noise_enabled = false;
  const auto t = build_grid(8, 8, 100.0);
  std::vector<TrialMetrics> ms;
  for (const auto& tr : run_trials(t, 63, 3, c, 21)) ms.push_back(compute_metrics(tr, t));
  const auto s = aggregate(ms);
  REQUIRE(s.latency_by_hops.size() == 7);
  for (std::size_t i = 0; i < s.latency_by_hops.size(); ++i) CHECK(s.latency_by_hops[i].hops == i + 1);
  for (std::size_t i = 1; i < s.latency_by_hops.size(); ++i)
    CHECK(s.latency_by_hops[i].latency_mean_s >= s.latency_by_hops[i - 1].latency_mean_s);
}
