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

#include "ssflood/topology.hpp"

using namespace ssflood;

TEST_CASE("grid sizes and extent") {
  const auto t = build_grid(4, 4, 50.0, 2000.0);
  CHECK(t.size() == 16);
  double max_d = 0.0;
  for (NodeId a = 0; a < t.size(); ++a)
    for (NodeId b = 0; b < t.size(); ++b) max_d = std::max(max_d, pairwise_distance(t, a, b));
  CHECK(max_d == doctest::Approx(150.0 * std::sqrt(2.0)));
  CHECK(build_grid(8, 8, 100.0, 2000.0).size() == 64);
  CHECK(build_grid(1, 1, 100.0).size() == 1);
  CHECK_THROWS_AS(build_grid(30, 30, 100.0, 2000.0), std::invalid_argument);
}

TEST_CASE("hop count is Chebyshev distance from the initiator") {
  const auto t = build_grid(8, 8, 100.0);
  CHECK(hop_count(t, 0) == 0);
  CHECK(hop_count(t, 9) == 1);  // diagonal neighbour
  CHECK(hop_count(t, 63) == 7);
  CHECK(hop_count(t, 7) == 7);
  CHECK(max_hop_count(t) == 7);
  CHECK(max_hop_count(build_grid(4, 4, 50.0)) == 3);
}

TEST_CASE("pairwise distances") {
  const auto t = build_grid(4, 4, 100.0);
  CHECK(pairwise_distance(t, 0, 1) == doctest::Approx(100.0));
  CHECK(pairwise_distance(t, 0, 5) == doctest::Approx(141.42).epsilon(1e-4));
  CHECK(pairwise_distance(t, 3, 3) == 0.0);
}

TEST_CASE("triangle inequality over all triples") {
  const auto t = build_grid(5, 5, 73.0);
  for (NodeId a = 0; a < t.size(); ++a)
    for (NodeId b = 0; b < t.size(); ++b)
      for (NodeId c = 0; c < t.size(); ++c)
        CHECK(pairwise_distance(t, a, c) <= pairwise_distance(t, a, b) + pairwise_distance(t, b, c) + 1e-9);
}
