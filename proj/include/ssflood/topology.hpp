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
#include <filesystem>
#include <vector>

#include "ssflood/core.hpp"

namespace ssflood {

struct Position {
  double x_m = 0.0;
  double y_m = 0.0;
};

/// A rectangular lattice inside a square walled area [0, area_side_m]^2.
/// Nodes are numbered row-major; node 0 sits at the origin corner and is the
/// initiator.
struct Topology {
  std::vector<Position> node_positions;
  NodeId initiator_index = 0;
  double grid_spacing_d_m = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double area_side_m = 0.0;

  std::size_t size() const { return node_positions.size(); }
  std::size_t row_of(NodeId n) const { return n / cols; }
  std::size_t col_of(NodeId n) const { return n % cols; }
};

inline constexpr double kDefaultAreaSide_m = 2000.0;  // 4 km^2

/// Throws std::invalid_argument when the lattice does not fit in the area.
Topology build_grid(std::size_t rows, std::size_t cols, double spacing_m,
                    double area_side_m = kDefaultAreaSide_m);

/// Chebyshev distance on lattice indices from the initiator. A geometric
/// label only; who actually hears whom is decided by the channel.
std::size_t hop_count(const Topology& topo, NodeId node);

/// Largest hop_count over the lattice.
std::size_t max_hop_count(const Topology& topo);

double pairwise_distance(const Topology& topo, NodeId a, NodeId b);

/// CSV with columns node_id,x_m,y_m,hops.
void write_topology_csv(const Topology& topo, const std::filesystem::path& path);

}  // namespace ssflood
