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

#include "ssflood/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>

namespace ssflood {

Topology build_grid(std::size_t rows, std::size_t cols, double spacing_m, double area_side_m) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("grid needs at least one row and column");
  if (!(spacing_m > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  const double extent = static_cast<double>(std::max(rows, cols) - 1) * spacing_m;
  if (extent > area_side_m)
    throw std::invalid_argument("grid extent " + std::to_string(extent) + " m exceeds area side " +
                                std::to_string(area_side_m) + " m");

  Topology t;
  t.rows = rows;
  t.cols = cols;
  t.grid_spacing_d_m = spacing_m;
  t.area_side_m = area_side_m;
  t.initiator_index = 0;
  t.node_positions.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      t.node_positions.push_back({static_cast<double>(c) * spacing_m, static_cast<double>(r) * spacing_m});
  return t;
}

std::size_t hop_count(const Topology& topo, NodeId node) {
  if (node >= topo.size()) throw std::out_of_range("node id out of range");
  const auto dr = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
  const NodeId i = topo.initiator_index;
  return std::max(dr(topo.row_of(node), topo.row_of(i)), dr(topo.col_of(node), topo.col_of(i)));
}

std::size_t max_hop_count(const Topology& topo) {
  std::size_t h = 0;
  for (NodeId n = 0; n < topo.size(); ++n) h = std::max(h, hop_count(topo, n));
  return h;
}

double pairwise_distance(const Topology& topo, NodeId a, NodeId b) {
  if (a >= topo.size() || b >= topo.size()) throw std::out_of_range("node id out of range");
  const auto& pa = topo.node_positions[a];
  const auto& pb = topo.node_positions[b];
  return std::hypot(pa.x_m - pb.x_m, pa.y_m - pb.y_m);
}

void write_topology_csv(const Topology& topo, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write topology file " + path.string());
  out << "node_id,x_m,y_m,hops\n" << std::fixed << std::setprecision(3);
  for (NodeId n = 0; n < topo.size(); ++n)
    out << n << ',' << topo.node_positions[n].x_m << ',' << topo.node_positions[n].y_m << ','
        << hop_count(topo, n) << '\n';
}

}  // namespace ssflood
