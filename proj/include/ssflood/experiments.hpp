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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ssflood/core.hpp"
#include "ssflood/engine.hpp"
#include "ssflood/metrics.hpp"

namespace ssflood {

/// A sweep over grid distance, packet size and any number of extra
/// parameters. Cells are the Cartesian product, distances outermost, then
/// packet sizes, then sweep keys in lexicographic key order.
///
/// A packet of k bits carries the preamble plus k - 1 random payload bits.
struct ExperimentSpec {
  std::string id = "custom";  // fig5, fig7, fig8, fig9 or custom
  std::size_t rows = 4;
  std::size_t cols = 4;
  double area_side_m = kDefaultAreaSide_m;
  std::vector<double> distances_m{50.0};
  std::vector<std::size_t> packet_bits_list{64};
  std::size_t n_packets = 100;
  SimConfig base_config;  // base_config.rng_seed seeds the whole experiment
  /// Keys: any numeric or boolean SimConfig field, or rows, cols, grid_side.
  std::map<std::string, std::vector<double>> sweep;
};

/// Throws std::invalid_argument for an unknown sweep key, n_packets == 0, a
/// packet shorter than 2 bits or an invalid base config.
void validate_spec(const ExperimentSpec& spec);

ExperimentSpec spec_from_text(const std::string& text);
std::string spec_to_text(const ExperimentSpec& spec);
ExperimentSpec load_spec(const std::filesystem::path& path);

std::vector<std::string> builtin_experiment_ids();
/// Default configuration; throws std::invalid_argument for an unknown id.
ExperimentSpec builtin_experiment(const std::string& id);

struct ResultRow {
  double grid_d_m = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t packet_bits = 0;
  std::size_t trials = 0;
  double ber_avg = 0.0;
  double latency_mean_us = 0.0;
  double latency_p99_us = 0.0;
  std::uint64_t seed = 0;  // cell seed; trial k uses split_seed(seed, k)
  std::vector<double> sweep_values;  // aligned with ResultTable::sweep_keys
  std::vector<HopLatency> latency_by_hops;

  std::size_t n_nodes() const { return rows * cols; }
};

struct ResultTable {
  std::string experiment_id;
  std::vector<std::string> sweep_keys;
  std::vector<ResultRow> rows;
};

struct RunOptions {
  unsigned threads = 1;
  /// Receives every trace, cell by cell in row order (optional).
  std::vector<std::vector<PacketTrace>>* traces = nullptr;
};

ResultTable run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

// CSV: experiment_id,grid_d_m,n_nodes,packet_bits,trials,ber_avg,
//      latency_mean_us,latency_p99_us,seed[,<sweep keys>...]
void write_results_csv(const ResultTable& table, const std::filesystem::path& path);
std::string results_csv(const ResultTable& table);
// CSV: grid_d_m,n_nodes,packet_bits,hops,latency_mean_us
std::string hops_csv(const ResultTable& table);
void write_hops_csv(const ResultTable& table, const std::filesystem::path& path);

/// Parses a CSV written by write_results_csv or write_hops_csv.
ResultTable read_results_csv(const std::filesystem::path& path);

/// Writes one SVG per table into `out_dir` and returns its path. The figure
/// follows the experiment id: BER vs distance (fig5), latency vs packet size
/// per distance (fig7), latency vs hops (fig8 or any per-hop table), BER vs
/// node count per distance (fig9); custom tables plot BER vs distance.
/// Throws std::invalid_argument for an empty table; nothing is written then.
std::filesystem::path emit_plots(const ResultTable& table, const std::filesystem::path& out_dir,
                                 const std::string& stem = "");

}  // namespace ssflood
