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

#include "ssflood/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ssflood/topology.hpp"

namespace ssflood {

namespace {

using nlohmann::json;

bool is_grid_key(const std::string& key) { return key == "rows" || key == "cols" || key == "grid_side"; }

bool is_config_key(const std::string& key) {
  static const json fields = json::parse(config_to_text(SimConfig{}));
  return key != "rng_seed" && fields.contains(key);
}

// Re-derives the dependent timing fields unless they are swept explicitly.
SimConfig apply_config_value(const SimConfig& base, const std::string& key, double value,
                             const std::map<std::string, double>& cell) {
  json j = json::parse(config_to_text(base));
  if (j[key].is_boolean()) j[key] = value != 0.0;
  else j[key] = value;
  if ((key == "window_L_s" || key == "detections_per_window") && !cell.contains("buffer_duration_s"))
    j.erase("buffer_duration_s");
  if (key == "symbol_interval_Ts_s" && !cell.contains("data_rate_bps")) j.erase("data_rate_bps");
  return config_from_text(j.dump());
}

std::size_t as_count(double v, const std::string& key) {
  if (!(v >= 1.0) || v != std::floor(v)) throw std::invalid_argument("sweep key '" + key + "' needs positive integers");
  return static_cast<std::size_t>(v);
}

struct Cell {
  double d = 0.0;
  std::size_t bits = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  SimConfig cfg;
  std::vector<double> sweep_values;
};

std::vector<Cell> expand(const ExperimentSpec& spec) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : spec.sweep) keys.push_back(k);

  std::vector<std::vector<double>> combos{{}};
  for (const auto& k : keys) {
    std::vector<std::vector<double>> next;
    for (const auto& c : combos)
      for (double v : spec.sweep.at(k)) {
        auto e = c;
        e.push_back(v);
        next.push_back(std::move(e));
      }
    combos = std::move(next);
  }

  std::vector<Cell> cells;
  for (double d : spec.distances_m)
    for (std::size_t bits : spec.packet_bits_list)
      for (const auto& combo : combos) {
        Cell cell{d, bits, spec.rows, spec.cols, spec.base_config, combo};
        std::map<std::string, double> named;
        for (std::size_t i = 0; i < keys.size(); ++i) named[keys[i]] = combo[i];
        for (const auto& [k, v] : named) {
          if (k == "rows") cell.rows = as_count(v, k);
          else if (k == "cols") cell.cols = as_count(v, k);
          else if (k == "grid_side") cell.rows = cell.cols = as_count(v, k);
          else cell.cfg = apply_config_value(cell.cfg, k, v, named);
        }
        cell.cfg = validate_config(cell.cfg);
        cells.push_back(std::move(cell));
      }
  return cells;
}

std::string fmt(const char* f, double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

double parse_num(const std::string& s) {
  if (s == "nan") return std::nan("");
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

std::size_t side_for(std::size_t n_nodes) {
  const auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_nodes))));
  return s * s == n_nodes ? s : 0;
}

}  // namespace

void validate_spec(const ExperimentSpec& spec) {
  if (spec.n_packets == 0) throw std::invalid_argument("n_packets must be positive");
  if (spec.rows == 0 || spec.cols == 0) throw std::invalid_argument("grid needs at least one row and column");
  if (spec.distances_m.empty()) throw std::invalid_argument("distances_m is empty");
  for (double d : spec.distances_m)
    if (!(d > 0.0)) throw std::invalid_argument("grid distances must be positive");
  if (spec.packet_bits_list.empty()) throw std::invalid_argument("packet_bits_list is empty");
  for (std::size_t b : spec.packet_bits_list)
    if (b < 2) throw std::invalid_argument("a packet needs the preamble and at least one payload bit");
  for (const auto& [k, v] : spec.sweep) {
    if (!is_grid_key(k) && !is_config_key(k)) throw std::invalid_argument("unknown sweep key '" + k + "'");
    if (v.empty()) throw std::invalid_argument("sweep key '" + k + "' has no values");
  }
  validate_config(spec.base_config);
  expand(spec);  // every cell must yield a valid config
}

ExperimentSpec spec_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("spec parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("spec must be a JSON object");

  ExperimentSpec s;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "id") s.id = v.get<std::string>();
      else if (key == "grid") {
        const auto g = v.get<std::vector<std::size_t>>();
        if (g.size() != 2) throw std::invalid_argument("grid must be [rows, cols]");
        s.rows = g[0];
        s.cols = g[1];
      } else if (key == "area_side_m") s.area_side_m = v.get<double>();
      else if (key == "distances_m") s.distances_m = v.get<std::vector<double>>();
      else if (key == "packet_bits_list") s.packet_bits_list = v.get<std::vector<std::size_t>>();
      else if (key == "n_packets") s.n_packets = v.get<std::size_t>();
      else if (key == "base_config") s.base_config = config_from_text(v.dump());
      else if (key == "sweep") s.sweep = v.get<std::map<std::string, std::vector<double>>>();
      else throw std::invalid_argument("unknown spec key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("spec type error: ") + e.what());
  }
  validate_spec(s);
  return s;
}

std::string spec_to_text(const ExperimentSpec& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["grid"] = {s.rows, s.cols};
  j["area_side_m"] = s.area_side_m;
  j["distances_m"] = s.distances_m;
  j["packet_bits_list"] = s.packet_bits_list;
  j["n_packets"] = s.n_packets;
  j["base_config"] = nlohmann::ordered_json::parse(config_to_text(s.base_config));
  j["sweep"] = s.sweep;
  return j.dump(2) + "\n";
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return spec_from_text(ss.str());
}

std::vector<std::string> builtin_experiment_ids() { return {"fig5", "fig7", "fig8", "fig9"}; }

ExperimentSpec builtin_experiment(const std::string& id) {
  ExperimentSpec s;
  s.id = id;
  s.n_packets = 100;
  if (id == "fig5") {
    s.distances_m = {50, 60, 75, 100, 125, 150, 175, 200};
    s.packet_bits_list = {64};
  } else if (id == "fig7") {
    s.distances_m = {100, 200};
    s.packet_bits_list = {64, 128, 256, 512};
  } else if (id == "fig8") {
    s.rows = s.cols = 8;
    s.distances_m = {100};
    s.packet_bits_list = {64};
  } else if (id == "fig9") {
    s.distances_m = {50, 75, 100, 125};
    s.packet_bits_list = {64};
    s.sweep["grid_side"] = {4, 5, 6, 7, 8, 9};
  } else {
    throw std::invalid_argument("unknown experiment '" + id + "'");
  }
  return s;
}

ResultTable run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  validate_spec(spec);
  const auto cells = expand(spec);
  const std::uint64_t seed = spec.base_config.rng_seed;

  std::vector<Topology> topos;
  for (const auto& c : cells) topos.push_back(build_grid(c.rows, c.cols, c.d, spec.area_side_m));

  // One job per (cell, trial) so threads also spread over cells.
  const std::size_t per_cell = spec.n_packets;
  std::vector<PacketTrace> traces(cells.size() * per_cell);
  std::vector<TrialMetrics> metrics(traces.size());
  parallel_for(traces.size(), options.threads, [&](std::size_t job) {
    const std::size_t ci = job / per_cell;
    const std::uint64_t trial_seed = split_seed(split_seed(seed, ci), job % per_cell);
    const Cell& c = cells[ci];
    traces[job] = run_packet(topos[ci], random_payload(c.bits - 1, trial_seed), c.cfg, trial_seed);
    metrics[job] = compute_metrics(traces[job], topos[ci]);
  });

  ResultTable table;
  table.experiment_id = spec.id;
  for (const auto& [k, v] : spec.sweep) table.sweep_keys.push_back(k);
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& c = cells[ci];
    const Summary s = aggregate(std::span<const TrialMetrics>(metrics).subspan(ci * per_cell, per_cell));
    ResultRow r;
    r.grid_d_m = c.d;
    r.rows = c.rows;
    r.cols = c.cols;
    r.packet_bits = c.bits;
    r.trials = s.trials;
    r.ber_avg = s.ber_avg;
    r.latency_mean_us = s.latency_mean_s * 1e6;
    r.latency_p99_us = s.latency_p99_s * 1e6;
    r.seed = split_seed(seed, ci);
    r.sweep_values = c.sweep_values;
    r.latency_by_hops = s.latency_by_hops;
    table.rows.push_back(std::move(r));
  }
  if (options.traces) {
    options.traces->clear();
    for (std::size_t ci = 0; ci < cells.size(); ++ci)
      options.traces->emplace_back(std::make_move_iterator(traces.begin() + ci * per_cell),
                                   std::make_move_iterator(traces.begin() + (ci + 1) * per_cell));
  }
  return table;
}

std::string results_csv(const ResultTable& t) {
  std::string out = "experiment_id,grid_d_m,n_nodes,packet_bits,trials,ber_avg,latency_mean_us,latency_p99_us,seed";
  for (const auto& k : t.sweep_keys) out += "," + k;
  out += "\n";
  for (const auto& r : t.rows) {
    out += t.experiment_id + "," + fmt("%.3f", r.grid_d_m) + "," + std::to_string(r.n_nodes()) + "," +
           std::to_string(r.packet_bits) + "," + std::to_string(r.trials) + "," + fmt("%.8f", r.ber_avg) + "," +
           fmt("%.3f", r.latency_mean_us) + "," + fmt("%.3f", r.latency_p99_us) + "," + std::to_string(r.seed);
    for (double v : r.sweep_values) out += "," + fmt("%.17g", v);
    out += "\n";
  }
  return out;
}

void write_results_csv(const ResultTable& t, const std::filesystem::path& path) { write_text(path, results_csv(t)); }

std::string hops_csv(const ResultTable& t) {
  std::string out = "grid_d_m,n_nodes,packet_bits,hops,latency_mean_us\n";
  for (const auto& r : t.rows)
    for (const auto& h : r.latency_by_hops)
      out += fmt("%.3f", r.grid_d_m) + "," + std::to_string(r.n_nodes()) + "," + std::to_string(r.packet_bits) +
             "," + std::to_string(h.hops) + "," + fmt("%.3f", h.latency_mean_s * 1e6) + "\n";
  return out;
}

void write_hops_csv(const ResultTable& t, const std::filesystem::path& path) { write_text(path, hops_csv(t)); }

ResultTable read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path.string() + ": empty file");
  const auto header = split_csv(line);
  auto col = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  };

  ResultTable t;
  const bool per_hop = col("hops") >= 0;
  if (per_hop) {
    t.experiment_id = "hops";
    for (const char* need : {"grid_d_m", "n_nodes", "packet_bits", "latency_mean_us"})
      if (col(need) < 0) throw std::invalid_argument(path.string() + ": missing column " + need);
  } else {
    for (const char* need : {"experiment_id", "grid_d_m", "n_nodes", "packet_bits", "trials", "ber_avg",
                             "latency_mean_us", "latency_p99_us", "seed"})
      if (col(need) < 0) throw std::invalid_argument(path.string() + ": missing column " + need);
    for (std::size_t i = static_cast<std::size_t>(col("seed")) + 1; i < header.size(); ++i)
      t.sweep_keys.push_back(header[i]);
  }

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) throw std::invalid_argument(path.string() + ": ragged row");
    auto at = [&](const char* name) { return f[static_cast<std::size_t>(col(name))]; };
    const auto n_nodes = static_cast<std::size_t>(parse_num(at("n_nodes")));
    const std::size_t side = side_for(n_nodes);
    const double d = parse_num(at("grid_d_m"));
    const auto bits = static_cast<std::size_t>(parse_num(at("packet_bits")));

    if (per_hop) {
      // Rows of one cell share (d, n, bits) and arrive consecutively.
      if (t.rows.empty() || t.rows.back().grid_d_m != d || t.rows.back().n_nodes() != n_nodes ||
          t.rows.back().packet_bits != bits) {
        ResultRow r;
        r.grid_d_m = d;
        r.rows = side ? side : n_nodes;
        r.cols = side ? side : 1;
        r.packet_bits = bits;
        t.rows.push_back(r);
      }
      t.rows.back().latency_by_hops.push_back(
          {static_cast<std::size_t>(parse_num(at("hops"))), parse_num(at("latency_mean_us")) * 1e-6, 0});
      continue;
    }
    if (t.rows.empty()) t.experiment_id = at("experiment_id");
    ResultRow r;
    r.grid_d_m = d;
    r.rows = side ? side : n_nodes;
    r.cols = side ? side : 1;
    r.packet_bits = bits;
    r.trials = static_cast<std::size_t>(parse_num(at("trials")));
    r.ber_avg = parse_num(at("ber_avg"));
    r.latency_mean_us = parse_num(at("latency_mean_us"));
    r.latency_p99_us = parse_num(at("latency_p99_us"));
    r.seed = std::stoull(at("seed"));
    for (std::size_t i = static_cast<std::size_t>(col("seed")) + 1; i < f.size(); ++i)
      r.sweep_values.push_back(parse_num(f[i]));
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace ssflood
