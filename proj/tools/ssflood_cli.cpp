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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ssflood/core.hpp"
#include "ssflood/engine.hpp"
#include "ssflood/experiments.hpp"
#include "ssflood/metrics.hpp"
#include "ssflood/simd/kernels.hpp"
#include "ssflood/topology.hpp"

namespace fs = std::filesystem;
using namespace ssflood;

namespace {

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out_dir = "results";
  unsigned threads = 1;
  bool traces = false;
  bool no_plot = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--seed", f.seed, "Master seed (overrides base_config.rng_seed)");
  cmd->add_option("--trials", f.trials, "Packets per cell (overrides n_packets)")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--traces", f.traces, "Also write <id>_traces.jsonl");
  cmd->add_flag("--no-plot", f.no_plot, "Skip SVG output");
}

int run_spec(ExperimentSpec spec, const RunFlags& f) {
  if (f.seed) spec.base_config.rng_seed = *f.seed;
  if (f.trials) spec.n_packets = *f.trials;
  std::vector<std::vector<PacketTrace>> traces;
  RunOptions opts;
  opts.threads = f.threads;
  if (f.traces) opts.traces = &traces;

  const ResultTable t = run_experiment(spec, opts);
  const fs::path dir = f.out_dir;
  fs::create_directories(dir);
  write_results_csv(t, dir / (spec.id + ".csv"));
  write_hops_csv(t, dir / (spec.id + "_hops.csv"));
  std::ofstream(dir / (spec.id + "_spec.json")) << spec_to_text(spec);
  if (f.traces) {
    std::ofstream out(dir / (spec.id + "_traces.jsonl"));
    for (const auto& cell : traces)
      for (const auto& tr : cell) out << trace_to_json_line(tr) << "\n";
  }
  if (!f.no_plot) {
    emit_plots(t, dir);
    if (spec.id == "fig8") {
      ResultTable h = t;
      h.experiment_id = "hops";
      emit_plots(h, dir, spec.id + "_hops");
    }
  }
  std::cout << results_csv(t);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronous-flooding simulator for pulse-based wireless sensor networks"};
  app.require_subcommand(1);
  std::string isa;
  app.add_option("--isa", isa, "Force kernel set: scalar or avx2")->check(CLI::IsMember({"scalar", "avx2"}));

  app.add_subcommand("list-experiments", "List built-in experiments");

  RunFlags rep_flags;
  std::string rep_id;
  auto* rep = app.add_subcommand("reproduce", "Run a built-in experiment");
  rep->add_option("id", rep_id, "Experiment id")->required();
  add_run_flags(rep, rep_flags);

  RunFlags run_flags;
  std::string spec_path;
  auto* run = app.add_subcommand("run", "Run an experiment spec file (JSON)");
  run->add_option("spec", spec_path, "Spec file")->required()->check(CLI::ExistingFile);
  add_run_flags(run, run_flags);

  std::string plot_csv, plot_dir = "results";
  auto* plot = app.add_subcommand("plot", "Render an SVG from a results CSV");
  plot->add_option("csv", plot_csv, "Results or per-hop CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out-dir", plot_dir, "Output directory")->capture_default_str();

  std::string cfg_out;
  auto* cfg_cmd = app.add_subcommand("config", "Print the default config (or write it to --out)");
  cfg_cmd->add_option("--out", cfg_out, "Destination file");

  std::size_t rows = 4, cols = 4, payload_bits = 63;
  double spacing = 100.0;
  std::uint64_t seed = 1;
  std::string config_path, out_dir = "debug";
  std::optional<NodeId> dump_node;
  bool no_mute = false;
  auto* pkt = app.add_subcommand("packet", "Simulate one packet and dump its trace, votes and samples");
  pkt->add_option("--rows", rows)->capture_default_str();
  pkt->add_option("--cols", cols)->capture_default_str();
  pkt->add_option("--spacing", spacing, "Grid distance in metres")->capture_default_str();
  pkt->add_option("--payload-bits", payload_bits, "Payload bits after the preamble")->capture_default_str();
  pkt->add_option("--seed", seed, "Trial seed")->capture_default_str();
  pkt->add_option("--config", config_path, "Config file (JSON)")->check(CLI::ExistingFile);
  pkt->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  pkt->add_option("--dump-node", dump_node, "Write this node's received samples to CSV");
  pkt->add_flag("--no-self-muting", no_mute, "Let nodes hear their own pulses");

  auto* topo_cmd = app.add_subcommand("topology", "Write the grid layout as CSV");
  std::string topo_out = "topology.csv";
  topo_cmd->add_option("--rows", rows)->capture_default_str();
  topo_cmd->add_option("--cols", cols)->capture_default_str();
  topo_cmd->add_option("--spacing", spacing)->capture_default_str();
  topo_cmd->add_option("--out", topo_out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!isa.empty()) simd::set_active_isa(isa == "avx2" ? simd::Isa::avx2 : simd::Isa::scalar);

    if (app.got_subcommand("list-experiments")) {
      for (const auto& id : builtin_experiment_ids()) {
        const auto s = builtin_experiment(id);
        std::printf("%-5s grid %zux%zu, %zu distance(s), %zu packet size(s), %zu sweep key(s), %zu packets/cell\n",
                    id.c_str(), s.rows, s.cols, s.distances_m.size(), s.packet_bits_list.size(), s.sweep.size(),
                    s.n_packets);
      }
      return 0;
    }
    if (*rep) return run_spec(builtin_experiment(rep_id), rep_flags);
    if (*run) return run_spec(load_spec(spec_path), run_flags);
    if (*plot) {
      std::cout << emit_plots(read_results_csv(plot_csv), plot_dir, fs::path(plot_csv).stem().string()).string()
                << "\n";
      return 0;
    }
    if (*cfg_cmd) {
      if (cfg_out.empty()) std::cout << config_to_text(SimConfig{});
      else save_config(SimConfig{}, cfg_out);
      return 0;
    }
    if (*topo_cmd) {
      write_topology_csv(build_grid(rows, cols, spacing), topo_out);
      return 0;
    }
    if (*pkt) {
      const SimConfig cfg = config_path.empty() ? SimConfig{} : load_config(config_path);
      const Topology topo = build_grid(rows, cols, spacing);
      fs::create_directories(out_dir);
      std::ofstream votes(fs::path(out_dir) / "votes.csv");
      votes << "node,symbol_index,buffer_index,buffer_start_s,above,retained,pulse\n";
      std::ofstream samples;
      if (dump_node) {
        samples.open(fs::path(out_dir) / ("node" + std::to_string(*dump_node) + "_samples.csv"));
        samples << "time_s,re,im\n";
      }
      EngineOptions opts;
      opts.self_muting = !no_mute;
      opts.votes = [&](const VoteRecord& v) {
        votes << v.node << "," << v.symbol_index << "," << v.buffer_index << "," << v.buffer_start_s << ","
              << v.above << "," << v.retained << "," << (v.pulse ? 1 : 0) << "\n";
      };
      if (dump_node)
        opts.samples = [&](NodeId n, std::int64_t first, std::span<const Complex> s) {
          if (n != *dump_node) return;
          char buf[96];
          for (std::size_t i = 0; i < s.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.12e,%.9e,%.9e\n",
                          static_cast<double>(first + static_cast<std::int64_t>(i)) / cfg.baseband_sample_rate_hz,
                          s[i].real(), s[i].imag());
            samples << buf;
          }
        };
      const auto trace = run_packet(topo, random_payload(payload_bits, seed), cfg, seed, opts);
      std::ofstream(fs::path(out_dir) / "trace.jsonl") << trace_to_json_line(trace) << "\n";
      const auto m = compute_metrics(trace, topo);
      std::printf("ber_avg %.6f  latency %.3f us  unsynced %zu  isa %s\n", m.ber_avg, m.latency_e2e_s * 1e6,
                  m.unsynced_nodes, simd::active_kernels().name);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
