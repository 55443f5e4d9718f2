#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spco/config.hpp"
#include "spco/metrics.hpp"
#include "spco/service.hpp"
#include "spco/session.hpp"
#include "spco/snapshot.hpp"
#include "spco/synth.hpp"

namespace fs = std::filesystem;
using namespace spco;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_run(const ExplorationSession& s, const fs::path& out) {
  fs::create_directories(out);
  write_file(out / "metrics.csv", metrics_csv(s.records()));
  write_file(out / "ig_table.csv", ig_table_csv(s.selections(), s.world().candidates));
  write_file(out / "snapshot.json", snapshot_json(s).dump(1));
  write_file(out / "observations.json", observation_log_json(s).dump(1));
  write_file(out / "overlay.json", overlay_json(s).dump(1));
}

void print_summary(const RunSummary& r) {
  std::cout << "policy=" << r.policy << " seed=" << r.seed << " steps=" << r.steps
            << " candidates=" << r.candidates << " ari_c=" << r.final_ari_c
            << " ari_i=" << r.final_ari_i << " ari_c_pad=" << r.final_ari_c_pad
            << " nms_c=" << r.nms_c << " lsr_c=" << r.lsr_c
            << " travel_per_step=" << r.travel_per_step << "\n";
}

// Reads one numeric column of a metrics CSV.
std::vector<double> csv_column(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    for (std::string cell; std::getline(h, cell, ',');) header.push_back(cell);
  }
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw FormatError("metrics CSV has no column " + name);
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (std::size_t i = 0; i <= col; ++i) std::getline(row, cell, ',');
    out.push_back(cell == "nan" ? std::nan("") : std::stod(cell));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active exploration for spatial concept learning"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", policy;
  int threads = 0;
  long long seed = -1;
  auto* run = app.add_subcommand("run", "Run one exploration session");
  run->add_option("-c,--config", config_path, "INI config")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_dir, "Output directory");
  run->add_option("--policy", policy, "Override [policy] name");
  run->add_option("--seed", seed, "Override [run] seed");
  run->add_option("--threads", threads, "Override [run] threads");

  std::string suite_config;
  std::string suite_out = "suite";
  auto* suite = app.add_subcommand("suite", "Run a (environment, policy, seed) matrix");
  suite->add_option("-c,--config", suite_config, "INI config with a [suite] section")
      ->required()
      ->check(CLI::ExistingFile);
  suite->add_option("-o,--out", suite_out, "Output directory");

  std::string snapshot_path, log_path, replay_out = "replay";
  int replay_steps = -1, replay_threads = 0;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a session from its answer log");
  replay_cmd->add_option("--snapshot", snapshot_path, "snapshot.json")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--log", log_path, "observations.json")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--steps", replay_steps, "Replay only the first N answers");
  replay_cmd->add_option("--threads", replay_threads, "Override [run] threads");
  replay_cmd->add_option("-o,--out", replay_out, "Output directory");

  std::string metrics_path;
  double threshold = 0.6;
  int candidates = 0;
  auto* eval = app.add_subcommand("eval", "Summarize a metrics.csv");
  eval->add_option("--metrics", metrics_path, "metrics.csv")->required()->check(CLI::ExistingFile);
  eval->add_option("--threshold", threshold, "ARI threshold for NMS/LSR");
  eval->add_option("--candidates", candidates, "Candidate count for travel normalization");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Serve live sessions over HTTP");
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);

  std::uint64_t synth_seed = 1;
  SynthSpec spec;
  std::string synth_out = "map";
  auto* synth = app.add_subcommand("synth", "Write a generated floor plan and its annotation");
  synth->add_option("--seed", synth_seed);
  synth->add_option("--rooms", spec.rooms);
  synth->add_option("--room-min", spec.room_min);
  synth->add_option("--room-max", spec.room_max);
  synth->add_option("-o,--out", synth_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      Config c = Config::load(config_path);
      if (!policy.empty()) c.policy.policy = parse_policy(policy);
      if (seed >= 0) c.run.seed = static_cast<std::uint64_t>(seed);
      if (threads > 0) c.run.threads = threads;
      const auto session = run_session(c);
      write_run(session, out_dir);
      print_summary(summarize(session, c.env.synth_seed));
    } else if (*suite) {
      const Config c = Config::load(suite_config);
      const auto result = run_suite(c);
      fs::create_directories(suite_out);
      write_file(fs::path(suite_out) / "suite.csv", suite_csv(result));
      const std::string summary = suite_summary_csv(result);
      write_file(fs::path(suite_out) / "summary.csv", summary);
      std::cout << summary;
    } else if (*replay_cmd) {
      const auto snapshot = nlohmann::json::parse(read_file(snapshot_path));
      const auto log = nlohmann::json::parse(read_file(log_path));
      Config c = Config::parse(snapshot.at("config").get<std::string>());
      if (replay_threads > 0) c.run.threads = replay_threads;
      const auto session = replay(c.to_ini(), log, replay_steps);
      write_run(session, replay_out);
      print_summary(summarize(session, c.env.synth_seed));
    } else if (*eval) {
      const std::string text = read_file(metrics_path);
      const auto pad_c = csv_column(text, "ari_c_pad"), pad_i = csv_column(text, "ari_i_pad");
      const auto travel = csv_column(text, "travel_cells");
      std::cout << "steps=" << pad_c.size();
      if (!pad_c.empty())
        std::cout << " final_ari_c_pad=" << pad_c.back() << " final_ari_i_pad=" << pad_i.back();
      std::cout << " nms_c=" << nms(pad_c, threshold) << " nms_i=" << nms(pad_i, threshold)
                << " lsr_c=" << lsr(pad_c, threshold) << " lsr_i=" << lsr(pad_i, threshold);
      const auto t = travel_distance(travel, candidates > 0 ? candidates : static_cast<int>(travel.size()));
      std::cout << " cum_travel=" << (t.cumulative.empty() ? 0.0 : t.cumulative.back())
                << " travel_per_step=" << t.per_step_mean << "\n";
    } else if (*serve_cmd) {
      SessionService service;
      std::cout << "listening on " << host << ":" << port << std::endl;
      serve(service, host, port);
    } else if (*synth) {
      const Environment env = synth_environment(synth_seed, spec);
      fs::create_directories(synth_out);
      write_file(fs::path(synth_out) / "map.pgm", encode_pgm(env.grid));
      write_file(fs::path(synth_out) / "map.meta", metadata_of(env.grid).format());
      write_file(fs::path(synth_out) / "annotation.json", env.annotation.to_json().dump(1));
      std::cout << "wrote " << env.grid.width() << "x" << env.grid.height() << " map with "
                << env.annotation.regions.size() << " rooms to " << synth_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
