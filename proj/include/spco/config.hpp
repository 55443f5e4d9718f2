#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spco/explorer.hpp"
#include "spco/hyperparameters.hpp"
#include "spco/synth.hpp"
#include "spco/teacher.hpp"

namespace spco {

enum class Policy { spcoae, spcoae_cost, random, travel_cost, ig_min, entropy };

Policy parse_policy(const std::string& name);
std::string policy_name(Policy p);

struct EnvConfig {
  // Either a map (P5 + metadata, annotation JSON) or a generated floor plan.
  std::string map_path, meta_path, annotation_path;
  bool synth = true;
  SynthSpec synth_spec;
  std::uint64_t synth_seed = 1;
  double spacing = 0.8;
  double clearance = 0.5;
};

struct PolicyConfig {
  Policy policy = Policy::spcoae_cost;
  bool revisit = false;
  bool stop_on_convergence = false;
  double ig_threshold = 0.01;  // nats
  int ig_patience = 3;         // consecutive steps below threshold
  IGForm ig_form = IGForm::joint;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int steps = -1;  // -1 = one step per candidate
  int threads = 1;
  AnswerMode answer_mode = AnswerMode::single_word;
  bool grow_vocabulary = false;
  int start_candidate = 0;
};

struct SuiteConfig {
  std::vector<Policy> policies;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> env_seeds;
  int workers = 1;
};

/// Everything one session needs. Parsed from an INI document with
/// [model], [env], [policy], [run] and optionally [suite] sections; a
/// `preset` key in [model] selects the base hyperparameters.
struct Config {
  Hyperparameters model;
  EnvConfig env;
  PolicyConfig policy;
  RunConfig run;
  SuiteConfig suite;

  // Relative paths in [env] resolve against base_dir.
  static Config parse(const std::string& text, const std::string& base_dir = "");
  static Config load(const std::string& path);
  std::string to_ini() const;

  // Travel-cost weight actually applied by the policy.
  double effective_eta() const { return policy.policy == Policy::spcoae_cost ? model.eta : 0.0; }
};

Hyperparameters preset_hyperparameters(const std::string& name);

}  // namespace spco
