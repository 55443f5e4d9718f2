#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spco/config.hpp"
#include "spco/explorer.hpp"
#include "spco/grid.hpp"
#include "spco/metrics.hpp"
#include "spco/teacher.hpp"

namespace spco {

/// A map with its candidate points, travel table and (optional) ground truth.
struct World {
  OccupancyGrid grid;
  std::optional<Annotation> annotation;
  CandidateSet candidates;
  TravelCosts travel;
  std::vector<int> truth_concept;  // per candidate; empty without annotation
  std::vector<int> truth_posdist;
};

World make_world(OccupancyGrid grid, std::optional<Annotation> annotation, double spacing,
                 double clearance);
World load_world(const EnvConfig& env);

/// One row of the per-step metrics log.
struct StepRecord {
  int step = 0;
  int candidate = 0;
  Vec2 position = Vec2::Zero();
  std::string answer;  // raw text as given to the learner
  std::vector<std::string> tokens;
  double ari_c_step = 0, ari_i_step = 0, ari_c_pad = 0, ari_i_pad = 0;
  double travel_cells = 0, cum_travel = 0;
  double max_ig = 0;  // largest IG over all candidates after this step's update
};

/// The scores a selection was made from.
struct SelectionLog {
  int step = 0;
  IGTable table;
  int chosen = -1;
};

enum class Phase { pending_query, learning, scoring, complete };
std::string phase_name(Phase p);

/// Algorithm-2 loop split at the observation point: a query is pending,
/// an answer is learned, the next query is scored.
class ExplorationSession {
 public:
  ExplorationSession(Config config, std::shared_ptr<const World> world);

  const Config& config() const { return config_; }
  const World& world() const { return *world_; }
  const ParticleSet& particles() const { return set_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const ExplorationState& state() const { return state_; }
  const std::vector<StepRecord>& records() const { return records_; }
  const std::vector<SelectionLog>& selections() const { return selections_; }
  double cumulative_travel() const { return cum_travel_; }
  int step() const { return static_cast<int>(records_.size()); }
  int budget() const { return budget_; }

  std::optional<int> pending() const { return pending_; }
  bool awaiting_score() const { return awaiting_score_; }
  bool complete() const { return !pending_ && !awaiting_score_; }

  // Absorbs an answer to the pending query (moves there first).
  void learn(const std::string& text);
  void learn_tokens(const std::vector<std::string>& tokens, const std::string& text);
  // Scores candidates for the next query and picks it, or finishes.
  void score();

  // Scripted answer for the pending query; requires an annotation.
  std::string scripted_answer() const;
  // learn(scripted_answer()) + score().
  void auto_step();

 private:
  void select();
  void fill_metrics(StepRecord& rec) const;

  Config config_;
  std::shared_ptr<const World> world_;
  ParticleSet set_;
  Vocabulary vocab_;
  ExplorationState state_;
  std::vector<StepRecord> records_;
  std::vector<SelectionLog> selections_;
  std::vector<int> observed_candidates_;
  IGTable table_;
  std::optional<int> pending_;
  double cum_travel_ = 0.0;
  int budget_ = 0;
  int below_threshold_ = 0;
  bool stopped_ = false;
  bool awaiting_score_ = false;
};

// Runs a scripted session to completion.
ExplorationSession run_session(const Config& config, std::shared_ptr<const World> world);
ExplorationSession run_session(const Config& config);

std::string metrics_csv(const std::vector<StepRecord>& records);
std::string ig_table_csv(const std::vector<SelectionLog>& selections, const CandidateSet& candidates);

/// Per-run summary used by suite aggregation.
struct RunSummary {
  std::uint64_t env_seed = 0;
  std::string policy;
  std::uint64_t seed = 0;
  int steps = 0;
  double final_ari_c = 0, final_ari_i = 0, final_ari_c_pad = 0, final_ari_i_pad = 0;
  double nms_c = 0, nms_i = 0, lsr_c = 0, lsr_i = 0;
  double travel_per_step = 0;  // normalized by candidate count
  int candidates = 0;
};

RunSummary summarize(const ExplorationSession& session, std::uint64_t env_seed);

struct SuiteResult {
  std::vector<RunSummary> runs;
};

// Every (environment seed, policy, seed) cell of the matrix; output order is
// fixed by the matrix, not by completion order.
SuiteResult run_suite(const Config& base);
std::string suite_csv(const SuiteResult& result);
// Mean and standard deviation per policy.
std::string suite_summary_csv(const SuiteResult& result);

}  // namespace spco
