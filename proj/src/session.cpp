#include "spco/session.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "spco/entropy.hpp"
#include "spco/parallel.hpp"
#include "spco/synth.hpp"

namespace spco {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::pending_query: return "pending_query";
    case Phase::learning: return "learning";
    case Phase::scoring: return "scoring";
    case Phase::complete: return "complete";
  }
  return "unknown";
}

World make_world(OccupancyGrid grid, std::optional<Annotation> annotation, double spacing,
                 double clearance) {
  World w;
  w.grid = std::move(grid);
  w.annotation = std::move(annotation);
  w.candidates = generate_candidates(w.grid, spacing, clearance);
  w.travel = TravelCosts(w.grid, w.candidates);
  if (w.annotation) {
    std::map<std::string, int> concept_of_label;
    for (const auto& p : w.candidates.points) {
      const int region = w.annotation->region_of(p);
      const auto& label = w.annotation->regions[region].label;
      const int c = concept_of_label.emplace(label, static_cast<int>(concept_of_label.size()))
                        .first->second;
      w.truth_posdist.push_back(region);
      w.truth_concept.push_back(c);
    }
  }
  return w;
}

World load_world(const EnvConfig& env) {
  if (env.synth) {
    Environment e = synth_environment(env.synth_seed, env.synth_spec);
    return make_world(std::move(e.grid), std::move(e.annotation), env.spacing, env.clearance);
  }
  OccupancyGrid grid = load_map_files(env.map_path, env.meta_path);
  std::optional<Annotation> annotation;
  if (!env.annotation_path.empty()) {
    try {
      annotation = Annotation::from_json(nlohmann::json::parse(read_file(env.annotation_path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string("annotation: ") + e.what());
    }
  }
  return make_world(std::move(grid), std::move(annotation), env.spacing, env.clearance);
}

ExplorationSession::ExplorationSession(Config config, std::shared_ptr<const World> world)
    : config_(std::move(config)), world_(std::move(world)) {
  const int n = world_->candidates.size();
  const auto& run = config_.run;
  if (n > 0 && run.start_candidate >= n)
    throw ConfigError("start_candidate is out of range for " + std::to_string(n) + " candidates");
  if (world_->annotation && !run.grow_vocabulary)
    vocab_ = annotation_vocabulary(*world_->annotation, run.answer_mode);
  set_ = ParticleSet(config_.model, vocab_.size(), run.seed);
  budget_ = run.steps < 0 ? n : run.steps;
  const Vec2 start = n > 0 ? world_->candidates.points[run.start_candidate] : Vec2::Zero();
  state_ = ExplorationState(n, run.start_candidate, start, config_.policy.revisit, budget_);
  if (n > 0 && budget_ > 0) {
    awaiting_score_ = true;
    score();
  }
}

void ExplorationSession::learn(const std::string& text) {
  learn_tokens(tokenize(text, config_.run.answer_mode), text);
}

void ExplorationSession::learn_tokens(const std::vector<std::string>& tokens,
                                      const std::string& text) {
  if (!pending_) throw Error("no query is pending");
  const int a = *pending_;
  const Vec2 pos = world_->candidates.points[a];
  const double cost = world_->travel.at(state_.pose_candidate, a);
  state_.visit(a, pos);
  cum_travel_ += cost;

  BagOfWords bag;
  if (config_.run.grow_vocabulary) {
    bag = extend_vocabulary(vocab_, tokens);
    if (vocab_.size() > set_.vocab_size()) spco::extend_vocabulary(set_, vocab_.size(), config_.model);
  } else {
    bag = to_bag(vocab_, tokens);
  }
  set_ = online_update(std::move(set_), Observation{pos, bag}, config_.model, config_.run.threads);
  observed_candidates_.push_back(a);

  StepRecord rec;
  rec.step = step() + 1;
  rec.candidate = a;
  rec.position = pos;
  rec.answer = text;
  rec.tokens = tokens;
  rec.travel_cells = cost;
  rec.cum_travel = cum_travel_;
  rec.max_ig = kNaN;
  fill_metrics(rec);
  records_.push_back(std::move(rec));
  pending_.reset();
  awaiting_score_ = true;
}

void ExplorationSession::fill_metrics(StepRecord& rec) const {
  if (!world_->annotation) {
    rec.ari_c_step = rec.ari_i_step = rec.ari_c_pad = rec.ari_i_pad = kNaN;
    return;
  }
  std::vector<int> obs_c, obs_i;
  for (int a : observed_candidates_) {
    obs_c.push_back(world_->truth_concept[a]);
    obs_i.push_back(world_->truth_posdist[a]);
  }
  if (obs_c.size() < 2) {
    rec.ari_c_step = rec.ari_i_step = 1.0;
  } else {
    rec.ari_c_step = weighted_ari(set_, obs_c, LabelKind::concept_label);
    rec.ari_i_step = weighted_ari(set_, obs_i, LabelKind::posdist_label);
  }
  std::vector<Vec2> unvisited;
  std::vector<int> un_c, un_i;
  for (int a = 0; a < world_->candidates.size(); ++a)
    if (!state_.visited(a)) {
      unvisited.push_back(world_->candidates.points[a]);
      un_c.push_back(world_->truth_concept[a]);
      un_i.push_back(world_->truth_posdist[a]);
    }
  if (obs_c.size() + unvisited.size() < 2) {
    rec.ari_c_pad = rec.ari_i_pad = 1.0;
  } else {
    rec.ari_c_pad = padded_weighted_ari(set_, obs_c, unvisited, un_c, LabelKind::concept_label);
    rec.ari_i_pad = padded_weighted_ari(set_, obs_i, unvisited, un_i, LabelKind::posdist_label);
  }
}

void ExplorationSession::score() {
  if (!awaiting_score_) throw Error("nothing to score");
  const int next = step() + 1;
  const auto& h = config_.model;
  const auto& points = world_->candidates.points;
  const auto ig = score_information_gain(set_, points, h, config_.run.seed, next,
                                         config_.run.threads, config_.policy.ig_form);
  const auto travel = world_->travel.row(state_.pose_candidate);
  const double eta = config_.effective_eta();
  table_ = make_ig_table(ig, travel, eta);
  if (config_.policy.policy == Policy::entropy) {
    const auto H = score_entropy(set_, points, h, config_.run.seed, next, config_.run.threads);
    for (auto& row : table_.rows)
      if (std::isfinite(row.travel_cost)) row.utility = -H[row.candidate] - eta * row.travel_cost;
  }
  if (!records_.empty()) {
    const double top = ig.empty() ? 0.0 : *std::max_element(ig.begin(), ig.end());
    records_.back().max_ig = top;
    if (config_.policy.stop_on_convergence) {
      below_threshold_ = top < config_.policy.ig_threshold ? below_threshold_ + 1 : 0;
      if (below_threshold_ >= config_.policy.ig_patience) stopped_ = true;
    }
  }
  awaiting_score_ = false;
  select();
}

void ExplorationSession::select() {
  pending_.reset();
  if (stopped_ || step() >= budget_) return;
  const int next = step() + 1;
  const auto eligible = state_.eligible(world_->travel.row(state_.pose_candidate));
  std::optional<int> choice;
  switch (config_.policy.policy) {
    case Policy::spcoae:
    case Policy::spcoae_cost:
    case Policy::entropy:
      choice = select_destination(table_, eligible);
      break;
    case Policy::random: {
      Rng rng(stream_seed(config_.run.seed, Stream::policy, static_cast<std::uint64_t>(next)));
      choice = baseline_policy(Baseline::random, table_, eligible, rng);
      break;
    }
    case Policy::travel_cost:
    case Policy::ig_min: {
      Rng unused(0);
      choice = baseline_policy(config_.policy.policy == Policy::ig_min ? Baseline::min_ig
                                                                         : Baseline::min_travel_cost,
                               table_, eligible, unused);
      break;
    }
  }
  pending_ = choice;
  if (choice) selections_.push_back({next, table_, *choice});
}

std::string ExplorationSession::scripted_answer() const {
  if (!world_->annotation) throw Error("scripted answers need an annotation");
  if (!pending_) throw Error("no query is pending");
  const int a = *pending_;
  return ScriptedTeacher(*world_->annotation, config_.run.answer_mode, config_.run.seed)
      .answer_text(a, world_->candidates.points[a], state_.visit_count[a]);
}

void ExplorationSession::auto_step() {
  learn(scripted_answer());
  score();
}

ExplorationSession run_session(const Config& config, std::shared_ptr<const World> world) {
  ExplorationSession s(config, std::move(world));
  while (!s.complete()) s.auto_step();
  return s;
}

ExplorationSession run_session(const Config& config) {
  return run_session(config, std::make_shared<const World>(load_world(config.env)));
}

std::string metrics_csv(const std::vector<StepRecord>& records) {
  std::string out = "step,ari_c_step,ari_i_step,ari_c_pad,ari_i_pad,travel_cells,cum_travel,max_ig\n";
  for (const auto& r : records)
    out += std::to_string(r.step) + "," + fmt(r.ari_c_step) + "," + fmt(r.ari_i_step) + "," +
           fmt(r.ari_c_pad) + "," + fmt(r.ari_i_pad) + "," + fmt(r.travel_cells) + "," +
           fmt(r.cum_travel) + "," + fmt(r.max_ig) + "\n";
  return out;
}

std::string ig_table_csv(const std::vector<SelectionLog>& selections,
                         const CandidateSet& candidates) {
  std::string out = "step,candidate_id,x,y,ig,travel_cost,utility,chosen\n";
  for (const auto& s : selections)
    for (const auto& row : s.table.rows) {
      const Vec2& p = candidates.points[row.candidate];
      out += std::to_string(s.step) + "," + std::to_string(row.candidate) + "," + fmt(p.x()) +
             "," + fmt(p.y()) + "," + fmt(row.ig) + "," + fmt(row.travel_cost) + "," +
             fmt(row.utility) + "," + (row.candidate == s.chosen ? "1" : "0") + "\n";
    }
  return out;
}

RunSummary summarize(const ExplorationSession& session, std::uint64_t env_seed) {
  RunSummary s;
  s.env_seed = env_seed;
  s.policy = policy_name(session.config().policy.policy);
  s.seed = session.config().run.seed;
  s.steps = session.step();
  s.candidates = session.world().candidates.size();
  const auto& recs = session.records();
  if (!recs.empty()) {
    s.final_ari_c = recs.back().ari_c_step;
    s.final_ari_i = recs.back().ari_i_step;
    s.final_ari_c_pad = recs.back().ari_c_pad;
    s.final_ari_i_pad = recs.back().ari_i_pad;
  }
  std::vector<double> pad_c, pad_i, travel;
  for (const auto& r : recs) {
    pad_c.push_back(r.ari_c_pad);
    pad_i.push_back(r.ari_i_pad);
    travel.push_back(r.travel_cells);
  }
  s.nms_c = nms(pad_c);
  s.nms_i = nms(pad_i);
  s.lsr_c = lsr(pad_c);
  s.lsr_i = lsr(pad_i);
  s.travel_per_step = travel_distance(travel, s.candidates).per_step_mean;
  return s;
}

SuiteResult run_suite(const Config& base) {
  const auto policies =
      base.suite.policies.empty() ? std::vector<Policy>{base.policy.policy} : base.suite.policies;
  const auto seeds =
      base.suite.seeds.empty() ? std::vector<std::uint64_t>{base.run.seed} : base.suite.seeds;
  auto env_seeds = base.suite.env_seeds;
  if (env_seeds.empty() || !base.env.synth) env_seeds = {base.env.synth_seed};

  struct Cell {
    std::size_t env;
    Policy policy;
    std::uint64_t seed;
  };
  std::vector<std::shared_ptr<const World>> worlds;
  std::vector<Cell> cells;
  for (std::size_t e = 0; e < env_seeds.size(); ++e) {
    EnvConfig env = base.env;
    env.synth_seed = env_seeds[e];
    worlds.push_back(std::make_shared<const World>(load_world(env)));
    for (Policy p : policies)
      for (auto seed : seeds) cells.push_back({e, p, seed});
  }
  SuiteResult result;
  result.runs.resize(cells.size());
  parallel_for(static_cast<int>(cells.size()), base.suite.workers, [&](int i) {
    Config c = base;
    c.env.synth_seed = env_seeds[cells[i].env];
    c.policy.policy = cells[i].policy;
    c.run.seed = cells[i].seed;
    result.runs[i] = summarize(run_session(c, worlds[cells[i].env]), env_seeds[cells[i].env]);
  });
  return result;
}

std::string suite_csv(const SuiteResult& result) {
  std::string out =
      "env_seed,policy,seed,steps,candidates,final_ari_c,final_ari_i,final_ari_c_pad,"
      "final_ari_i_pad,nms_c,nms_i,lsr_c,lsr_i,travel_per_step\n";
  for (const auto& r : result.runs)
    out += std::to_string(r.env_seed) + "," + r.policy + "," + std::to_string(r.seed) + "," +
           std::to_string(r.steps) + "," + std::to_string(r.candidates) + "," +
           fmt(r.final_ari_c) + "," + fmt(r.final_ari_i) + "," + fmt(r.final_ari_c_pad) + "," +
           fmt(r.final_ari_i_pad) + "," + fmt(r.nms_c) + "," + fmt(r.nms_i) + "," +
           fmt(r.lsr_c) + "," + fmt(r.lsr_i) + "," + fmt(r.travel_per_step) + "\n";
  return out;
}

std::string suite_summary_csv(const SuiteResult& result) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunSummary*>> by_policy;
  for (const auto& r : result.runs) {
    if (!by_policy.count(r.policy)) order.push_back(r.policy);
    by_policy[r.policy].push_back(&r);
  }
  using Field = double RunSummary::*;
  const std::vector<std::pair<const char*, Field>> fields = {
      {"ari_c", &RunSummary::final_ari_c},         {"ari_i", &RunSummary::final_ari_i},
      {"ari_c_pad", &RunSummary::final_ari_c_pad}, {"ari_i_pad", &RunSummary::final_ari_i_pad},
      {"nms_c", &RunSummary::nms_c},               {"nms_i", &RunSummary::nms_i},
      {"lsr_c", &RunSummary::lsr_c},               {"lsr_i", &RunSummary::lsr_i},
      {"travel_per_step", &RunSummary::travel_per_step}};
  std::string out = "policy,runs";
  for (const auto& [name, f] : fields) out += std::string(",mean_") + name + ",std_" + name;
  out += "\n";
  for (const auto& policy : order) {
    const auto& runs = by_policy[policy];
    out += policy + "," + std::to_string(runs.size());
    for (const auto& [name, f] : fields) {
      double mean = 0.0, var = 0.0;
      for (const auto* r : runs) mean += r->*f;
      mean /= runs.size();
      for (const auto* r : runs) var += (r->*f - mean) * (r->*f - mean);
      const double sd = runs.size() > 1 ? std::sqrt(var / (runs.size() - 1)) : 0.0;
      out += "," + fmt(mean) + "," + fmt(sd);
    }
    out += "\n";
  }
  return out;
}

}  // namespace spco
