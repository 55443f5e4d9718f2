#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "spco/entropy.hpp"
#include "spco/snapshot.hpp"

using namespace spco;

namespace {

// 4 m x 2 m open floor split into two labeled halves.
std::shared_ptr<const World> small_world() {
  OccupancyGrid g(42, 22, 0.1, Vec2::Zero(), Cell::occupied);
  for (int r = 1; r <= 20; ++r)
    for (int c = 1; c <= 40; ++c) g.set({c, r}, Cell::free);
  Annotation a;
  a.regions.push_back({"kitchen", {{0, 0, 2.1, 2.2}}, {}, {"Cook in the kitchen.", "The fridge is here."}});
  a.regions.push_back({"bedroom", {{2.1, 0, 4.2, 2.2}}, {}, {"Sleep in the bedroom.", "The bed is here."}});
  return std::make_shared<const World>(make_world(std::move(g), std::move(a), 0.5, 0.3));
}

Config small_config(Policy policy = Policy::spcoae_cost) {
  Config c;
  c.model.R = 20;
  c.model.J = 5;
  c.policy.policy = policy;
  c.run.seed = 3;
  return c;
}

std::string dump(const ExplorationSession& s) {
  return metrics_csv(s.records()) + ig_table_csv(s.selections(), s.world().candidates);
}

}  // namespace

TEST_SUITE("session") {

TEST_CASE("world setup") {
  const auto w = small_world();
  CHECK(w->candidates.size() == 21);
  CHECK(w->truth_concept.size() == 21);
  std::set<int> concepts(w->truth_concept.begin(), w->truth_concept.end());
  CHECK(concepts.size() == 2);
}

TEST_CASE("zero budget records nothing") {
  auto c = small_config();
  c.run.steps = 0;
  const auto s = run_session(c, small_world());
  CHECK(s.complete());
  CHECK(s.records().empty());
  CHECK(s.selections().empty());
  CHECK(metrics_csv(s.records()).find('\n') == metrics_csv(s.records()).size() - 1);
}

TEST_CASE("single-visit mode covers every candidate once") {
  for (Policy p : {Policy::spcoae, Policy::spcoae_cost, Policy::random, Policy::travel_cost,
                   Policy::ig_min}) {
    const auto s = run_session(small_config(p), small_world());
    std::set<int> seen;
    for (const auto& r : s.records()) CHECK(seen.insert(r.candidate).second);
    CHECK(s.step() == s.world().candidates.size());
    CHECK(s.records().back().cum_travel ==
          doctest::Approx(s.cumulative_travel()));
  }
}

TEST_CASE("revisit mode may return to a visited candidate") {
  auto c = small_config(Policy::spcoae);
  c.policy.revisit = true;
  c.run.steps = 30;
  const auto s = run_session(c, small_world());
  CHECK(s.step() == 30);
  std::set<int> seen;
  for (const auto& r : s.records()) seen.insert(r.candidate);
  CHECK(seen.size() < 30);
}

TEST_CASE("chosen candidate maximizes utility among eligible ones") {
  auto c = small_config(Policy::spcoae_cost);
  c.run.steps = 8;
  const auto s = run_session(c, small_world());
  std::set<int> visited;
  for (const auto& sel : s.selections()) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& row : sel.table.rows)
      if (!visited.count(row.candidate) && std::isfinite(row.travel_cost))
        best = std::max(best, row.utility);
    const auto& chosen = sel.table.rows[sel.chosen];
    CHECK(chosen.candidate == sel.chosen);
    CHECK(chosen.utility == best);
    CHECK(chosen.utility == doctest::Approx(chosen.ig - c.model.eta * chosen.travel_cost));
    visited.insert(sel.chosen);
  }
}

TEST_CASE("travel-cost baseline moves to the nearest unvisited candidate") {
  auto c = small_config(Policy::travel_cost);
  c.run.steps = 5;
  const auto s = run_session(c, small_world());
  std::set<int> visited;
  int pose = c.run.start_candidate;
  for (const auto& sel : s.selections()) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int a = 0; a < s.world().candidates.size(); ++a)
      if (!visited.count(a)) nearest = std::min(nearest, s.world().travel.at(pose, a));
    CHECK(s.world().travel.at(pose, sel.chosen) == nearest);
    visited.insert(sel.chosen);
    pose = sel.chosen;
  }
  // The first move from candidate 0 is the start itself, then a lattice neighbour.
  CHECK(s.records()[0].travel_cells == 0);
  CHECK(s.records()[1].travel_cells == 5);
}

TEST_CASE("results do not depend on thread count") {
  auto c = small_config();
  c.run.steps = 6;
  const auto one = run_session(c, small_world());
  c.run.threads = 3;
  const auto three = run_session(c, small_world());
  CHECK(dump(one) == dump(three));
  CHECK(snapshot_json(one)["vocabulary"] == snapshot_json(three)["vocabulary"]);
}

TEST_CASE("replay reproduces a session") {
  auto c = small_config(Policy::spcoae);
  c.run.steps = 6;
  c.run.answer_mode = AnswerMode::sentence;
  c.run.grow_vocabulary = true;
  // Replay rebuilds the world from the config, so use a generated one.
  c.env.synth_spec.rooms = 2;
  c.env.spacing = 1.0;
  const auto world = std::make_shared<const World>(load_world(c.env));
  const auto s = run_session(c, world);
  const auto log = observation_log_json(s);
  CHECK(log["entries"].size() == 6);

  const auto again = replay(snapshot_json(s), log);
  CHECK(snapshot_json(again).dump() == snapshot_json(s).dump());
  CHECK(dump(again) == dump(s));

  // A prefix replays to the state the session had after that many steps.
  auto short_config = c;
  short_config.run.steps = 6;
  ExplorationSession stepped(short_config, world);
  for (int i = 0; i < 3; ++i) stepped.auto_step();
  const auto prefix = replay(c.to_ini(), log, 3);
  CHECK(prefix.step() == 3);
  CHECK(metrics_csv(prefix.records()) == metrics_csv(stepped.records()));
  CHECK(snapshot_json(prefix)["particles"] == snapshot_json(stepped)["particles"]);

  auto threaded = c;
  threaded.run.threads = 2;
  CHECK(dump(replay(threaded.to_ini(), log)) == dump(s));
}

TEST_CASE("convergence stop rule") {
  auto c = small_config(Policy::spcoae);
  c.policy.stop_on_convergence = true;
  c.policy.ig_threshold = 1e9;
  c.policy.ig_patience = 2;
  const auto s = run_session(c, small_world());
  CHECK(s.step() == 2);
  CHECK(s.complete());

  c.policy.ig_threshold = -1;
  CHECK(run_session(c, small_world()).step() == s.world().candidates.size());
}

TEST_CASE("entropy policy ranks by negative expected entropy") {
  auto c = small_config(Policy::entropy);
  c.run.steps = 3;
  const auto s = run_session(c, small_world());
  CHECK(s.step() == 3);
  // The first query is scored against the prior filter.
  const ParticleSet prior(c.model, s.vocabulary().size(), c.run.seed);
  const auto H = score_entropy(prior, s.world().candidates.points, c.model, c.run.seed, 1);
  const auto& first = s.selections().front();
  for (const auto& row : first.table.rows) CHECK(row.utility == -H[row.candidate]);
  CHECK(first.chosen == std::min_element(H.begin(), H.end()) - H.begin());
}

TEST_CASE("learning outside the script") {
  auto c = small_config();
  c.run.steps = 2;
  ExplorationSession s(c, small_world());
  REQUIRE(s.pending());
  CHECK_THROWS_AS(s.score(), Error);
  s.learn("kitchen");
  CHECK_THROWS_AS(s.learn("kitchen"), Error);
  CHECK(s.awaiting_score());
  s.score();
  s.learn("no such word");
  s.score();
  CHECK(s.complete());
  CHECK(s.particles().observations.back().words.empty());
}

TEST_CASE("config round-trip and validation") {
  auto c = small_config(Policy::ig_min);
  c.policy.ig_form = IGForm::word_given_position;
  c.policy.revisit = true;
  c.run.answer_mode = AnswerMode::sentence;
  c.suite.policies = {Policy::random, Policy::spcoae};
  c.suite.seeds = {1, 2, 3};
  const auto ini = c.to_ini();
  const auto back = Config::parse(ini);
  CHECK(back.to_ini() == ini);
  CHECK(back.policy.ig_form == IGForm::word_given_position);
  CHECK(back.model.R == 20);

  CHECK(Config::parse("[suite]\nseeds = 1-3, 7\n").suite.seeds == std::vector<std::uint64_t>{1, 2, 3, 7});
  CHECK(Config::parse("[model]\npreset = exp2\n").model.eta == Hyperparameters::experiment2().eta);
  CHECK(Config::parse("[model]\npreset = H\n").model.R == 1);
  CHECK(Config::parse("[policy]\nig_form = joint\n").policy.ig_form == IGForm::joint);
  CHECK_THROWS_AS(Config::parse("[policy]\nig_form = other\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[policy]\nname = greedy\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[model]\nfoo = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[nope]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[run]\nsteps = -2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[model]\nR = ten\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[env]\nsynth = false\n"), ConfigError);
}

TEST_CASE("shipped presets parse and run") {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SPCO_SOURCE_DIR "/presets")) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    auto c = Config::load(entry.path().string());
    c.model.R = 5;
    c.model.J = 2;
    c.run.steps = 2;
    const auto s = run_session(c);
    CHECK(s.step() == 2);
    ++n;
  }
  CHECK(n >= 2);
}

}  // TEST_SUITE
