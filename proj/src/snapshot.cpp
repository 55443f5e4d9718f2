#include "spco/snapshot.hpp"

#include <unordered_map>

namespace spco {

namespace {

using nlohmann::json;

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

json mat(const Mat2& m) {
  return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

template <typename Derived>
json table(const Eigen::MatrixBase<Derived>& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

template <typename Derived>
json list(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json stats_json(const SufficientStats& s) {
  json j;
  j["total"] = s.total;
  j["n_concept"] = list(s.n_concept);
  j["n_concept_posdist"] = table(s.n_concept_posdist);
  j["n_word"] = table(s.n_word);
  j["n_posdist"] = list(s.n_posdist);
  j["sum_x"] = json::array();
  j["sum_xxT"] = json::array();
  for (int k = 0; k < s.num_posdists(); ++k) {
    j["sum_x"].push_back(vec(s.sum_x.col(k)));
    j["sum_xxT"].push_back(mat(s.sum_xxT[k]));
  }
  return j;
}

json params_json(const ModelParams& p) {
  json j;
  j["pi"] = list(p.pi);
  j["phi"] = table(p.phi);
  j["W"] = table(p.W);
  j["mu"] = json::array();
  j["Sigma"] = json::array();
  for (std::size_t k = 0; k < p.mu.size(); ++k) {
    j["mu"].push_back(vec(p.mu[k]));
    j["Sigma"].push_back(mat(p.Sigma[k]));
  }
  return j;
}

}  // namespace

int modal_particle(const ParticleSet& set) {
  const auto rep = set.representative_index();
  std::unordered_map<int, int> count;
  for (int r : rep) ++count[r];
  int best = 0, best_n = -1;
  for (int r = 0; r < set.size(); ++r)
    if (rep[r] == r && count[r] > best_n) {
      best = r;
      best_n = count[r];
    }
  return best;
}

json snapshot_json(const ExplorationSession& session) {
  const auto& set = session.particles();
  const auto& state = session.state();
  json j;
  j["config"] = session.config().to_ini();
  j["step"] = session.step();
  j["pose"] = {{"candidate", state.pose_candidate}, {"position", vec(state.current_pose)}};
  j["visit_counts"] = state.visit_count;
  j["cum_travel"] = session.cumulative_travel();
  j["vocabulary"] = session.vocabulary().words();
  j["observations"] = json::array();
  const auto& recs = session.records();
  for (std::size_t n = 0; n < set.observations.size(); ++n) {
    const auto& obs = set.observations[n];
    json words = json::array();
    for (const auto& e : obs.words.entries()) words.push_back({e.word, e.count});
    j["observations"].push_back({{"candidate", n < recs.size() ? recs[n].candidate : -1},
                                 {"position", vec(obs.position)},
                                 {"words", words}});
  }
  const auto rep = set.representative_index();
  std::unordered_map<int, int> class_of;
  j["histories"] = json::array();
  j["particles"] = json::array();
  for (int r = 0; r < set.size(); ++r) {
    if (rep[r] == r) {
      class_of[r] = static_cast<int>(j["histories"].size());
      const auto& p = set.particles[r];
      json assignments = json::array();
      for (const auto& a : p.history.to_vector())
        assignments.push_back({a.concept_index, a.posdist});
      j["histories"].push_back({{"assignments", assignments},
                                {"counts", stats_json(p.stats)},
                                {"params", params_json(p.params)}});
    }
    j["particles"].push_back({{"weight", set.particles[r].weight}, {"history", class_of[rep[r]]}});
  }
  return j;
}

json observation_log_json(const ExplorationSession& session) {
  json j;
  j["config"] = session.config().to_ini();
  j["entries"] = json::array();
  for (const auto& r : session.records())
    j["entries"].push_back({{"step", r.step},
                            {"candidate", r.candidate},
                            {"position", vec(r.position)},
                            {"answer", r.answer},
                            {"tokens", r.tokens}});
  return j;
}

json overlay_json(const ExplorationSession& session, int top_words) {
  const auto& set = session.particles();
  const auto& world = session.world();
  const Particle& p = set.particles[modal_particle(set)];
  const auto history = p.history.to_vector();

  json j;
  j["step"] = session.step();
  j["grid"] = {{"width", world.grid.width()},
               {"height", world.grid.height()},
               {"resolution", world.grid.resolution()},
               {"origin", vec(world.grid.origin())}};
  // Latest assignment per visited candidate.
  std::vector<std::optional<Assignment>> seen(world.candidates.size());
  for (std::size_t n = 0; n < history.size() && n < session.records().size(); ++n)
    seen[session.records()[n].candidate] = history[n];
  j["candidates"] = json::array();
  for (int a = 0; a < world.candidates.size(); ++a) {
    const Vec2& x = world.candidates.points[a];
    const Assignment label = seen[a] ? *seen[a] : padded_assignment(p.params, x);
    j["candidates"].push_back({{"id", a},
                               {"position", vec(x)},
                               {"visits", session.state().visit_count[a]},
                               {"concept", label.concept_index},
                               {"posdist", label.posdist},
                               {"observed", seen[a].has_value()}});
  }
  j["ellipses"] = json::array();
  j["words"] = json::object();
  const auto& vocab = session.vocabulary();
  for (int k = 0; k < p.stats.num_posdists(); ++k) {
    if (p.stats.n_posdist(k) == 0) continue;
    j["ellipses"].push_back({{"posdist", k},
                             {"count", p.stats.n_posdist(k)},
                             {"mu", vec(p.params.mu[k])},
                             {"sigma", mat(p.params.Sigma[k])}});
    json ranked = json::array();
    if (p.params.W.cols() > 0)
      for (const auto& w : pmi_top_words(p.params, k, top_words))
        ranked.push_back({{"word", w.word < vocab.size() ? vocab.word(w.word) : std::to_string(w.word)},
                          {"pmi", w.pmi}});
    j["words"][std::to_string(k)] = ranked;
  }
  return j;
}

ExplorationSession replay(const std::string& config_ini, const json& log, int limit) {
  const Config config = Config::parse(config_ini);
  ExplorationSession s(config, std::make_shared<const World>(load_world(config.env)));
  int done = 0;
  for (const auto& e : log.at("entries")) {
    if (limit >= 0 && done >= limit) break;
    const int candidate = e.at("candidate").get<int>();
    if (!s.pending() || *s.pending() != candidate)
      throw Error("replay diverged at step " + std::to_string(done + 1));
    s.learn_tokens(e.at("tokens").get<std::vector<std::string>>(), e.at("answer").get<std::string>());
    s.score();
    ++done;
  }
  return s;
}

ExplorationSession replay(const json& snapshot, const json& log, int limit) {
  return replay(snapshot.at("config").get<std::string>(), log, limit);
}

}  // namespace spco
