#include "spco/service.hpp"

#include <chrono>

#include <httplib.h>

#include "spco/snapshot.hpp"

namespace spco {

namespace {

using nlohmann::json;

json metric_rows(const ExplorationSession& s) {
  json rows = json::array();
  for (const auto& r : s.records())
    rows.push_back({{"step", r.step},
                    {"candidate", r.candidate},
                    {"answer", r.answer},
                    {"ari_c_step", r.ari_c_step},
                    {"ari_i_step", r.ari_i_step},
                    {"ari_c_pad", r.ari_c_pad},
                    {"ari_i_pad", r.ari_i_pad},
                    {"travel_cells", r.travel_cells},
                    {"cum_travel", r.cum_travel},
                    {"max_ig", r.max_ig}});
  return rows;
}

json state_json(const std::string& id, const ExplorationSession& s, Phase phase,
                const json& overlay) {
  const auto& st = s.state();
  json j;
  j["id"] = id;
  j["phase"] = phase_name(phase);
  j["step"] = s.step();
  j["budget"] = s.budget();
  j["pose"] = {{"candidate", st.pose_candidate},
               {"position", {st.current_pose.x(), st.current_pose.y()}}};
  j["visit_counts"] = st.visit_count;
  j["cum_travel"] = s.cumulative_travel();
  j["has_annotation"] = s.world().annotation.has_value();
  if (phase == Phase::pending_query && s.pending()) {
    const Vec2& p = s.world().candidates.points[*s.pending()];
    j["pending"] = {{"candidate", *s.pending()}, {"position", {p.x(), p.y()}}};
  } else {
    j["pending"] = nullptr;
  }
  j["vocabulary"] = s.vocabulary().words();
  j["metrics"] = metric_rows(s);
  j["overlay"] = overlay;
  return j;
}

json error(const std::string& message) { return {{"error", message}}; }

}  // namespace

SessionService::~SessionService() {
  std::lock_guard lock(mutex_);
  for (auto& [id, e] : sessions_)
    if (e->worker.joinable()) e->worker.join();
}

void SessionService::publish(Entry& e, Phase phase) {
  auto overlay = std::make_shared<const json>(overlay_json(*e.session));
  auto doc = std::make_shared<const json>(state_json(e.id, *e.session, phase, *overlay));
  auto csv = std::make_shared<const std::string>(spco::metrics_csv(e.session->records()));
  std::lock_guard lock(e.mutex);
  e.phase = phase;
  e.published = std::move(doc);
  e.overlay = std::move(overlay);
  e.metrics = std::move(csv);
}

SessionService::Reply SessionService::create(const std::string& config_ini) {
  std::unique_ptr<ExplorationSession> session;
  try {
    const Config config = Config::parse(config_ini);
    session = std::make_unique<ExplorationSession>(
        config, std::make_shared<const World>(load_world(config.env)));
  } catch (const Error& ex) {
    return {400, error(ex.what())};
  }
  auto e = std::make_shared<Entry>();
  {
    std::lock_guard lock(mutex_);
    e->id = "s" + std::to_string(next_id_++);
    sessions_[e->id] = e;
  }
  e->session = std::move(session);
  publish(*e, e->session->complete() ? Phase::complete : Phase::pending_query);
  return {201, {{"id", e->id}}};
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

SessionService::Reply SessionService::state(const std::string& id) const {
  const auto e = find(id);
  if (!e) return {404, error("unknown session " + id)};
  std::lock_guard lock(e->mutex);
  if (!e->published) return {503, error("session is starting")};
  return {200, *e->published};
}

SessionService::Reply SessionService::answer(const std::string& id, const std::string& text) {
  const auto e = find(id);
  if (!e) return {404, error("unknown session " + id)};
  return submit(e, text);
}

SessionService::Reply SessionService::auto_step(const std::string& id) {
  const auto e = find(id);
  if (!e) return {404, error("unknown session " + id)};
  return submit(e, std::nullopt);
}

SessionService::Reply SessionService::submit(const std::shared_ptr<Entry>& e,
                                             std::optional<std::string> text) {
  {
    std::lock_guard lock(e->mutex);
    if (e->phase != Phase::pending_query)
      return {409, {{"error", "no query is pending"}, {"phase", phase_name(e->phase)}}};
    if (!text && !e->session->world().annotation)
      return {400, error("this session has no annotation to answer from")};
    e->phase = Phase::learning;
    json doc = *e->published;
    doc["phase"] = phase_name(Phase::learning);
    doc["pending"] = nullptr;
    e->published = std::make_shared<const json>(std::move(doc));
  }
  // This thread is now the only writer.
  if (e->worker.joinable()) e->worker.join();
  auto& s = *e->session;
  std::string answer;
  try {
    answer = text ? *text : s.scripted_answer();
    s.learn(answer);
  } catch (const Error& ex) {
    publish(*e, s.pending() ? Phase::pending_query : Phase::complete);
    return {500, error(ex.what())};
  }
  publish(*e, Phase::scoring);
  const int step = s.step();
  std::lock_guard lock(e->mutex);
  e->worker = std::thread([e] {
    try {
      e->session->score();
    } catch (const std::exception&) {
    }
    publish(*e, e->session->complete() ? Phase::complete : Phase::pending_query);
  });
  return {202, {{"step", step}, {"phase", phase_name(Phase::scoring)}, {"answer", answer}}};
}

std::optional<std::string> SessionService::metrics_csv(const std::string& id) const {
  const auto e = find(id);
  if (!e) return std::nullopt;
  std::lock_guard lock(e->mutex);
  return e->metrics ? *e->metrics : std::string();
}

std::optional<nlohmann::json> SessionService::overlay(const std::string& id) const {
  const auto e = find(id);
  if (!e) return std::nullopt;
  std::lock_guard lock(e->mutex);
  return e->overlay ? *e->overlay : json::object();
}

std::optional<std::string> SessionService::map_pgm(const std::string& id) const {
  const auto e = find(id);
  if (!e) return std::nullopt;
  // The world is immutable once the session exists.
  return encode_pgm(e->session->world().grid);
}

void SessionService::wait_idle(const std::string& id) {
  const auto e = find(id);
  if (!e) return;
  for (;;) {
    {
      std::lock_guard lock(e->mutex);
      if (e->phase == Phase::pending_query || e->phase == Phase::complete) return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
}

void SessionService::install(httplib::Server& server) {
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto not_found = [](httplib::Response& res, const std::string& id) {
    res.status = 404;
    res.set_content(error("unknown session " + id).dump(), "application/json");
  };

  server.Post("/sessions", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::string ini;
    try {
      const auto body = json::parse(req.body);
      ini = body.at("config").get<std::string>();
    } catch (const json::exception& ex) {
      send(res, {400, error(std::string("expected {\"config\": \"<ini text>\"}: ") + ex.what())});
      return;
    }
    send(res, create(ini));
  });
  server.Get(R"(/sessions/([^/]+)/state)", [this, send](const httplib::Request& req,
                                                        httplib::Response& res) {
    send(res, state(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/answer)", [this, send](const httplib::Request& req,
                                                          httplib::Response& res) {
    std::string text;
    try {
      text = json::parse(req.body).at("text").get<std::string>();
    } catch (const json::exception& ex) {
      send(res, {400, error(std::string("expected {\"text\": \"...\"}: ") + ex.what())});
      return;
    }
    send(res, answer(req.matches[1], text));
  });
  server.Post(R"(/sessions/([^/]+)/auto-step)", [this, send](const httplib::Request& req,
                                                             httplib::Response& res) {
    send(res, auto_step(req.matches[1]));
  });
  server.Get(R"(/sessions/([^/]+)/metrics\.csv)", [this, not_found](const httplib::Request& req,
                                                                   httplib::Response& res) {
    const auto csv = metrics_csv(req.matches[1]);
    if (!csv) return not_found(res, req.matches[1]);
    res.set_content(*csv, "text/csv");
  });
  server.Get(R"(/sessions/([^/]+)/overlay\.json)", [this, not_found](const httplib::Request& req,
                                                                    httplib::Response& res) {
    const auto doc = overlay(req.matches[1]);
    if (!doc) return not_found(res, req.matches[1]);
    res.set_content(doc->dump(), "application/json");
  });
  server.Get(R"(/sessions/([^/]+)/map\.pgm)", [this, not_found](const httplib::Request& req,
                                                               httplib::Response& res) {
    const auto pgm = map_pgm(req.matches[1]);
    if (!pgm) return not_found(res, req.matches[1]);
    res.set_content(*pgm, "image/x-portable-graymap");
  });
}

void serve(SessionService& service, const std::string& host, int port) {
  httplib::Server server;
  service.install(server);
  if (!server.listen(host, port))
    throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace spco
