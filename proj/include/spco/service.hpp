#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "spco/session.hpp"

namespace httplib {
class Server;
}

namespace spco {

/// Live sessions behind a single-writer state machine:
/// pending_query -> learning -> scoring -> pending_query | complete.
/// Readers only ever see a published, fully built state document.
class SessionService {
 public:
  SessionService() = default;
  ~SessionService();
  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  struct Reply {
    int status = 200;
    nlohmann::json body;
  };

  Reply create(const std::string& config_ini);
  Reply state(const std::string& id) const;
  Reply answer(const std::string& id, const std::string& text);
  Reply auto_step(const std::string& id);
  std::optional<std::string> metrics_csv(const std::string& id) const;
  std::optional<nlohmann::json> overlay(const std::string& id) const;
  std::optional<std::string> map_pgm(const std::string& id) const;

  // Blocks until the session's background scoring has finished.
  void wait_idle(const std::string& id);

  void install(httplib::Server& server);

 private:
  struct Entry {
    std::string id;
    mutable std::mutex mutex;
    std::unique_ptr<ExplorationSession> session;  // touched only by the current writer
    Phase phase = Phase::pending_query;
    std::shared_ptr<const nlohmann::json> published;
    std::shared_ptr<const std::string> metrics;
    std::shared_ptr<const nlohmann::json> overlay;
    std::thread worker;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  Reply submit(const std::shared_ptr<Entry>& e, std::optional<std::string> text);
  static void publish(Entry& e, Phase phase);

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  int next_id_ = 1;
};

// Blocks serving HTTP until the process stops.
void serve(SessionService& service, const std::string& host, int port);

}  // namespace spco
