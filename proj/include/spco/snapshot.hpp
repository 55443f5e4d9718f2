#pragma once

#include <json.hpp>

#include "spco/session.hpp"

namespace spco {

// Full learner state: config, pose, visits, vocabulary, observations, and
// per-distinct-history counts and parameters with particle weights.
nlohmann::json snapshot_json(const ExplorationSession& session);

// Answers in the order they were given; enough to replay a session.
nlohmann::json observation_log_json(const ExplorationSession& session);

// Index of the particle whose history is shared by the most particles
// (lowest index on ties).
int modal_particle(const ParticleSet& set);

// Map-overlay data: position-distribution ellipses, candidate labels and the
// top-PMI words per used position distribution, taken from the modal particle.
nlohmann::json overlay_json(const ExplorationSession& session, int top_words = 5);

// Re-runs a session from its config and answer log; limit < 0 replays all.
ExplorationSession replay(const std::string& config_ini, const nlohmann::json& log, int limit = -1);
ExplorationSession replay(const nlohmann::json& snapshot, const nlohmann::json& log, int limit = -1);

}  // namespace spco
