#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spco/particle_filter.hpp"

namespace spco {

/// Per-particle pieces that do not depend on the query position: word
/// probabilities per concept and their cumulative rows for sampling.
struct WordTables {
  Eigen::MatrixXd log_word;  // L x G, log p(g | l)
  Eigen::MatrixXd word;      // L x G
  Eigen::MatrixXd word_cdf;  // L x G, running row sums

  WordTables(const Particle& particle, const Hyperparameters& h);
};

/// Position-conditioned predictive of one particle at a fixed point x_a.
/// Draws a one-token pseudo-utterance by first sampling (C_a, i_a) from
/// St(x_a | k) p(C, i | history) and then a word from concept C_a.
class PseudoWordSampler {
 public:
  PseudoWordSampler(const Particle& particle, const WordTables& words, const Vec2& x,
                    const Hyperparameters& h);

  int draw(Rng& rng) const;

  // log p(x_a, S_a = {g} | history), the same marginal as the weight term.
  double log_marginal(int g) const { return log_marginal_(g); }
  // log p(x | Z), the position part of the marginal.
  double log_position() const { return log_position_; }
  const Eigen::VectorXd& log_marginals() const { return log_marginal_; }

 private:
  const WordTables* words_;
  int K_ = 0;
  std::vector<double> joint_cdf_;  // row-major over (l, k)
  Eigen::VectorXd log_marginal_;
  double log_position_ = 0.0;
};

BagOfWords sample_pseudo_words(const Particle& particle, const Vec2& x, const Hyperparameters& h,
                               Rng& rng);

// joint: the ratio uses p(x_a, S | Z^r), position factor included.
// word_given_position: the ratio uses p(S | x_a, Z^r); never negative in expectation.
enum class IGForm { joint, word_given_position };

// Particle-reuse estimate in nats:
//   1/(R J) sum_r sum_j log[ p(X^{r,j} | Z^r) / (1/R sum_r' p(X^{r,j} | Z^r')) ]
// with X^{r,j} drawn from particle r. Weights are taken as 1/R.
double information_gain(const ParticleSet& set, const Vec2& x, int J, const Hyperparameters& h,
                        Rng& rng, IGForm form = IGForm::joint);

// IG for every position; candidate a uses substream (seed, step, a), so the
// result does not depend on thread count or evaluation order.
std::vector<double> score_information_gain(const ParticleSet& set,
                                           std::span<const Vec2> positions,
                                           const Hyperparameters& h, std::uint64_t seed,
                                           int step, int threads = 1,
                                           IGForm form = IGForm::joint);

struct IGRow {
  int candidate = 0;
  double ig = 0.0;           // nats
  double travel_cost = 0.0;  // grid cells; +inf when unreachable
  double utility = 0.0;      // ig - eta * travel_cost
};

struct IGTable {
  std::vector<IGRow> rows;
};

IGTable make_ig_table(std::span<const double> ig, std::span<const double> travel_cost,
                      double eta);

struct ExplorationState {
  ExplorationState() = default;
  ExplorationState(int num_candidates, int start_candidate, const Vec2& start_pose,
                   bool revisit, int budget)
      : visit_count(static_cast<std::size_t>(num_candidates), 0),
        pose_candidate(start_candidate),
        current_pose(start_pose),
        revisit_mode(revisit),
        step_budget(budget) {}

  std::vector<int> visit_count;  // visited set n0 as per-candidate counts
  int pose_candidate = 0;
  Vec2 current_pose = Vec2::Zero();
  bool revisit_mode = false;
  int step_budget = 0;

  bool visited(int a) const { return visit_count[a] > 0; }
  void visit(int a, const Vec2& pos) {
    ++visit_count[a];
    pose_candidate = a;
    current_pose = pos;
  }

  // Candidates the policy may choose: unvisited (or any, when revisiting)
  // and reachable.
  std::vector<bool> eligible(std::span<const double> travel_cost) const;
};

// argmax utility over eligible rows, lowest index on ties; nullopt when
// nothing is eligible (exploration complete).
std::optional<int> select_destination(const IGTable& table, const std::vector<bool>& eligible);

struct Selection {
  std::optional<int> candidate;
  IGTable table;
};

Selection select_destination(const ParticleSet& set, std::span<const Vec2> candidates,
                             const ExplorationState& state,
                             std::span<const double> travel_from_pose, const Hyperparameters& h,
                             std::uint64_t seed, int step, int threads = 1,
                             IGForm form = IGForm::joint);

enum class Baseline { random, min_travel_cost, min_ig };

std::optional<int> baseline_policy(Baseline kind, const IGTable& table,
                                   const std::vector<bool>& eligible, Rng& rng);

}  // namespace spco
