#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "spco/hyperparameters.hpp"
#include "spco/rng.hpp"
#include "spco/spatial_model.hpp"

namespace spco {

/// Immutable, structurally shared list of assignments. Appending creates a
/// new head; copies made by resampling share the whole prefix.
class AssignmentHistory {
 public:
  std::size_t size() const { return head_ ? head_->length : 0; }
  bool empty() const { return !head_; }
  // Hash of the full sequence; equal sequences hash equally.
  std::uint64_t hash() const { return head_ ? head_->hash : 0; }
  Assignment back() const { return head_->value; }

  AssignmentHistory appended(Assignment a) const;
  std::vector<Assignment> to_vector() const;

  static AssignmentHistory from_vector(std::span<const Assignment> assignments);

 private:
  struct Node {
    Assignment value;
    std::shared_ptr<const Node> parent;
    std::size_t length;
    std::uint64_t hash;
  };
  std::shared_ptr<const Node> head_;
};

/// One posterior hypothesis over the assignment history, with the
/// statistics and cached predictives it implies.
struct Particle {
  Particle() = default;
  Particle(int L, int K, int G, const Hyperparameters& h);

  AssignmentHistory history;
  SufficientStats stats;
  PredictiveModel predictive;
  ModelParams params;
  double weight = 1.0;

  void absorb(const Observation& obs, Assignment a, const Hyperparameters& h);
  void refresh_params(const Hyperparameters& h) { params = expected_params(stats, h); }
};

struct ParticleSet {
  ParticleSet() = default;
  ParticleSet(const Hyperparameters& h, int vocab_size, std::uint64_t seed);

  std::vector<Particle> particles;
  std::vector<Observation> observations;  // absorbed data, in order
  int step = 0;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(particles.size()); }
  int vocab_size() const { return particles.empty() ? 0 : particles.front().stats.vocab_size; }

  // Index of the first particle with an identical history, per particle.
  // Duplicates share stats, so predictive work can be done once per class.
  std::vector<int> representative_index() const;
};

struct Proposal {
  Assignment assignment;
  double log_increment = 0.0;  // log of the unnormalized table's sum
};

// Draws (C_n, i_n) from the normalized joint table and reports the table's
// total mass, which is the importance-weight increment.
Proposal propose_assignment(const Particle& particle, const Observation& obs,
                            const Hyperparameters& h, Rng& rng);

// log p(x_n, S_n | history): the table summed over (l, k), evaluated before
// the observation is absorbed.
double log_importance_weight(const Particle& particle, const Observation& obs,
                             const Hyperparameters& h);

// Low-variance resampling: positions (u + i) / R against cumulative weights.
std::vector<int> systematic_indices(std::span<const double> weights, double u);

ParticleSet resample(const ParticleSet& set, Rng& rng);

ParticleSet online_update(ParticleSet set, const Observation& obs, const Hyperparameters& h,
                          int threads = 1);

// Grows every particle's word table to G columns (live sessions only).
void extend_vocabulary(ParticleSet& set, int G, const Hyperparameters& h);

}  // namespace spco
