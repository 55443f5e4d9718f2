#include "spco/particle_filter.hpp"

#include <cassert>
#include <cmath>
#include <unordered_map>

#include "spco/parallel.hpp"

namespace spco {

AssignmentHistory AssignmentHistory::appended(Assignment a) const {
  AssignmentHistory out;
  const std::uint64_t prev = hash();
  const std::uint64_t code =
      (static_cast<std::uint64_t>(a.concept_index) << 32) ^ static_cast<std::uint32_t>(a.posdist);
  out.head_ = std::make_shared<const Node>(
      Node{a, head_, size() + 1, splitmix64(prev ^ splitmix64(code + size() + 1))});
  return out;
}

std::vector<Assignment> AssignmentHistory::to_vector() const {
  std::vector<Assignment> out(size());
  std::size_t i = out.size();
  for (const Node* n = head_.get(); n; n = n->parent.get()) out[--i] = n->value;
  return out;
}

AssignmentHistory AssignmentHistory::from_vector(std::span<const Assignment> assignments) {
  AssignmentHistory h;
  for (const auto& a : assignments) h = h.appended(a);
  return h;
}

Particle::Particle(int L, int K, int G, const Hyperparameters& h)
    : stats(L, K, G), predictive(stats, h), params(expected_params(stats, h)) {}

void Particle::absorb(const Observation& obs, Assignment a, const Hyperparameters& h) {
  stats.add(obs, a);
  predictive.update_after_add(stats, h, a);
  history = history.appended(a);
}

ParticleSet::ParticleSet(const Hyperparameters& h, int vocab_size, std::uint64_t seed_)
    : seed(seed_) {
  h.validate();
  Particle proto(h.L, h.K, vocab_size, h);
  proto.weight = 1.0 / h.R;
  particles.assign(static_cast<std::size_t>(h.R), proto);
}

std::vector<int> ParticleSet::representative_index() const {
  std::vector<int> rep(particles.size());
  std::unordered_map<std::uint64_t, int> first;
  for (int r = 0; r < size(); ++r) {
    auto [it, inserted] = first.emplace(particles[r].history.hash(), r);
    rep[r] = it->second;
  }
  return rep;
}

Proposal propose_assignment(const Particle& particle, const Observation& obs,
                            const Hyperparameters& h, Rng& rng) {
  const ProposalTable table = particle.predictive.table(obs.position, &obs.words, particle.stats, h);
  if (!std::isfinite(table.log_total))
    throw NumericalError("proposal table has no finite mass");
  const Eigen::MatrixXd probs = table.probabilities();
  // Row-major flattening: index = l * K + k.
  const int L = static_cast<int>(probs.rows()), K = static_cast<int>(probs.cols());
  std::vector<double> flat(static_cast<std::size_t>(L * K));
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) flat[l * K + k] = probs(l, k);
  const int idx = sample_categorical(flat, rng.uniform());
  if (idx < 0) throw NumericalError("proposal table is all zero");
  return {Assignment{idx / K, idx % K}, table.log_total};
}

double log_importance_weight(const Particle& particle, const Observation& obs,
                             const Hyperparameters& h) {
  return particle.predictive.table(obs.position, &obs.words, particle.stats, h).log_total;
}

std::vector<int> systematic_indices(std::span<const double> weights, double u) {
  const int R = static_cast<int>(weights.size());
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<int> out(static_cast<std::size_t>(R));
  double cdf = weights[0] / total;
  int j = 0;
  for (int i = 0; i < R; ++i) {
    const double pos = (u + i) / R;
    while (pos >= cdf && j < R - 1) cdf += weights[++j] / total;
    out[i] = j;
  }
  return out;
}

ParticleSet resample(const ParticleSet& set, Rng& rng) {
  const int R = set.size();
  std::vector<double> w(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) w[r] = set.particles[r].weight;
  const auto idx = systematic_indices(w, rng.uniform());
  ParticleSet out;
  out.observations = set.observations;
  out.step = set.step;
  out.seed = set.seed;
  out.particles.reserve(R);
  for (int i : idx) {
    out.particles.push_back(set.particles[i]);
    out.particles.back().weight = 1.0 / R;
  }
  return out;
}

ParticleSet online_update(ParticleSet set, const Observation& obs, const Hyperparameters& h,
                          int threads) {
  if (!obs.position.allFinite()) throw DimensionError("observation position is not finite");
  const int R = set.size();
  const int n = set.step + 1;
  std::vector<double> log_w(static_cast<std::size_t>(R));
  parallel_for(R, threads, [&](int r) {
    Particle& p = set.particles[r];
    Rng rng(stream_seed(set.seed, Stream::learn, static_cast<std::uint64_t>(n),
                        static_cast<std::uint64_t>(r)));
    const Proposal prop = propose_assignment(p, obs, h, rng);
    log_w[r] = std::log(p.weight) + prop.log_increment;
    p.absorb(obs, prop.assignment, h);
    p.refresh_params(h);
    assert(p.stats.consistent());
  });
  const double log_norm =
      log_sum_exp(Eigen::Map<const Eigen::ArrayXd>(log_w.data(), static_cast<Eigen::Index>(R)));
  for (int r = 0; r < R; ++r) set.particles[r].weight = std::exp(log_w[r] - log_norm);
  set.observations.push_back(obs);
  set.step = n;
  Rng rng(stream_seed(set.seed, Stream::resample, static_cast<std::uint64_t>(n)));
  return resample(set, rng);
}

void extend_vocabulary(ParticleSet& set, int G, const Hyperparameters& h) {
  for (auto& p : set.particles) {
    p.stats.extend_vocabulary(G);
    p.predictive.update_vocabulary(p.stats, h);
    p.refresh_params(h);
  }
}

}  // namespace spco
