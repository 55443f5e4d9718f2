#include "spco/explorer.hpp"

#include <cmath>
#include <limits>

#include "spco/parallel.hpp"

namespace spco {

WordTables::WordTables(const Particle& particle, const Hyperparameters& h)
    : log_word(particle.predictive.log_word_table(particle.stats, h)) {
  word = log_word.array().exp().matrix();
  word_cdf = word;
  for (Eigen::Index g = 1; g < word_cdf.cols(); ++g) word_cdf.col(g) += word_cdf.col(g - 1);
}

PseudoWordSampler::PseudoWordSampler(const Particle& particle, const WordTables& words,
                                     const Vec2& x, const Hyperparameters&)
    : words_(&words) {
  const auto& prior = particle.predictive.log_prior();
  const int L = static_cast<int>(prior.rows());
  K_ = static_cast<int>(prior.cols());
  Eigen::MatrixXd joint = prior;
  for (int k = 0; k < K_; ++k) joint.col(k).array() += particle.predictive.log_position(x, k);
  const double a = joint.maxCoeff();
  const Eigen::MatrixXd mass = (joint.array() - a).exp().matrix();

  joint_cdf_.resize(static_cast<std::size_t>(L * K_));
  double acc = 0.0;
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K_; ++k) joint_cdf_[l * K_ + k] = (acc += mass(l, k));

  const Eigen::VectorXd concept_mass = mass.rowwise().sum();
  log_position_ = a + std::log(concept_mass.sum());
  // log sum_l p(g | l) sum_k p(x | k) p(l, k), shifted back by a.
  log_marginal_ = (words.word.transpose() * concept_mass).array().log() + a;
}

int PseudoWordSampler::draw(Rng& rng) const {
  const int lk = sample_from_cdf(joint_cdf_, rng.uniform());
  const int l = lk / K_;
  const auto row = words_->word_cdf.row(l);
  const double target = rng.uniform() * row(row.size() - 1);
  int lo = 0, hi = static_cast<int>(row.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (target < row(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

BagOfWords sample_pseudo_words(const Particle& particle, const Vec2& x, const Hyperparameters& h,
                               Rng& rng) {
  if (!x.allFinite()) throw DimensionError("query position is not finite");
  if (particle.stats.vocab_size == 0) return {};
  const WordTables words(particle, h);
  return BagOfWords::single(PseudoWordSampler(particle, words, x, h).draw(rng));
}

namespace {

struct UniqueParticles {
  std::vector<int> rep;      // representative per particle
  std::vector<int> members;  // representative indices, ascending
  std::vector<int> slot;     // particle index -> position in members
  std::vector<int> count;    // multiplicity per member
};

UniqueParticles group_particles(const ParticleSet& set) {
  UniqueParticles u;
  u.rep = set.representative_index();
  u.slot.assign(u.rep.size(), -1);
  for (int r = 0; r < set.size(); ++r) {
    if (u.rep[r] == r) {
      u.slot[r] = static_cast<int>(u.members.size());
      u.members.push_back(r);
      u.count.push_back(0);
    }
    const int s = u.slot[u.rep[r]];
    u.slot[r] = s;
    ++u.count[s];
  }
  return u;
}

double information_gain_impl(const ParticleSet& set, const UniqueParticles& groups,
                             const std::vector<WordTables>& words, const Vec2& x, int J,
                             const Hyperparameters& h, Rng& rng, IGForm form) {
  const int R = set.size();
  const int G = set.vocab_size();
  if (R == 0 || G == 0) return 0.0;
  const int U = static_cast<int>(groups.members.size());
  std::vector<PseudoWordSampler> samplers;
  samplers.reserve(U);
  for (int s = 0; s < U; ++s)
    samplers.emplace_back(set.particles[groups.members[s]], words[s], x, h);
  Eigen::MatrixXd log_p(U, G);
  for (int s = 0; s < U; ++s) {
    log_p.row(s) = samplers[s].log_marginals().transpose();
    if (form == IGForm::word_given_position) log_p.row(s).array() -= samplers[s].log_position();
  }

  // log of (1/R) sum_r' p(X | Z^r') for every word g.
  Eigen::VectorXd log_mix(G);
  const double log_R = std::log(static_cast<double>(R));
  for (int g = 0; g < G; ++g) {
    const double top = log_p.col(g).maxCoeff();
    double acc = 0.0;
    for (int s = 0; s < U; ++s) acc += groups.count[s] * std::exp(log_p(s, g) - top);
    log_mix(g) = top + (std::log(acc) - log_R);
  }

  double total = 0.0;
  for (int r = 0; r < R; ++r) {
    const int s = groups.slot[r];
    for (int j = 0; j < J; ++j) {
      const int g = samplers[s].draw(rng);
      total += log_p(s, g) - log_mix(g);
    }
  }
  return total / (static_cast<double>(R) * J);
}

std::vector<WordTables> build_word_tables(const ParticleSet& set, const UniqueParticles& groups,
                                          const Hyperparameters& h) {
  std::vector<WordTables> words;
  words.reserve(groups.members.size());
  for (int r : groups.members) words.emplace_back(set.particles[r], h);
  return words;
}

}  // namespace

double information_gain(const ParticleSet& set, const Vec2& x, int J, const Hyperparameters& h,
                        Rng& rng, IGForm form) {
  if (!x.allFinite()) throw DimensionError("query position is not finite");
  const auto groups = group_particles(set);
  const auto words = build_word_tables(set, groups, h);
  return information_gain_impl(set, groups, words, x, J, h, rng, form);
}

std::vector<double> score_information_gain(const ParticleSet& set,
                                           std::span<const Vec2> positions,
                                           const Hyperparameters& h, std::uint64_t seed,
                                           int step, int threads, IGForm form) {
  const auto groups = group_particles(set);
  const auto words = build_word_tables(set, groups, h);
  std::vector<double> ig(positions.size(), 0.0);
  parallel_for(static_cast<int>(positions.size()), threads, [&](int a) {
    Rng rng(stream_seed(seed, Stream::information_gain, static_cast<std::uint64_t>(step),
                        static_cast<std::uint64_t>(a)));
    ig[a] = information_gain_impl(set, groups, words, positions[a], h.J, h, rng, form);
  });
  return ig;
}

IGTable make_ig_table(std::span<const double> ig, std::span<const double> travel_cost,
                      double eta) {
  if (ig.size() != travel_cost.size()) throw DimensionError("IG and travel-cost sizes differ");
  IGTable t;
  t.rows.reserve(ig.size());
  for (std::size_t a = 0; a < ig.size(); ++a) {
    const double cost = travel_cost[a];
    const double utility = std::isfinite(cost) ? ig[a] - eta * cost
                                               : -std::numeric_limits<double>::infinity();
    t.rows.push_back({static_cast<int>(a), ig[a], cost, utility});
  }
  return t;
}

std::vector<bool> ExplorationState::eligible(std::span<const double> travel_cost) const {
  std::vector<bool> out(visit_count.size());
  for (std::size_t a = 0; a < out.size(); ++a)
    out[a] = (revisit_mode || visit_count[a] == 0) &&
             (travel_cost.empty() || std::isfinite(travel_cost[a]));
  return out;
}

namespace {

template <typename Better>
std::optional<int> pick(const IGTable& table, const std::vector<bool>& eligible, Better better) {
  std::optional<int> best;
  for (const auto& row : table.rows) {
    if (!eligible[row.candidate]) continue;
    if (!best || better(row, table.rows[*best])) best = row.candidate;
  }
  return best;
}

}  // namespace

std::optional<int> select_destination(const IGTable& table, const std::vector<bool>& eligible) {
  return pick(table, eligible,
              [](const IGRow& a, const IGRow& b) { return a.utility > b.utility; });
}

Selection select_destination(const ParticleSet& set, std::span<const Vec2> candidates,
                             const ExplorationState& state,
                             std::span<const double> travel_from_pose, const Hyperparameters& h,
                             std::uint64_t seed, int step, int threads, IGForm form) {
  Selection sel;
  const auto ig = score_information_gain(set, candidates, h, seed, step, threads, form);
  sel.table = make_ig_table(ig, travel_from_pose, h.eta);
  sel.candidate = select_destination(sel.table, state.eligible(travel_from_pose));
  return sel;
}

std::optional<int> baseline_policy(Baseline kind, const IGTable& table,
                                   const std::vector<bool>& eligible, Rng& rng) {
  switch (kind) {
    case Baseline::random: {
      std::vector<int> pool;
      for (const auto& row : table.rows)
        if (eligible[row.candidate]) pool.push_back(row.candidate);
      if (pool.empty()) return std::nullopt;
      return pool[rng.below(static_cast<int>(pool.size()))];
    }
    case Baseline::min_travel_cost:
      return pick(table, eligible, [](const IGRow& a, const IGRow& b) {
        return a.travel_cost < b.travel_cost;
      });
    case Baseline::min_ig:
      return pick(table, eligible, [](const IGRow& a, const IGRow& b) { return a.ig < b.ig; });
  }
  return std::nullopt;
}

}  // namespace spco
