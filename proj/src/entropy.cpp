#include "spco/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>

#include "spco/explorer.hpp"
#include "spco/parallel.hpp"

namespace spco {

namespace {

double digamma(double x) { return boost::math::digamma(x); }

// Running pieces of a Dirichlet entropy, so bumping one coordinate by one
// count is O(1).
struct DirichletSums {
  int n = 0;
  double a0 = 0.0;
  double sum_lgamma = 0.0;
  double sum_digamma = 0.0;  // sum (a_j - 1) psi(a_j)

  void add(double a) {
    ++n;
    a0 += a;
    sum_lgamma += std::lgamma(a);
    sum_digamma += (a - 1.0) * digamma(a);
  }

  double entropy() const {
    return sum_lgamma - std::lgamma(a0) + (a0 - n) * digamma(a0) - sum_digamma;
  }

  double entropy_after_increment(double a) const {
    DirichletSums s = *this;
    s.a0 += 1.0;
    s.sum_lgamma += std::log(a);
    s.sum_digamma += a * digamma(a + 1.0) - (a - 1.0) * digamma(a);
    return s.entropy();
  }
};

std::uint64_t partition_step(std::uint64_t h, int concept_label, int posdist_label,
                             std::size_t length) {
  const std::uint64_t code = (static_cast<std::uint64_t>(concept_label) << 32) ^
                             static_cast<std::uint32_t>(posdist_label);
  return splitmix64(h ^ splitmix64(code + length));
}

NIWPosterior<double> niw_with_point(int k, const SufficientStats& stats, const Vec2& x,
                                    const Hyperparameters& h) {
  return niw_update<double>(h.m0, h.kappa0, h.nu0, h.V0, stats.n_posdist(k) + 1.0,
                            stats.sum_x.col(k) + x, stats.sum_xxT[k] + x * x.transpose());
}

// Everything about one distinct particle that does not depend on the query.
struct EntropyBase {
  const Particle* particle = nullptr;
  std::vector<int> concept_label, posdist_label;
  int next_concept = 0, next_posdist = 0;
  std::uint64_t partition = 0;
  std::size_t length = 0;

  DirichletSums pi;
  std::vector<DirichletSums> phi, words;
  std::vector<double> niw;
  double total = 0.0;

  EntropyBase(const Particle& p, const Hyperparameters& h) : particle(&p) {
    const auto& s = p.stats;
    const int L = s.num_concepts(), K = s.num_posdists(), G = s.vocab_size;
    concept_label.assign(L, -1);
    posdist_label.assign(K, -1);
    for (const auto& a : p.history.to_vector()) {
      if (concept_label[a.concept_index] < 0) concept_label[a.concept_index] = next_concept++;
      if (posdist_label[a.posdist] < 0) posdist_label[a.posdist] = next_posdist++;
      ++length;
      partition = partition_step(partition, concept_label[a.concept_index],
                                 posdist_label[a.posdist], length);
    }
    for (int l = 0; l < L; ++l) pi.add(s.n_concept(l) + h.alpha / L);
    total += pi.entropy();
    phi.resize(L);
    words.resize(L);
    for (int l = 0; l < L; ++l) {
      for (int k = 0; k < K; ++k) phi[l].add(s.n_concept_posdist(l, k) + h.gamma / K);
      for (int g = 0; g < G; ++g) words[l].add(s.n_word(l, g) + h.beta);
      total += phi[l].entropy() + (G > 0 ? words[l].entropy() : 0.0);
    }
    niw.resize(K);
    for (int k = 0; k < K; ++k) total += (niw[k] = niw_entropy(niw_posterior(k, s, h)));
  }

  std::uint64_t partition_with(int l, int k) const {
    const int cl = concept_label[l] >= 0 ? concept_label[l] : next_concept;
    const int ck = posdist_label[k] >= 0 ? posdist_label[k] : next_posdist;
    return partition_step(partition, cl, ck, length + 1);
  }

  double entropy_with(int l, int k, int g, double niw_after, const Hyperparameters& h) const {
    const auto& s = particle->stats;
    const int L = s.num_concepts(), K = s.num_posdists();
    double out = total;
    out += pi.entropy_after_increment(s.n_concept(l) + h.alpha / L) - pi.entropy();
    out += phi[l].entropy_after_increment(s.n_concept_posdist(l, k) + h.gamma / K) -
           phi[l].entropy();
    out += words[l].entropy_after_increment(s.n_word(l, g) + h.beta) - words[l].entropy();
    out += niw_after - niw[k];
    return out;
  }
};

struct Groups {
  std::vector<int> members;
  std::vector<int> slot;
};

Groups group(const ParticleSet& set) {
  Groups g;
  const auto rep = set.representative_index();
  g.slot.assign(rep.size(), -1);
  for (int r = 0; r < set.size(); ++r) {
    if (rep[r] == r) {
      g.slot[r] = static_cast<int>(g.members.size());
      g.members.push_back(r);
    }
    g.slot[r] = g.slot[rep[r]];
  }
  return g;
}

double entropy_score_impl(const ParticleSet& set, const Groups& groups,
                          const std::vector<EntropyBase>& bases,
                          const std::vector<WordTables>& tables, const Vec2& x, int J,
                          const Hyperparameters& h, Rng& rng) {
  const int R = set.size();
  const int G = set.vocab_size();
  if (R == 0 || G == 0) return 0.0;
  const int U = static_cast<int>(groups.members.size());
  const int L = h.L, K = h.K;

  std::vector<PseudoWordSampler> samplers;
  std::vector<Eigen::MatrixXd> joint(U);
  std::vector<std::vector<double>> niw_after(U);
  samplers.reserve(U);
  for (int u = 0; u < U; ++u) {
    const Particle& p = set.particles[groups.members[u]];
    samplers.emplace_back(p, tables[u], x, h);
    joint[u] = p.predictive.log_prior();
    for (int k = 0; k < K; ++k) joint[u].col(k).array() += p.predictive.log_position(x, k);
    niw_after[u].resize(K);
    for (int k = 0; k < K; ++k) niw_after[u][k] = niw_entropy(niw_with_point(k, p.stats, x, h));
  }

  std::vector<int> drawn(G, 0);
  for (int r = 0; r < R; ++r)
    for (int j = 0; j < J; ++j) ++drawn[samplers[groups.slot[r]].draw(rng)];
  const std::uint64_t base = rng.engine()();

  double total = 0.0;
  std::vector<std::vector<double>> cdfs(U);
  std::vector<double> log_inc(U);
  std::vector<double> log_w(R), param(R);
  std::vector<std::uint64_t> keys(R);
  for (int g = 0; g < G; ++g) {
    if (drawn[g] == 0) continue;
    for (int u = 0; u < U; ++u) {
      const Eigen::MatrixXd t = joint[u].colwise() + tables[u].log_word.col(g);
      const double top = t.maxCoeff();
      auto& c = cdfs[u];
      c.resize(static_cast<std::size_t>(L * K));
      double acc = 0.0;
      for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k) c[l * K + k] = (acc += std::exp(t(l, k) - top));
      log_inc[u] = top + std::log(acc);
    }
    Rng pseudo(mix_seed(base, {static_cast<std::uint64_t>(g)}));
    for (int r = 0; r < R; ++r) {
      const int u = groups.slot[r];
      const int lk = sample_from_cdf(cdfs[u], pseudo.uniform());
      const int l = lk / K, k = lk % K;
      log_w[r] = log_inc[u];
      keys[r] = bases[u].partition_with(l, k);
      param[r] = bases[u].entropy_with(l, k, g, niw_after[u][k], h);
    }
    const double norm =
        log_sum_exp(Eigen::Map<const Eigen::ArrayXd>(log_w.data(), static_cast<Eigen::Index>(R)));
    std::vector<double> w(R);
    double expected_param = 0.0;
    for (int r = 0; r < R; ++r) {
      w[r] = std::exp(log_w[r] - norm);
      expected_param += w[r] * param[r];
    }
    total += drawn[g] * (partition_entropy(keys, w) + expected_param);
  }
  return total / (static_cast<double>(R) * J);
}

}  // namespace

double dirichlet_entropy(const Eigen::Ref<const Eigen::VectorXd>& a) {
  DirichletSums s;
  for (Eigen::Index i = 0; i < a.size(); ++i) s.add(a(i));
  return s.entropy();
}

double wishart_expected_log_det(const Mat2& S, double nu) {
  double out = kDim * std::numbers::ln2 + std::log(S.determinant());
  for (int i = 1; i <= kDim; ++i) out += digamma((nu + 1 - i) / 2);
  return out;
}

double wishart_entropy(const Mat2& S, double nu) {
  const double d = kDim;
  double log_B = -(nu / 2) * std::log(S.determinant()) - (nu * d / 2) * std::numbers::ln2 -
                 (d * (d - 1) / 4) * std::log(std::numbers::pi);
  for (int i = 1; i <= kDim; ++i) log_B -= std::lgamma((nu + 1 - i) / 2);
  return -log_B - (nu - d - 1) / 2 * wishart_expected_log_det(S, nu) + nu * d / 2;
}

double inverse_wishart_entropy(const Mat2& V, double nu) {
  const Mat2 S = V.inverse();
  return wishart_entropy(S, nu) - (kDim + 1) * wishart_expected_log_det(S, nu);
}

double niw_entropy(const NIWPosterior<double>& p) {
  const double d = kDim;
  const Mat2 S = p.V.inverse();
  const double e_log_det_precision = wishart_expected_log_det(S, p.nu);
  return inverse_wishart_entropy(p.V, p.nu) + (d / 2) * (1 + std::log(2 * std::numbers::pi)) -
         (d / 2) * std::log(p.kappa) - 0.5 * e_log_det_precision;
}

double parameter_entropy(const SufficientStats& stats, const Hyperparameters& h) {
  Particle p;
  p.stats = stats;
  return EntropyBase(p, h).total;
}

std::uint64_t canonical_partition_hash(std::span<const Assignment> assignments) {
  std::vector<std::pair<int, int>> concept_map, posdist_map;
  auto label = [](std::vector<std::pair<int, int>>& map, int v) {
    for (const auto& [from, to] : map)
      if (from == v) return to;
    map.emplace_back(v, static_cast<int>(map.size()));
    return map.back().second;
  };
  std::uint64_t h = 0;
  std::size_t n = 0;
  for (const auto& a : assignments) {
    const int cl = label(concept_map, a.concept_index);
    const int ck = label(posdist_map, a.posdist);
    h = partition_step(h, cl, ck, ++n);
  }
  return h;
}

double partition_entropy(std::span<const std::uint64_t> keys, std::span<const double> weights) {
  std::vector<std::pair<std::uint64_t, double>> pooled;
  pooled.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) pooled.emplace_back(keys[i], weights[i]);
  std::sort(pooled.begin(), pooled.end());
  double H = 0.0;
  for (std::size_t i = 0; i < pooled.size();) {
    double w = 0.0;
    std::size_t j = i;
    for (; j < pooled.size() && pooled[j].first == pooled[i].first; ++j) w += pooled[j].second;
    if (w > 0) H -= w * std::log(w);
    i = j;
  }
  return H;
}

double entropy_score(const ParticleSet& set, const Vec2& x, int J, const Hyperparameters& h,
                     Rng& rng) {
  if (!x.allFinite()) throw DimensionError("query position is not finite");
  const auto groups = group(set);
  std::vector<EntropyBase> bases;
  std::vector<WordTables> tables;
  for (int r : groups.members) {
    bases.emplace_back(set.particles[r], h);
    tables.emplace_back(set.particles[r], h);
  }
  return entropy_score_impl(set, groups, bases, tables, x, J, h, rng);
}

std::vector<double> score_entropy(const ParticleSet& set, std::span<const Vec2> positions,
                                  const Hyperparameters& h, std::uint64_t seed, int step,
                                  int threads) {
  const auto groups = group(set);
  std::vector<EntropyBase> bases;
  std::vector<WordTables> tables;
  for (int r : groups.members) {
    bases.emplace_back(set.particles[r], h);
    tables.emplace_back(set.particles[r], h);
  }
  std::vector<double> out(positions.size(), 0.0);
  parallel_for(static_cast<int>(positions.size()), threads, [&](int a) {
    Rng rng(stream_seed(seed, Stream::entropy, static_cast<std::uint64_t>(step),
                        static_cast<std::uint64_t>(a)));
    out[a] = entropy_score_impl(set, groups, bases, tables, positions[a], h.J, h, rng);
  });
  return out;
}

}  // namespace spco
