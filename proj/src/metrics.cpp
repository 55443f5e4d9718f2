#include "spco/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace spco {

namespace {

std::vector<int> dense_labels(std::span<const int> labels, int& count) {
  std::unordered_map<int, int> map;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    out[i] = map.emplace(labels[i], static_cast<int>(map.size())).first->second;
  count = static_cast<int>(map.size());
  return out;
}

long long pairs(long long n) { return n * (n - 1) / 2; }

template <typename LabelsOf>
double weighted_score(const ParticleSet& set, LabelsOf&& labels_of, std::span<const int> truth) {
  const auto rep = set.representative_index();
  std::vector<double> score(set.particles.size(), 0.0);
  double total = 0.0;
  for (int r = 0; r < set.size(); ++r) {
    if (rep[r] == r) score[r] = adjusted_rand_index(labels_of(set.particles[r]), truth);
    total += set.particles[r].weight * score[rep[r]];
  }
  return total;
}

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DimensionError("label sequences differ in length");
  if (a.size() < 2) throw DimensionError("ARI needs at least two items");
  int na = 0, nb = 0;
  const auto da = dense_labels(a, na), db = dense_labels(b, nb);
  std::vector<long long> table(static_cast<std::size_t>(na) * nb, 0), ra(na, 0), rb(nb, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++table[static_cast<std::size_t>(da[i]) * nb + db[i]];
    ++ra[da[i]];
    ++rb[db[i]];
  }
  long long index = 0, sa = 0, sb = 0;
  for (long long c : table) index += pairs(c);
  for (long long c : ra) sa += pairs(c);
  for (long long c : rb) sb += pairs(c);
  const long long n2 = pairs(static_cast<long long>(a.size()));
  // Integer form of (index - E) / (max - E) with E = sa sb / n2.
  const long long num = 2 * index * n2 - 2 * sa * sb;
  const long long den = (sa + sb) * n2 - 2 * sa * sb;
  if (den == 0) return 1.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<int> particle_labels(const Particle& p, LabelKind which) {
  const auto history = p.history.to_vector();
  std::vector<int> out(history.size());
  for (std::size_t i = 0; i < history.size(); ++i)
    out[i] = which == LabelKind::concept_label ? history[i].concept_index : history[i].posdist;
  return out;
}

double weighted_ari(const ParticleSet& set, std::span<const int> truth, LabelKind which) {
  if (truth.size() != set.observations.size())
    throw DimensionError("truth labels do not cover the observations");
  return weighted_score(
      set, [&](const Particle& p) { return particle_labels(p, which); }, truth);
}

Assignment padded_assignment(const ModelParams& params, const Vec2& x) {
  const int L = static_cast<int>(params.pi.size()), K = static_cast<int>(params.mu.size());
  Eigen::VectorXd log_pos(K);
  for (int k = 0; k < K; ++k) log_pos(k) = log_gaussian_density(x, params.mu[k], params.Sigma[k]);
  Assignment best;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) {
      const double v = std::log(params.pi(l)) + std::log(params.phi(l, k)) + log_pos(k);
      if (v > best_v) {
        best_v = v;
        best = {l, k};
      }
    }
  return best;
}

double padded_weighted_ari(const ParticleSet& set, std::span<const int> observed_truth,
                           std::span<const Vec2> unvisited, std::span<const int> unvisited_truth,
                           LabelKind which) {
  if (observed_truth.size() != set.observations.size())
    throw DimensionError("truth labels do not cover the observations");
  if (unvisited.size() != unvisited_truth.size())
    throw DimensionError("unvisited points and truth differ in length");
  std::vector<int> truth(observed_truth.begin(), observed_truth.end());
  truth.insert(truth.end(), unvisited_truth.begin(), unvisited_truth.end());
  return weighted_score(
      set,
      [&](const Particle& p) {
        auto labels = particle_labels(p, which);
        for (const auto& x : unvisited) {
          const Assignment a = padded_assignment(p.params, x);
          labels.push_back(which == LabelKind::concept_label ? a.concept_index : a.posdist);
        }
        return labels;
      },
      truth);
}

double nms(std::span<const double> ari_series, double threshold) {
  for (std::size_t i = 0; i < ari_series.size(); ++i)
    if (ari_series[i] >= threshold) return 100.0 * static_cast<double>(i + 1) / ari_series.size();
  return 100.0;
}

double lsr(std::span<const double> ari_series, double threshold) {
  if (ari_series.empty()) return 0.0;
  const auto hits = std::count_if(ari_series.begin(), ari_series.end(),
                                  [&](double v) { return v >= threshold; });
  return static_cast<double>(hits) / ari_series.size();
}

TravelSummary travel_distance(std::span<const double> path_lengths, int candidate_count) {
  TravelSummary s;
  double acc = 0.0;
  for (double d : path_lengths) s.cumulative.push_back(acc += d);
  if (candidate_count > 0) s.per_step_mean = acc / candidate_count;
  return s;
}

std::vector<RankedWord> pmi_top_words(const ModelParams& params, int k, int top_n) {
  const Eigen::Index G = params.W.cols();
  if (k < 0 || k >= params.phi.cols()) throw DimensionError("position-distribution index out of range");
  const Eigen::VectorXd joint_lk = params.pi.cwiseProduct(params.phi.col(k));
  const Eigen::VectorXd given_k = params.W.transpose() * joint_lk / joint_lk.sum();
  const Eigen::VectorXd marginal = params.W.transpose() * params.pi;
  std::vector<RankedWord> out(static_cast<std::size_t>(G));
  for (Eigen::Index g = 0; g < G; ++g)
    out[g] = {static_cast<int>(g), std::log(given_k(g)) - std::log(marginal(g))};
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedWord& a, const RankedWord& b) { return a.pmi > b.pmi; });
  if (static_cast<int>(out.size()) > top_n) out.resize(std::max(0, top_n));
  return out;
}

}  // namespace spco
