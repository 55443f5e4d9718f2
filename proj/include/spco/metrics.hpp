#pragma once

#include <span>
#include <string>
#include <vector>

#include "spco/particle_filter.hpp"

namespace spco {

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

enum class LabelKind { concept_label, posdist_label };

std::vector<int> particle_labels(const Particle& p, LabelKind which);

// sum_r w_r ARI(labels of particle r, truth); truth covers the observations.
double weighted_ari(const ParticleSet& set, std::span<const int> truth, LabelKind which);

// Label of the best (l, k) under pi_l phi_lk N(x | mu_k, Sigma_k).
Assignment padded_assignment(const ModelParams& params, const Vec2& x);

// Observed labels followed by padded labels for every unvisited point,
// scored against observation truth followed by the unvisited points' truth.
double padded_weighted_ari(const ParticleSet& set, std::span<const int> observed_truth,
                           std::span<const Vec2> unvisited, std::span<const int> unvisited_truth,
                           LabelKind which);

// 100 * (first step with ARI >= threshold) / steps; 100 when never reached.
double nms(std::span<const double> ari_series, double threshold = 0.6);
double lsr(std::span<const double> ari_series, double threshold = 0.6);

struct TravelSummary {
  std::vector<double> cumulative;
  double per_step_mean = 0.0;  // total path length / candidate count
};

TravelSummary travel_distance(std::span<const double> path_lengths, int candidate_count);

struct RankedWord {
  int word = 0;
  double pmi = 0.0;
};

// log p(s | i = k) / p(s) with p(s | k) proportional to sum_l W_l[s] pi_l phi_lk.
std::vector<RankedWord> pmi_top_words(const ModelParams& params, int k, int top_n);

}  // namespace spco
