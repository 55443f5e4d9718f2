#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spco/particle_filter.hpp"

namespace spco {

// Differential entropy of Dir(a).
double dirichlet_entropy(const Eigen::Ref<const Eigen::VectorXd>& a);

// E[ln |Lambda|] for Lambda ~ Wishart(scale S, dof nu), d = 2.
double wishart_expected_log_det(const Mat2& S, double nu);
double wishart_entropy(const Mat2& S, double nu);
// Entropy of Sigma ~ IW(V, nu), i.e. Sigma^-1 ~ Wishart(V^-1, nu).
double inverse_wishart_entropy(const Mat2& V, double nu);
// Joint entropy of (mu, Sigma) under NIW(m, kappa, nu, V).
double niw_entropy(const NIWPosterior<double>& p);

// Sum of the conjugate posterior entropies of pi, phi_l, W_l and every
// (mu_k, Sigma_k) implied by one particle's statistics.
double parameter_entropy(const SufficientStats& stats, const Hyperparameters& h);

// Hash of the partition an assignment sequence induces: concept and
// position-distribution labels renumbered by first appearance.
std::uint64_t canonical_partition_hash(std::span<const Assignment> assignments);

// -sum_p w_p log w_p over weights pooled by partition key.
double partition_entropy(std::span<const std::uint64_t> keys, std::span<const double> weights);

// Expected posterior entropy after one pseudo-observation at x: for every
// particle's J pseudo-words, every particle takes a one-step update (no
// resampling), and the assignment-partition entropy plus the weighted
// parameter entropy is averaged over the R*J draws. Lower is better.
double entropy_score(const ParticleSet& set, const Vec2& x, int J, const Hyperparameters& h,
                     Rng& rng);

std::vector<double> score_entropy(const ParticleSet& set, std::span<const Vec2> positions,
                                  const Hyperparameters& h, std::uint64_t seed, int step,
                                  int threads = 1);

}  // namespace spco
