#pragma once

#include <optional>
#include <vector>

#include "spco/hyperparameters.hpp"
#include "spco/niw.hpp"
#include "spco/observation.hpp"
#include "spco/sufficient_stats.hpp"

namespace spco {

/// Unnormalized joint over (concept, position distribution) for one query,
/// held in log space. Row l, column k.
struct ProposalTable {
  Eigen::MatrixXd log_entries;
  double log_total = 0.0;  // log of the sum of all entries

  Eigen::MatrixXd probabilities() const { return (log_entries.array() - log_total).exp(); }
  Eigen::MatrixXd unnormalized() const { return log_entries.array().exp(); }
};

/// Posterior-mean parameters of one particle.
struct ModelParams {
  Eigen::VectorXd pi;     // L
  Eigen::MatrixXd phi;    // L x K, rows sum to 1
  Eigen::MatrixXd W;      // L x G, rows sum to 1
  std::vector<Vec2> mu;   // K
  std::vector<Mat2> Sigma;  // K
};

NIWPosterior<double> niw_posterior(int k, const SufficientStats& stats,
                                   const Hyperparameters& h);

double log_position_predictive(const Vec2& x, int k, const SufficientStats& stats,
                               const Hyperparameters& h);
inline double position_predictive(const Vec2& x, int k, const SufficientStats& stats,
                                  const Hyperparameters& h) {
  return std::exp(log_position_predictive(x, k, stats, h));
}

double log_word_predictive(const BagOfWords& words, int l, const SufficientStats& stats,
                           const Hyperparameters& h);
inline double word_predictive(const BagOfWords& words, int l, const SufficientStats& stats,
                              const Hyperparameters& h) {
  return std::exp(log_word_predictive(words, l, stats, h));
}

double log_assignment_prior(int l, int k, const SufficientStats& stats,
                            const Hyperparameters& h);
inline double assignment_prior(int l, int k, const SufficientStats& stats,
                               const Hyperparameters& h) {
  return std::exp(log_assignment_prior(l, k, stats, h));
}

// words == nullptr evaluates the position-only table (word factor 1).
ProposalTable joint_proposal_table(const Vec2& x, const BagOfWords* words,
                                   const SufficientStats& stats, const Hyperparameters& h);

ModelParams expected_params(const SufficientStats& stats, const Hyperparameters& h);

double log_gaussian_density(const Vec2& x, const Vec2& mu, const Mat2& Sigma);

// log(sum(exp(v))) with max subtraction.
double log_sum_exp(const Eigen::Ref<const Eigen::ArrayXd>& v);

/// Cached predictive pieces derived from one particle's statistics: the
/// Student-t factor per position distribution, per-concept word
/// denominators, and the log assignment-prior table.
class PredictiveModel {
 public:
  PredictiveModel() = default;
  PredictiveModel(const SufficientStats& stats, const Hyperparameters& h);

  // Refresh only what depends on the touched concept / position distribution.
  void update_after_add(const SufficientStats& stats, const Hyperparameters& h,
                        Assignment touched);
  void update_vocabulary(const SufficientStats& stats, const Hyperparameters& h);

  double log_position(const Vec2& x, int k) const { return predictive_[k].log_density(x); }
  double log_word(const BagOfWords& words, int l, const SufficientStats& stats,
                  const Hyperparameters& h) const;
  // log p(single token g | concept l) for all l, g.
  Eigen::MatrixXd log_word_table(const SufficientStats& stats, const Hyperparameters& h) const;
  const Eigen::MatrixXd& log_prior() const { return log_prior_; }
  const StudentT2<double>& predictive(int k) const { return predictive_[k]; }

  ProposalTable table(const Vec2& x, const BagOfWords* words, const SufficientStats& stats,
                      const Hyperparameters& h) const;

 private:
  void refresh_prior(const SufficientStats& stats, const Hyperparameters& h);

  std::vector<StudentT2<double>> predictive_;
  Eigen::VectorXd log_word_denominator_;
  Eigen::MatrixXd log_prior_;
};

}  // namespace spco
