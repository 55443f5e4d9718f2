#include "spco/spatial_model.hpp"

#include <cmath>
#include <numbers>

namespace spco {

namespace {

void check_indices(int l, int k, const SufficientStats& stats) {
  if (l < 0 || l >= stats.num_concepts() || k < 0 || k >= stats.num_posdists())
    throw DimensionError("concept or position-distribution index out of range");
}

void check_words(const BagOfWords& words, const SufficientStats& stats) {
  if (words.max_word() >= stats.vocab_size)
    throw DimensionError("bag-of-words index exceeds vocabulary size");
}

}  // namespace

NIWPosterior<double> niw_posterior(int k, const SufficientStats& stats,
                                   const Hyperparameters& h) {
  if (k < 0 || k >= stats.num_posdists())
    throw DimensionError("position-distribution index out of range");
  return niw_update<double>(h.m0, h.kappa0, h.nu0, h.V0, stats.n_posdist(k),
                            stats.sum_x.col(k), stats.sum_xxT[k]);
}

double log_position_predictive(const Vec2& x, int k, const SufficientStats& stats,
                               const Hyperparameters& h) {
  return posterior_predictive(niw_posterior(k, stats, h)).log_density(x);
}

double log_word_predictive(const BagOfWords& words, int l, const SufficientStats& stats,
                           const Hyperparameters& h) {
  check_indices(l, 0, stats);
  check_words(words, stats);
  const double log_den = std::log(stats.n_word_total(l) + stats.vocab_size * h.beta);
  double lp = 0.0;
  for (const auto& e : words.entries())
    lp += e.count * (std::log(stats.n_word(l, e.word) + h.beta) - log_den);
  return lp;
}

double log_assignment_prior(int l, int k, const SufficientStats& stats,
                            const Hyperparameters& h) {
  check_indices(l, k, stats);
  const double t_l = stats.n_concept(l);
  return std::log(stats.n_concept_posdist(l, k) + h.gamma / h.K) - std::log(t_l + h.gamma) +
         std::log(t_l + h.alpha / h.L) - std::log(stats.total + h.alpha);
}

ProposalTable joint_proposal_table(const Vec2& x, const BagOfWords* words,
                                   const SufficientStats& stats, const Hyperparameters& h) {
  return PredictiveModel(stats, h).table(x, words, stats, h);
}

ModelParams expected_params(const SufficientStats& stats, const Hyperparameters& h) {
  const int L = stats.num_concepts(), K = stats.num_posdists(), G = stats.vocab_size;
  ModelParams p;
  p.pi = (stats.n_concept.cast<double>().array() + h.alpha / L) / (stats.total + h.alpha);
  p.phi.resize(L, K);
  p.W.resize(L, G);
  for (int l = 0; l < L; ++l) {
    p.phi.row(l) = (stats.n_concept_posdist.row(l).cast<double>().array() + h.gamma / K) /
                   (stats.n_concept(l) + h.gamma);
    if (G > 0)
      p.W.row(l) = (stats.n_word.row(l).cast<double>().array() + h.beta) /
                   (stats.n_word_total(l) + G * h.beta);
  }
  p.mu.resize(K);
  p.Sigma.resize(K);
  for (int k = 0; k < K; ++k) {
    const auto post = niw_posterior(k, stats, h);
    const double denom = post.nu - kDim - 1;
    if (!(denom > 0))
      throw NumericalError("inverse-Wishart mean undefined for nu <= d + 1");
    p.mu[k] = post.m;
    p.Sigma[k] = post.V / denom;
  }
  return p;
}

double log_gaussian_density(const Vec2& x, const Vec2& mu, const Mat2& Sigma) {
  Eigen::LLT<Mat2> llt(Sigma);
  if (llt.info() != Eigen::Success) {
    llt.compute(Sigma + Mat2::Identity() * 1e-9);
    if (llt.info() != Eigen::Success) throw NumericalError("covariance is not positive-definite");
  }
  const Mat2 Lm = llt.matrixL();
  const double half_logdet = std::log(Lm(0, 0)) + std::log(Lm(1, 1));
  const Vec2 z = llt.matrixL().solve(x - mu);
  return -std::log(2 * std::numbers::pi) - half_logdet - 0.5 * z.squaredNorm();
}

double log_sum_exp(const Eigen::Ref<const Eigen::ArrayXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v - m).exp().sum());
}

PredictiveModel::PredictiveModel(const SufficientStats& stats, const Hyperparameters& h) {
  const int K = stats.num_posdists();
  predictive_.reserve(K);
  for (int k = 0; k < K; ++k) predictive_.push_back(posterior_predictive(niw_posterior(k, stats, h)));
  update_vocabulary(stats, h);
  refresh_prior(stats, h);
}

void PredictiveModel::update_after_add(const SufficientStats& stats, const Hyperparameters& h,
                                       Assignment touched) {
  predictive_[touched.posdist] = posterior_predictive(niw_posterior(touched.posdist, stats, h));
  log_word_denominator_(touched.concept_index) =
      std::log(stats.n_word_total(touched.concept_index) + stats.vocab_size * h.beta);
  refresh_prior(stats, h);
}

void PredictiveModel::update_vocabulary(const SufficientStats& stats, const Hyperparameters& h) {
  log_word_denominator_ =
      (stats.n_word_total.cast<double>().array() + stats.vocab_size * h.beta).log();
}

void PredictiveModel::refresh_prior(const SufficientStats& stats, const Hyperparameters& h) {
  const int L = stats.num_concepts(), K = stats.num_posdists();
  log_prior_.resize(L, K);
  const double log_total = std::log(stats.total + h.alpha);
  for (int l = 0; l < L; ++l) {
    const double t_l = stats.n_concept(l);
    const double row = std::log(t_l + h.alpha / L) - log_total - std::log(t_l + h.gamma);
    for (int k = 0; k < K; ++k)
      log_prior_(l, k) = std::log(stats.n_concept_posdist(l, k) + h.gamma / K) + row;
  }
}

double PredictiveModel::log_word(const BagOfWords& words, int l, const SufficientStats& stats,
                                 const Hyperparameters& h) const {
  double lp = 0.0;
  for (const auto& e : words.entries())
    lp += e.count * (std::log(stats.n_word(l, e.word) + h.beta) - log_word_denominator_(l));
  return lp;
}

Eigen::MatrixXd PredictiveModel::log_word_table(const SufficientStats& stats,
                                                const Hyperparameters& h) const {
  Eigen::MatrixXd t = (stats.n_word.cast<double>().array() + h.beta).log().matrix();
  t.colwise() -= log_word_denominator_;
  return t;
}

ProposalTable PredictiveModel::table(const Vec2& x, const BagOfWords* words,
                                     const SufficientStats& stats,
                                     const Hyperparameters& h) const {
  if (words) check_words(*words, stats);
  const int L = stats.num_concepts(), K = stats.num_posdists();
  ProposalTable t;
  t.log_entries = log_prior_;
  for (int k = 0; k < K; ++k) t.log_entries.col(k).array() += log_position(x, k);
  if (words && !words->empty())
    for (int l = 0; l < L; ++l) t.log_entries.row(l).array() += log_word(*words, l, stats, h);
  t.log_total = log_sum_exp(t.log_entries.reshaped().array());
  return t;
}

}  // namespace spco
