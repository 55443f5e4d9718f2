#include "spco/sufficient_stats.hpp"

#include <cmath>

namespace spco {

SufficientStats::SufficientStats(int L, int K, int G)
    : n_concept(CountVector::Zero(L)),
      n_concept_posdist(CountMatrix::Zero(L, K)),
      n_word(CountMatrix::Zero(L, G)),
      n_word_total(CountVector::Zero(L)),
      n_posdist(CountVector::Zero(K)),
      sum_x(Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, K)),
      sum_xxT(static_cast<std::size_t>(K), Mat2::Zero()),
      vocab_size(G) {}

void SufficientStats::add(const Observation& obs, Assignment a) {
  const int l = a.concept_index, k = a.posdist;
  if (l < 0 || l >= num_concepts() || k < 0 || k >= num_posdists())
    throw DimensionError("assignment out of range");
  if (obs.words.max_word() >= vocab_size)
    throw DimensionError("observation word index exceeds vocabulary size");
  n_concept(l) += 1;
  n_concept_posdist(l, k) += 1;
  n_posdist(k) += 1;
  for (const auto& e : obs.words.entries()) n_word(l, e.word) += e.count;
  n_word_total(l) += obs.words.total();
  sum_x.col(k) += obs.position;
  sum_xxT[k] += obs.position * obs.position.transpose();
  total += 1;
}

void SufficientStats::extend_vocabulary(int G) {
  if (G < vocab_size) throw DimensionError("vocabulary cannot shrink");
  if (G == vocab_size) return;
  n_word.conservativeResize(Eigen::NoChange, G);
  n_word.rightCols(G - vocab_size).setZero();
  vocab_size = G;
}

bool SufficientStats::consistent() const {
  if (n_concept.minCoeff() < 0 || n_concept_posdist.minCoeff() < 0 ||
      n_posdist.minCoeff() < 0 || (n_word.size() > 0 && n_word.minCoeff() < 0))
    return false;
  if (n_concept.sum() != total) return false;
  if (n_concept_posdist.rowwise().sum() != n_concept) return false;
  if (n_concept_posdist.colwise().sum().transpose() != n_posdist) return false;
  if (n_word.cols() != vocab_size) return false;
  if (n_word.rowwise().sum() != n_word_total) return false;
  for (const auto& s : sum_xxT)
    if (s != s.transpose()) return false;
  return true;
}

SufficientStats SufficientStats::recount(std::span<const Assignment> assignments,
                                         std::span<const Observation> observations,
                                         int L, int K, int G) {
  if (assignments.size() != observations.size())
    throw DimensionError("assignment and observation counts differ");
  SufficientStats s(L, K, G);
  for (std::size_t n = 0; n < assignments.size(); ++n) s.add(observations[n], assignments[n]);
  return s;
}

bool equivalent(const SufficientStats& a, const SufficientStats& b, double rel_tol) {
  if (a.total != b.total || a.vocab_size != b.vocab_size) return false;
  if (a.n_concept != b.n_concept || a.n_concept_posdist != b.n_concept_posdist ||
      a.n_word != b.n_word || a.n_word_total != b.n_word_total || a.n_posdist != b.n_posdist)
    return false;
  auto close = [rel_tol](double x, double y) {
    return std::abs(x - y) <= rel_tol * std::max({1.0, std::abs(x), std::abs(y)});
  };
  for (int k = 0; k < a.num_posdists(); ++k) {
    for (int i = 0; i < 2; ++i) {
      if (!close(a.sum_x(i, k), b.sum_x(i, k))) return false;
      for (int j = 0; j < 2; ++j)
        if (!close(a.sum_xxT[k](i, j), b.sum_xxT[k](i, j))) return false;
    }
  }
  return true;
}

}  // namespace spco
