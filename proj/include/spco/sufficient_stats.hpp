#pragma once

#include <span>
#include <vector>

#include "spco/observation.hpp"
#include "spco/types.hpp"

namespace spco {

/// Latent labels of one observation: concept C_n and position distribution i_n
/// (zero-based).
struct Assignment {
  int concept_index = 0;
  int posdist = 0;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Counts and running sums that make every predictive closed-form.
struct SufficientStats {
  SufficientStats() = default;
  SufficientStats(int L, int K, int G);

  CountVector n_concept;          // t^(l)
  CountMatrix n_concept_posdist;  // t^(l,k), L x K
  CountMatrix n_word;             // t^(l,g), L x G
  CountVector n_word_total;       // sum_g t^(l,g)
  CountVector n_posdist;          // t^(k)
  Eigen::Matrix<double, 2, Eigen::Dynamic> sum_x;  // 2 x K
  std::vector<Mat2> sum_xxT;                      // K entries
  int total = 0;
  int vocab_size = 0;

  int num_concepts() const { return static_cast<int>(n_concept.size()); }
  int num_posdists() const { return static_cast<int>(n_posdist.size()); }

  void add(const Observation& obs, Assignment a);

  // Zero-extends the word table to G columns; G never shrinks.
  void extend_vocabulary(int G);

  // True when all count identities and symmetry constraints hold.
  bool consistent() const;

  static SufficientStats recount(std::span<const Assignment> assignments,
                                 std::span<const Observation> observations, int L,
                                 int K, int G);
};

// Exact equality of integer tables, float sums within rel_tol.
bool equivalent(const SufficientStats& a, const SufficientStats& b, double rel_tol = 1e-9);

}  // namespace spco
