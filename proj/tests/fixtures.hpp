#pragma once

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spco/particle_filter.hpp"

namespace fixture {

using spco::Assignment;
using spco::Hyperparameters;
using spco::Observation;
using spco::Vec2;

inline Observation at(double x, double y, int word) {
  Observation o;
  o.position = Vec2(x, y);
  o.words.add(word);
  return o;
}

inline Hyperparameters tiny_model(int R) {
  Hyperparameters h;
  h.L = 2;
  h.K = 2;
  h.R = R;
  h.J = 10;
  return h;
}

// Three observations, two words: two close together, one far away with the
// other word.
inline std::vector<Observation> tiny_data() {
  return {at(0.0, 0.0, 0), at(0.6, 0.2, 0), at(2.5, 1.5, 1)};
}

// Two particles that disagree about whether the two data points share a
// concept and position distribution.
inline spco::ParticleSet two_particles(const Hyperparameters& h) {
  const std::vector<Observation> data = {at(0.0, 0.0, 0), at(3.0, 0.0, 1)};
  const std::vector<std::vector<Assignment>> z = {{{0, 0}, {0, 0}}, {{0, 0}, {1, 1}}};
  spco::ParticleSet set(h, 2, 1);
  for (int r = 0; r < set.size(); ++r) {
    for (std::size_t n = 0; n < data.size(); ++n)
      set.particles[r].absorb(data[n], z[r % 2][n], h);
    set.particles[r].refresh_params(h);
  }
  set.observations = data;
  set.step = static_cast<int>(data.size());
  return set;
}

// Expected IG over pseudo-words computed by summing over the whole vocabulary.
inline double exhaustive_ig(const spco::ParticleSet& set, const Vec2& x, const Hyperparameters& h,
                            int G) {
  const int R = set.size();
  std::vector<std::vector<double>> joint(R, std::vector<double>(G, 0.0));
  for (int r = 0; r < R; ++r) {
    const auto z = set.particles[r].history.to_vector();
    for (int g = 0; g < G; ++g) {
      const Observation q = at(x.x(), x.y(), g);
      for (int l = 0; l < h.L; ++l)
        for (int k = 0; k < h.K; ++k)
          joint[r][g] += oracle::joint_entry(q, l, k, set.observations, z, G, h);
    }
  }
  double ig = 0;
  for (int r = 0; r < R; ++r) {
    double norm = 0;
    for (int g = 0; g < G; ++g) norm += joint[r][g];
    for (int g = 0; g < G; ++g) {
      double mix = 0;
      for (int s = 0; s < R; ++s) mix += joint[s][g];
      mix /= R;
      ig += joint[r][g] / norm * std::log(joint[r][g] / mix);
    }
  }
  return ig / R;
}

}  // namespace fixture
