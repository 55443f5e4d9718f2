#pragma once

#include <initializer_list>

#include "spco/hyperparameters.hpp"
#include "spco/observation.hpp"
#include "spco/particle_filter.hpp"

namespace testing {

inline spco::Hyperparameters tiny(int L = 2, int K = 2, int R = 1) {
  spco::Hyperparameters h;
  h.L = L;
  h.K = K;
  h.R = R;
  return h;
}

inline spco::Observation obs(double x, double y, std::initializer_list<int> words) {
  spco::Observation o;
  o.position = spco::Vec2(x, y);
  for (int w : words) o.words.add(w);
  return o;
}

// A particle that has absorbed the given data with the given assignments.
inline spco::Particle trained(const spco::Hyperparameters& h, int G,
                              std::initializer_list<std::pair<spco::Observation, spco::Assignment>> data) {
  spco::Particle p(h.L, h.K, G, h);
  for (const auto& [o, a] : data) p.absorb(o, a, h);
  p.refresh_params(h);
  return p;
}

}  // namespace testing
