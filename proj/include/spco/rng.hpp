#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace spco {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives an independent substream seed from a base seed and a tuple of
// coordinates (stream tag, step, particle/candidate index, ...).
inline std::uint64_t mix_seed(std::uint64_t base,
                              std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  return h;
}

enum class Stream : std::uint64_t {
  learn = 1,
  resample = 2,
  information_gain = 3,
  policy = 4,
  teacher = 5,
  entropy = 6,
};

inline std::uint64_t stream_seed(std::uint64_t base, Stream s, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return mix_seed(base, {static_cast<std::uint64_t>(s), a, b});
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, n).
  int below(int n) {
    int i = static_cast<int>(uniform() * n);
    return i < n ? i : n - 1;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Inverse-CDF draw from nonnegative (not necessarily normalized) weights:
// returns the first index i with u * total < cdf[i].
inline int sample_categorical(std::span<const double> weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = u * total;
  double cdf = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cdf += weights[i];
    if (weights[i] > 0.0) last_positive = static_cast<int>(i);
    if (target < cdf) return static_cast<int>(i);
  }
  return last_positive;
}

// Same draw against a precomputed cumulative table (binary search).
inline int sample_from_cdf(std::span<const double> cdf, double u) {
  const double target = u * cdf.back();
  std::size_t lo = 0, hi = cdf.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (target < cdf[mid])
      hi = mid;
    else
      lo = mid + 1;
  }
  return static_cast<int>(lo);
}

}  // namespace spco
