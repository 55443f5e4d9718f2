#pragma once

// Reference implementations written directly from the textbook formulas,
// sharing no code with the library.

#include <cmath>
#include <map>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spco/grid.hpp"
#include "spco/hyperparameters.hpp"
#include "spco/observation.hpp"
#include "spco/sufficient_stats.hpp"

namespace oracle {

using spco::Assignment;
using spco::Hyperparameters;
using spco::Mat2;
using spco::Observation;
using spco::Vec2;

struct Niw {
  Vec2 m;
  double kappa, nu;
  Mat2 V;
};

// Mean/scatter form of the conjugate update.
inline Niw niw(const std::vector<Vec2>& xs, const Hyperparameters& h) {
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return {h.m0, h.kappa0, h.nu0, h.V0};
  Vec2 mean = Vec2::Zero();
  for (const auto& x : xs) mean += x;
  mean /= n;
  Mat2 scatter = Mat2::Zero();
  for (const auto& x : xs) scatter += (x - mean) * (x - mean).transpose();
  const Vec2 dm = mean - h.m0;
  Niw p;
  p.kappa = h.kappa0 + n;
  p.nu = h.nu0 + n;
  p.m = (h.kappa0 * h.m0 + n * mean) / p.kappa;
  p.V = h.V0 + scatter + (h.kappa0 * n / p.kappa) * dm * dm.transpose();
  return p;
}

inline double student_t(const Vec2& x, const Niw& p) {
  const double dof = p.nu - 2 + 1;
  const Mat2 S = p.V * (p.kappa + 1) / (p.kappa * dof);
  const Vec2 z = x - p.m;
  const double maha = z.dot(S.inverse() * z);
  return std::exp(std::lgamma((dof + 2) / 2) - std::lgamma(dof / 2)) /
         (dof * std::numbers::pi * std::sqrt(S.determinant())) *
         std::pow(1 + maha / dof, -(dof + 2) / 2);
}

inline double gaussian(const Vec2& x, const Vec2& mu, const Mat2& Sigma) {
  const Vec2 z = x - mu;
  return std::exp(-0.5 * z.dot(Sigma.inverse() * z)) /
         (2 * std::numbers::pi * std::sqrt(Sigma.determinant()));
}

// p(x_n, S_n, C_n=l, i_n=k | earlier data and assignments).
inline double joint_entry(const Observation& obs, int l, int k, std::span<const Observation> past,
                          std::span<const Assignment> z, int G, const Hyperparameters& h) {
  const int L = h.L, K = h.K;
  double t = static_cast<double>(past.size()), tl = 0, tlk = 0, tl_words = 0;
  std::vector<double> tlg(G, 0.0);
  std::vector<Vec2> xs;
  for (std::size_t n = 0; n < past.size(); ++n) {
    if (z[n].concept_index == l) {
      ++tl;
      if (z[n].posdist == k) ++tlk;
      for (const auto& e : past[n].words.entries()) {
        tlg[e.word] += e.count;
        tl_words += e.count;
      }
    }
    if (z[n].posdist == k) xs.push_back(past[n].position);
  }
  const double prior = (tlk + h.gamma / K) / (tl + h.gamma) * (tl + h.alpha / L) / (t + h.alpha);
  double word = 1.0;
  for (const auto& e : obs.words.entries())
    word *= std::pow((tlg[e.word] + h.beta) / (tl_words + G * h.beta), e.count);
  return prior * word * student_t(obs.position, niw(xs, h));
}

// Exact posterior marginals p(z_n = (l, k) | all data) by enumerating every
// assignment sequence.
inline std::vector<Eigen::MatrixXd> enumerate_marginals(const std::vector<Observation>& obs,
                                                        int G, const Hyperparameters& h,
                                                        double* evidence = nullptr) {
  const int N = static_cast<int>(obs.size()), LK = h.L * h.K;
  std::vector<Eigen::MatrixXd> out(N, Eigen::MatrixXd::Zero(h.L, h.K));
  long long total = 1;
  for (int n = 0; n < N; ++n) total *= LK;
  double Z = 0;
  std::vector<Assignment> z(N);
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (int n = 0; n < N; ++n) {
      const int idx = static_cast<int>(c % LK);
      c /= LK;
      z[n] = {idx / h.K, idx % h.K};
    }
    double p = 1.0;
    for (int n = 0; n < N; ++n)
      p *= joint_entry(obs[n], z[n].concept_index, z[n].posdist,
                       std::span(obs).first(n), std::span<const Assignment>(z).first(n), G, h);
    Z += p;
    for (int n = 0; n < N; ++n) out[n](z[n].concept_index, z[n].posdist) += p;
  }
  for (auto& m : out) m /= Z;
  if (evidence) *evidence = Z;
  return out;
}

// Pair-counting definition of the adjusted Rand index.
inline double ari_pairs(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  double both = 0, only_a = 0, only_b = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      both += sa && sb;
      only_a += sa;
      only_b += sb;
      ++pairs;
    }
  const double expected = only_a * only_b / pairs;
  const double max_index = 0.5 * (only_a + only_b);
  if (max_index == expected) return 1.0;
  return (both - expected) / (max_index - expected);
}

inline std::optional<int> dijkstra(const spco::OccupancyGrid& g, spco::CellIndex s,
                                   spco::CellIndex t) {
  if (!g.is_free(s) || !g.is_free(t)) return std::nullopt;
  std::vector<int> dist(g.cells().size(), std::numeric_limits<int>::max());
  using Item = std::pair<int, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  dist[g.index(s)] = 0;
  q.push({0, g.index(s)});
  const int dc[4] = {1, -1, 0, 0}, dr[4] = {0, 0, 1, -1};
  while (!q.empty()) {
    auto [d, i] = q.top();
    q.pop();
    if (d > dist[i]) continue;
    const spco::CellIndex c = g.cell_at(i);
    if (c == t) return d;
    for (int m = 0; m < 4; ++m) {
      const spco::CellIndex nb{c.col + dc[m], c.row + dr[m]};
      if (!g.is_free(nb)) continue;
      const std::size_t j = g.index(nb);
      if (d + 1 < dist[j]) {
        dist[j] = d + 1;
        q.push({d + 1, j});
      }
    }
  }
  return std::nullopt;
}

// Brute-force candidate rule: every lattice point anchored at the origin whose
// cell is free and with no blocked or off-map cell centre within the clearance.
inline std::vector<Vec2> sweep_candidates(const spco::OccupancyGrid& g, double spacing,
                                          double clearance) {
  std::vector<Vec2> out;
  const double res = g.resolution();
  const double w = g.width() * res, hgt = g.height() * res;
  const int cols = static_cast<int>(std::floor(w / spacing + 1e-9));
  const int rows = static_cast<int>(std::floor(hgt / spacing + 1e-9));
  for (int j = 0; j <= rows; ++j)
    for (int i = 0; i <= cols; ++i) {
      const Vec2 p = g.origin() + Vec2(i * spacing, j * spacing);
      const int pc = static_cast<int>(std::floor((p.x() - g.origin().x()) / res + 1e-9));
      const int pr = static_cast<int>(std::floor((p.y() - g.origin().y()) / res + 1e-9));
      if (!g.is_free({pc, pr})) continue;
      bool ok = true;
      for (int r = -1; r <= g.height() && ok; ++r)
        for (int c = -1; c <= g.width() && ok; ++c) {
          const Vec2 centre = g.origin() + Vec2((c + 0.5) * res, (r + 0.5) * res);
          if ((centre - p).norm() <= clearance && !g.is_free({c, r})) ok = false;
        }
      if (ok) out.push_back(p);
    }
  return out;
}

// Bartlett draw from Wishart(S, nu), d = 2.
inline Mat2 wishart_draw(const Mat2& S, double nu, std::mt19937_64& eng) {
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> c1(nu), c2(nu - 1);
  Mat2 A = Mat2::Zero();
  A(0, 0) = std::sqrt(c1(eng));
  A(1, 1) = std::sqrt(c2(eng));
  A(1, 0) = normal(eng);
  const Mat2 Lc = S.llt().matrixL();
  const Mat2 LA = Lc * A;
  return LA * LA.transpose();
}

inline double log_multigamma2(double a) {
  return 0.5 * std::log(std::numbers::pi) + std::lgamma(a) + std::lgamma(a - 0.5);
}

inline double wishart_log_pdf(const Mat2& X, const Mat2& S, double nu) {
  return 0.5 * (nu - 3) * std::log(X.determinant()) - 0.5 * (S.inverse() * X).trace() -
         nu * std::log(2.0) - 0.5 * nu * std::log(S.determinant()) - log_multigamma2(nu / 2);
}

inline double inverse_wishart_log_pdf(const Mat2& X, const Mat2& V, double nu) {
  return 0.5 * nu * std::log(V.determinant()) - nu * std::log(2.0) - log_multigamma2(nu / 2) -
         0.5 * (nu + 3) * std::log(X.determinant()) - 0.5 * (V * X.inverse()).trace();
}

}  // namespace oracle
