#include <doctest.h>

#include <numbers>
#include <random>

#include "../fixtures.hpp"
#include "helpers.hpp"
#include "spco/entropy.hpp"
#include "spco/spatial_model.hpp"

using namespace spco;
using testing::obs;

TEST_SUITE("entropy") {

TEST_CASE("dirichlet entropy of flat distributions") {
  CHECK(dirichlet_entropy(Eigen::Vector2d(1, 1)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dirichlet_entropy(Eigen::Vector3d(1, 1, 1)) ==
        doctest::Approx(-std::numbers::ln2).epsilon(1e-12));
  // Beta(2, 2): ln B(2,2) - 2 psi(2) + 3 psi(4)
  const double psi2 = 1 - std::numbers::egamma, psi4 = psi2 + 0.5 + 1.0 / 3;
  CHECK(dirichlet_entropy(Eigen::Vector2d(2, 2)) ==
        doctest::Approx(std::log(1.0 / 6) - 2 * psi2 + 2 * psi4).epsilon(1e-12));
}

TEST_CASE("wishart and inverse-wishart entropy against sampled log densities") {
  Mat2 S;
  S << 0.8, 0.2, 0.2, 0.5;
  const double nu = 5.5;
  std::mt19937_64 eng(11);
  const int n = 200000;
  double w = 0, iw = 0, logdet = 0;
  const Mat2 V = S.inverse();
  for (int i = 0; i < n; ++i) {
    const Mat2 X = oracle::wishart_draw(S, nu, eng);
    w -= oracle::wishart_log_pdf(X, S, nu);
    iw -= oracle::inverse_wishart_log_pdf(X.inverse(), V, nu);
    logdet += std::log(X.determinant());
  }
  CHECK(wishart_entropy(S, nu) == doctest::Approx(w / n).epsilon(0.01));
  CHECK(inverse_wishart_entropy(V, nu) == doctest::Approx(iw / n).epsilon(0.01));
  CHECK(wishart_expected_log_det(S, nu) == doctest::Approx(logdet / n).epsilon(0.01));
}

TEST_CASE("normal-inverse-wishart entropy against sampled log densities") {
  NIWPosterior<double> p{Vec2(1.0, -0.5), 3.0, 6.0, Mat2::Identity() * 0.4};
  p.V(0, 1) = p.V(1, 0) = 0.1;
  std::mt19937_64 eng(5);
  std::normal_distribution<double> normal;
  const int n = 200000;
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    const Mat2 Sigma = oracle::wishart_draw(p.V.inverse(), p.nu, eng).inverse();
    const Mat2 C = (Sigma / p.kappa).llt().matrixL();
    const Vec2 mu = p.m + C * Vec2(normal(eng), normal(eng));
    acc -= oracle::inverse_wishart_log_pdf(Sigma, p.V, p.nu) +
           std::log(oracle::gaussian(mu, p.m, Sigma / p.kappa));
  }
  CHECK(niw_entropy(p) == doctest::Approx(acc / n).epsilon(0.01));
}

TEST_CASE("parameter entropy sums the conjugate pieces") {
  const auto h = testing::tiny(2, 2);
  const auto a = obs(0, 0, {0}), b = obs(1, 0.5, {1, 1}), c = obs(3, 3, {2});
  const Particle p = testing::trained(h, 3, {{a, {0, 0}}, {b, {0, 0}}, {c, {1, 1}}});
  double expected = dirichlet_entropy(Eigen::Vector2d(2 + h.alpha / 2, 1 + h.alpha / 2));
  expected += dirichlet_entropy(Eigen::Vector2d(2 + h.gamma / 2, h.gamma / 2));
  expected += dirichlet_entropy(Eigen::Vector2d(h.gamma / 2, 1 + h.gamma / 2));
  expected += dirichlet_entropy(Eigen::Vector3d(1 + h.beta, 2 + h.beta, h.beta));
  expected += dirichlet_entropy(Eigen::Vector3d(h.beta, h.beta, 1 + h.beta));
  for (const auto& pts : {std::vector<Vec2>{a.position, b.position}, std::vector<Vec2>{c.position}}) {
    const auto o = oracle::niw(pts, h);
    expected += niw_entropy({o.m, o.kappa, o.nu, o.V});
  }
  CHECK(parameter_entropy(p.stats, h) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("partition hash ignores label names") {
  const std::vector<Assignment> a = {{0, 1}, {0, 1}, {2, 0}};
  const std::vector<Assignment> b = {{1, 0}, {1, 0}, {0, 1}};
  const std::vector<Assignment> c = {{1, 0}, {1, 1}, {0, 1}};
  CHECK(canonical_partition_hash(a) == canonical_partition_hash(b));
  CHECK(canonical_partition_hash(a) != canonical_partition_hash(c));
  CHECK(canonical_partition_hash(std::vector<Assignment>{}) == 0);

  const std::vector<std::uint64_t> keys = {7, 7, 9};
  const std::vector<double> w = {0.25, 0.25, 0.5};
  CHECK(partition_entropy(keys, w) == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
}

TEST_CASE("single particle matches the exact expectation") {
  // One hypothesis: the partition term vanishes and the score is the
  // parameter entropy averaged over pseudo-words and the new assignment.
  for (int LK : {1, 2}) {
    auto h = testing::tiny(LK, LK, 1);
    const int G = 3;
    const std::vector<Observation> data = {obs(0, 0, {0}), obs(1, 1, {2})};
    ParticleSet set(h, G, 1);
    for (const auto& o : data) set = online_update(std::move(set), o, h);
    const Vec2 x(0.5, 0.2);
    const auto z = set.particles[0].history.to_vector();
    double norm = 0, exact = 0;
    for (int g = 0; g < G; ++g)
      for (int l = 0; l < LK; ++l)
        for (int k = 0; k < LK; ++k) {
          const auto q = obs(x.x(), x.y(), {g});
          const double p = oracle::joint_entry(q, l, k, data, z, G, h);
          Particle after = set.particles[0];
          after.absorb(q, {l, k}, h);
          norm += p;
          exact += p * parameter_entropy(after.stats, h);
        }
    Rng rng(3);
    CHECK(entropy_score(set, x, 40000, h, rng) == doctest::Approx(exact / norm).epsilon(0.01));
  }
}

TEST_CASE("scores do not depend on thread count") {
  auto h = fixture::tiny_model(30);
  ParticleSet set(h, 2, 4);
  for (const auto& o : fixture::tiny_data()) set = online_update(std::move(set), o, h);
  const std::vector<Vec2> xs = {Vec2(0, 0), Vec2(1, 1), Vec2(2.5, 1.5), Vec2(-1, 2)};
  CHECK(score_entropy(set, xs, h, 9, 3, 1) == score_entropy(set, xs, h, 9, 3, 3));
}

}  // TEST_SUITE
