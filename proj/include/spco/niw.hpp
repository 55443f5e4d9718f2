#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "spco/types.hpp"

namespace spco {

/// Normal-inverse-Wishart parameters (m, kappa, nu, V) for one position
/// distribution, either the prior or the posterior given assigned points.
template <typename Scalar>
struct NIWPosterior {
  Vec2T<Scalar> m;
  Scalar kappa;
  Scalar nu;
  Mat2T<Scalar> V;
};

// Conjugate update from running sums over the assigned points.
template <typename Scalar>
NIWPosterior<Scalar> niw_update(const Vec2T<Scalar>& m0, Scalar kappa0, Scalar nu0,
                                const Mat2T<Scalar>& V0, Scalar count,
                                const Vec2T<Scalar>& sum_x,
                                const Mat2T<Scalar>& sum_xxT) {
  if (count == Scalar(0)) return {m0, kappa0, nu0, V0};
  NIWPosterior<Scalar> post;
  post.kappa = kappa0 + count;
  post.nu = nu0 + count;
  post.m = (sum_x + kappa0 * m0) / post.kappa;
  Mat2T<Scalar> V = V0 + sum_xxT + kappa0 * m0 * m0.transpose() -
                    post.kappa * post.m * post.m.transpose();
  post.V = Scalar(0.5) * (V + V.transpose());
  if (!post.V.allFinite() || !(post.V(0, 0) > 0) || !(post.V.determinant() > 0))
    throw NumericalError("NIW posterior scale matrix is not positive-definite");
  return post;
}

/// Multivariate Student-t in two dimensions, evaluated through a cached
/// Cholesky factor of the scale matrix.
template <typename Scalar>
class StudentT2 {
 public:
  StudentT2() = default;

  StudentT2(const Vec2T<Scalar>& mean, const Mat2T<Scalar>& scale, Scalar dof)
      : mean_(mean), dof_(dof) {
    llt_.compute(scale);
    if (llt_.info() != Eigen::Success) {
      // Degenerate scale: retry once with a tiny ridge.
      llt_.compute(scale + Mat2T<Scalar>::Identity() * Scalar(1e-9));
      if (llt_.info() != Eigen::Success)
        throw NumericalError("Student-t scale matrix is not positive-definite");
    }
    const Mat2T<Scalar> Lm = llt_.matrixL();
    const Scalar half_logdet = std::log(Lm(0, 0)) + std::log(Lm(1, 1));
    const Scalar d = Scalar(kDim);
    log_norm_ = std::lgamma((dof + d) / 2) - std::lgamma(dof / 2) -
                (d / 2) * std::log(dof * std::numbers::pi_v<Scalar>) - half_logdet;
  }

  Scalar log_density(const Vec2T<Scalar>& x) const {
    const Vec2T<Scalar> z = llt_.matrixL().solve(x - mean_);
    const Scalar maha = z.squaredNorm();
    return log_norm_ - (dof_ + Scalar(kDim)) / 2 * std::log1p(maha / dof_);
  }

  Scalar density(const Vec2T<Scalar>& x) const { return std::exp(log_density(x)); }

  const Vec2T<Scalar>& mean() const { return mean_; }
  Scalar dof() const { return dof_; }
  Mat2T<Scalar> scale() const { return llt_.reconstructedMatrix(); }

 private:
  Vec2T<Scalar> mean_ = Vec2T<Scalar>::Zero();
  Eigen::LLT<Mat2T<Scalar>> llt_;
  Scalar dof_ = Scalar(1);
  Scalar log_norm_ = Scalar(0);
};

// Posterior predictive of one more point under the NIW posterior:
// St(x | m, V (kappa + 1) / (kappa (nu - d + 1)), nu - d + 1).
template <typename Scalar>
StudentT2<Scalar> posterior_predictive(const NIWPosterior<Scalar>& p) {
  const Scalar dof = p.nu - Scalar(kDim) + 1;
  const Mat2T<Scalar> scale = p.V * ((p.kappa + 1) / (p.kappa * dof));
  return StudentT2<Scalar>(p.m, scale, dof);
}

}  // namespace spco
