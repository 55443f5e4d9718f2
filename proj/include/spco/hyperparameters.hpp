#pragma once

#include <Eigen/Eigenvalues>

#include "spco/types.hpp"

namespace spco {

/// Prior hyperparameters, truncation levels and exploration knobs.
struct Hyperparameters {
  double alpha = 1.0;   // concentration over concepts
  double beta = 0.01;   // word pseudo-count
  double gamma = 0.1;   // concentration over position distributions
  Vec2 m0 = Vec2::Zero();
  double kappa0 = 0.001;
  Mat2 V0 = Mat2::Identity() * 1.5;
  double nu0 = 4.0;
  int L = 10;  // max concepts
  int K = 10;  // max position distributions
  int R = 1000;
  int J = 10;
  double eta = 0.005;  // travel-cost weight per grid cell

  void validate() const {
    auto fail = [](const char* what) { throw ConfigError(what); };
    if (!(alpha > 0)) fail("alpha must be > 0");
    if (!(beta > 0)) fail("beta must be > 0");
    if (!(gamma > 0)) fail("gamma must be > 0");
    if (!(kappa0 > 0)) fail("kappa0 must be > 0");
    if (!(nu0 > kDim - 1)) fail("nu0 must exceed d - 1");
    if (!m0.allFinite()) fail("m0 must be finite");
    if (!V0.allFinite() || (V0 - V0.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      fail("V0 must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat2> eig(V0, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0)) fail("V0 must be positive-definite");
    if (L < 1 || K < 1 || R < 1 || J < 1) fail("L, K, R, J must be >= 1");
    if (!(eta >= 0)) fail("eta must be >= 0");
  }

  // Simulated-home setting with single-word answers.
  static Hyperparameters experiment1() { return {}; }

  // Real-room setting with multiword sentences.
  static Hyperparameters experiment2() {
    Hyperparameters h;
    h.beta = 0.1;
    h.gamma = 0.01;
    h.V0 = Mat2::Identity() * 1.0;
    h.nu0 = 5.0;
    return h;
  }
};

}  // namespace spco
