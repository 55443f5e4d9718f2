#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace spco {

// Positions live on the floor plane.
inline constexpr int kDim = 2;

template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2T = Eigen::Matrix<Scalar, 2, 2>;

using Vec2 = Vec2T<double>;
using Mat2 = Mat2T<double>;

using CountVector = Eigen::VectorXi;
using CountMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A covariance or scale matrix lost positive-definiteness.
struct NumericalError : Error {
  using Error::Error;
};

// Vocabulary / table sizes disagree.
struct DimensionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

// A query position is not covered by any annotated region.
struct AnnotationGapError : Error {
  using Error::Error;
};

}  // namespace spco
