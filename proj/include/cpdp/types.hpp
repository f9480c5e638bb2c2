#pragma once

#include <Eigen/Core>

namespace cpdp {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// One row per instance, one column per metric.
using FeatureMatrix = RowMatrix<double>;
using FeatureVector = Vector<double>;

}  // namespace cpdp
