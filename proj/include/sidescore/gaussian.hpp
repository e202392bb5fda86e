// Copyright 2026 The sidescore Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIDESCORE_GAUSSIAN_HPP_
#define SIDESCORE_GAUSSIAN_HPP_

#include <cmath>
#include <stdexcept>
#include <string>

#include "sidescore/types.hpp"

namespace sidescore {

/// Variances are clamped to this value before any inversion.
inline constexpr double kVarianceFloor = 1e-8;

/// Diagonal-covariance Gaussian N(mean, diag(var)). `var` holds variances,
/// not standard deviations.
template <typename Scalar>
struct GaussianDiag {
  Vector<Scalar> mean;
  Vector<Scalar> var;

  GaussianDiag() = default;
  GaussianDiag(Vector<Scalar> m, Vector<Scalar> v) : mean(std::move(m)), var(std::move(v)) {}

  static GaussianDiag standard(Index dim) {
    return {Vector<Scalar>::Zero(dim), Vector<Scalar>::Ones(dim)};
  }

  Index dim() const { return mean.size(); }

  /// Throws std::invalid_argument unless mean and var have the same length
  /// d >= 1, every mean is finite and every variance is finite and > 0.
  void validate() const {
    if (mean.size() < 1 || mean.size() != var.size()) {
      throw std::invalid_argument("GaussianDiag: mean/var length mismatch or empty");
    }
    if (!mean.allFinite()) throw std::invalid_argument("GaussianDiag: non-finite mean");
    for (Index i = 0; i < var.size(); ++i) {
      if (!(var[i] > Scalar(0)) || !std::isfinite(static_cast<double>(var[i]))) {
        throw std::invalid_argument("GaussianDiag: variance must be finite and > 0");
      }
    }
  }

  bool operator==(const GaussianDiag& o) const { return mean == o.mean && var == o.var; }
};

/// Skew parameter lambda of the weighted geometric mean, in [0, 1].
class SkewParam {
 public:
  constexpr SkewParam() = default;
  explicit SkewParam(double lambda) : lambda_(lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw std::invalid_argument("SkewParam: lambda must lie in [0, 1], got " +
                                  std::to_string(lambda));
    }
  }
  constexpr double value() const { return lambda_; }
  SkewParam complement() const { return SkewParam(1.0 - lambda_); }

 private:
  double lambda_ = 0.5;
};

/// A batch of diagonal Gaussians, one per row.
template <typename Scalar>
struct GaussianBatch {
  Matrix<Scalar> mean;
  Matrix<Scalar> var;

  Index size() const { return mean.rows(); }
  Index dim() const { return mean.cols(); }

  GaussianDiag<Scalar> row(Index i) const {
    return {mean.row(i).transpose(), var.row(i).transpose()};
  }
};

namespace detail {

template <typename Derived>
void check_same_dim(const Eigen::MatrixBase<Derived>& a, Index d, const char* what) {
  if (a.size() != d) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

template <typename Scalar>
Vector<Scalar> floored(const Vector<Scalar>& v) {
  return v.cwiseMax(Scalar(kVarianceFloor));
}

}  // namespace detail

}  // namespace sidescore

#endif  // SIDESCORE_GAUSSIAN_HPP_
