// Copyright 2026 The grouprec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GROUPREC_FEATURES_HPP_
#define GROUPREC_FEATURES_HPP_

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace grouprec {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense non-negative latent factors, one row per user (or item).
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  // Throws std::invalid_argument if any value is negative or non-finite.
  explicit FeatureMatrix(RowMajorMatrix values) : values_(std::move(values)) {
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
      for (Eigen::Index c = 0; c < values_.cols(); ++c) {
        const double v = values_(r, c);
        if (!std::isfinite(v) || v < 0.0) {
          throw std::invalid_argument("feature values must be finite and non-negative");
        }
      }
    }
  }

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(values_.cols()); }

  auto row(std::size_t r) const { return values_.row(static_cast<Eigen::Index>(r)); }
  const RowMajorMatrix& values() const { return values_; }

 private:
  RowMajorMatrix values_;
};

}  // namespace grouprec

#endif  // GROUPREC_FEATURES_HPP_
