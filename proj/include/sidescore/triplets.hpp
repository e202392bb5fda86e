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

#ifndef SIDESCORE_TRIPLETS_HPP_
#define SIDESCORE_TRIPLETS_HPP_

// Triplet mining. All samplers draw uniformly over eligible (anchor,
// positive, negative) combinations without replacement; when fewer distinct
// combinations exist than requested, every eligible triplet is returned and
// the shortfall is reported.

#include <cstdint>
#include <span>
#include <vector>

#include "sidescore/triplet.hpp"
#include "sidescore/types.hpp"

namespace sidescore {

struct MiningResult {
  std::vector<Triplet> triplets;
  std::size_t requested = 0;
  std::size_t shortfall = 0;
};

/// Anchor and positive share a class, the negative does not. Classes with a
/// single member never provide anchors. Throws if fewer than two classes are
/// present.
MiningResult mine_by_class(std::span<const int> classes, std::size_t n_triplets, std::uint64_t seed);

/// Bins continuous side values into n_bins empirical-quantile bins (ties at
/// an edge go to the lower bin), then mines by bin id.
MiningResult mine_by_quantile(std::span<const double> side_values, int n_bins, std::size_t n_triplets,
                              std::uint64_t seed);

enum class AugmentKind { image_shift_rotate, tabular_jitter };

struct Augmentation {
  AugmentKind kind = AugmentKind::tabular_jitter;
  /// Global multiplier; 0 makes every view an exact copy.
  double strength = 1.0;
  // image_shift_rotate
  double max_shift_px = 2.0;
  double max_rotation_deg = 10.0;
  Index image_side = 28;
  // tabular_jitter: noise sd = strength * jitter_fraction * feature_std
  double jitter_fraction = 0.1;
  VectorXd feature_std;
};

struct SelfSupervisedBatch {
  MiningResult mining;
  /// One augmented view per triplet. The positive of triplet t is row
  /// batch_size + t of the stacked matrix [batch; views].
  MatrixXd views;
};

/// Positive = augmented copy of the anchor, negative = a different instance.
SelfSupervisedBatch mine_self_supervised(const MatrixXd& batch, const Augmentation& augment,
                                         std::size_t n_triplets, std::uint64_t seed);

/// Applies the augmentation to one row.
VectorXd augment_row(const VectorXd& row, const Augmentation& augment, std::uint64_t seed);

/// Checks the class predicate on every triplet.
bool triplets_respect_classes(std::span<const Triplet> triplets, std::span<const int> classes);

}  // namespace sidescore

#endif  // SIDESCORE_TRIPLETS_HPP_
