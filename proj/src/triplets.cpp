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

#include "sidescore/triplets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "sidescore/data.hpp"

namespace sidescore {

namespace {

using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t>;

}  // namespace

MiningResult mine_by_class(std::span<const int> classes, std::size_t n_triplets, std::uint64_t seed) {
  std::map<int, std::vector<std::int64_t>> members;
  for (std::size_t i = 0; i < classes.size(); ++i) members[classes[i]].push_back(static_cast<std::int64_t>(i));
  if (members.size() < 2) throw std::invalid_argument("mine_by_class: need at least two classes");

  const auto n = static_cast<double>(classes.size());
  // Anchor i accounts for (|c_i| - 1) * (N - |c_i|) combinations.
  std::vector<double> weights(classes.size());
  double total = 0.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto size = static_cast<double>(members[classes[i]].size());
    weights[i] = (size - 1.0) * (n - size);
    total += weights[i];
  }

  MiningResult out;
  out.requested = n_triplets;
  if (total <= 0.0 || n_triplets == 0) {
    out.shortfall = n_triplets;
    return out;
  }

  if (static_cast<double>(n_triplets) >= total) {
    for (std::size_t a = 0; a < classes.size(); ++a) {
      for (auto p : members[classes[a]]) {
        if (p == static_cast<std::int64_t>(a)) continue;
        for (std::size_t neg = 0; neg < classes.size(); ++neg) {
          if (classes[neg] == classes[a]) continue;
          out.triplets.push_back({static_cast<std::int64_t>(a), p, static_cast<std::int64_t>(neg)});
        }
      }
    }
    out.shortfall = n_triplets - out.triplets.size();
    return out;
  }

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick_anchor(weights.begin(), weights.end());
  std::set<Key> seen;
  while (out.triplets.size() < n_triplets) {
    const std::size_t a = pick_anchor(rng);
    const auto& same = members[classes[a]];
    const auto anchor_pos = static_cast<std::size_t>(
        std::find(same.begin(), same.end(), static_cast<std::int64_t>(a)) - same.begin());
    std::uniform_int_distribution<std::size_t> pick_pos(0, same.size() - 2);
    std::size_t pi = pick_pos(rng);
    if (pi >= anchor_pos) ++pi;
    const std::int64_t p = same[pi];
    std::uniform_int_distribution<std::size_t> pick_neg(0, classes.size() - same.size() - 1);
    std::size_t k = pick_neg(rng);
    std::int64_t neg = -1;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (classes[i] == classes[a]) continue;
      if (k == 0) {
        neg = static_cast<std::int64_t>(i);
        break;
      }
      --k;
    }
    const Key key{static_cast<std::int64_t>(a), p, neg};
    if (seen.insert(key).second) out.triplets.push_back({static_cast<std::int64_t>(a), p, neg});
  }
  return out;
}

MiningResult mine_by_quantile(std::span<const double> side_values, int n_bins, std::size_t n_triplets,
                              std::uint64_t seed) {
  const auto edges = quantile_bin_edges(side_values, n_bins);
  const auto bins = assign_quantile_bins(side_values, edges);
  return mine_by_class(bins, n_triplets, seed);
}

VectorXd augment_row(const VectorXd& row, const Augmentation& augment, std::uint64_t seed) {
  const Index side = augment.image_side;
  if (augment.kind == AugmentKind::image_shift_rotate && row.size() != side * side) {
    throw std::invalid_argument("augment_row: image size mismatch");
  }
  if (augment.strength == 0.0) return row;
  std::mt19937_64 rng(seed);
  if (augment.kind == AugmentKind::tabular_jitter) {
    if (augment.feature_std.size() != row.size()) {
      throw std::invalid_argument("augment_row: feature_std must match the feature count");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd out = row;
    for (Index j = 0; j < row.size(); ++j) {
      out[j] += augment.strength * augment.jitter_fraction * augment.feature_std[j] * normal(rng);
    }
    return out;
  }

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double shift_x = std::round(augment.strength * augment.max_shift_px * unit(rng));
  const double shift_y = std::round(augment.strength * augment.max_shift_px * unit(rng));
  const double angle = augment.strength * augment.max_rotation_deg * unit(rng) * std::numbers::pi / 180.0;
  const double c = std::cos(angle), s = std::sin(angle);
  const double center = 0.5 * static_cast<double>(side - 1);
  auto pixel = [&](Index y, Index x) -> double {
    if (y < 0 || x < 0 || y >= side || x >= side) return 0.0;
    return row[y * side + x];
  };
  VectorXd out(row.size());
  for (Index y = 0; y < side; ++y) {
    for (Index x = 0; x < side; ++x) {
      // Inverse map output pixel to the source image.
      const double dx = static_cast<double>(x) - center - shift_x;
      const double dy = static_cast<double>(y) - center - shift_y;
      const double sx = c * dx + s * dy + center;
      const double sy = -s * dx + c * dy + center;
      const auto x0 = static_cast<Index>(std::floor(sx));
      const auto y0 = static_cast<Index>(std::floor(sy));
      const double fx = sx - static_cast<double>(x0), fy = sy - static_cast<double>(y0);
      out[y * side + x] = (1 - fx) * (1 - fy) * pixel(y0, x0) + fx * (1 - fy) * pixel(y0, x0 + 1) +
                          (1 - fx) * fy * pixel(y0 + 1, x0) + fx * fy * pixel(y0 + 1, x0 + 1);
    }
  }
  return out;
}

SelfSupervisedBatch mine_self_supervised(const MatrixXd& batch, const Augmentation& augment,
                                         std::size_t n_triplets, std::uint64_t seed) {
  const Index b = batch.rows();
  if (b < 2) throw std::invalid_argument("mine_self_supervised: batch_size must be >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, b - 1);
  std::uniform_int_distribution<Index> pick_other(0, b - 2);
  SelfSupervisedBatch out;
  out.mining.requested = n_triplets;
  out.views.resize(static_cast<Index>(n_triplets), batch.cols());
  for (std::size_t t = 0; t < n_triplets; ++t) {
    const Index a = pick(rng);
    Index n = pick_other(rng);
    if (n >= a) ++n;
    const std::uint64_t view_seed = rng();
    out.views.row(static_cast<Index>(t)) = augment_row(batch.row(a).transpose(), augment, view_seed).transpose();
    out.mining.triplets.push_back({a, b + static_cast<std::int64_t>(t), n});
  }
  return out;
}

bool triplets_respect_classes(std::span<const Triplet> triplets, std::span<const int> classes) {
  const auto n = static_cast<std::int64_t>(classes.size());
  for (const auto& t : triplets) {
    if (t.anchor < 0 || t.positive < 0 || t.negative < 0 || t.anchor >= n || t.positive >= n || t.negative >= n) {
      return false;
    }
    const auto ca = classes[static_cast<std::size_t>(t.anchor)];
    if (t.anchor == t.positive || ca != classes[static_cast<std::size_t>(t.positive)] ||
        ca == classes[static_cast<std::size_t>(t.negative)]) {
      return false;
    }
  }
  return true;
}

}  // namespace sidescore
