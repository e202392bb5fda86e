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

#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "sidescore/data.hpp"
#include "sidescore/triplets.hpp"

using namespace sidescore;

namespace {

void check_class_constraints(const std::vector<Triplet>& ts, const std::vector<int>& classes) {
  for (const auto& t : ts) {
    REQUIRE(t.anchor >= 0);
    REQUIRE(t.anchor < std::int64_t(classes.size()));
    REQUIRE(t.positive < std::int64_t(classes.size()));
    REQUIRE(t.negative < std::int64_t(classes.size()));
    CHECK(t.anchor != t.positive);
    CHECK(classes[std::size_t(t.anchor)] == classes[std::size_t(t.positive)]);
    CHECK(classes[std::size_t(t.anchor)] != classes[std::size_t(t.negative)]);
  }
}

}  // namespace

TEST_CASE("mine_by_class respects class constraints") {
  const std::vector<int> classes = {0, 0, 1, 1};
  const auto r = mine_by_class(classes, 4, 1);
  CHECK(r.triplets.size() == 4);
  CHECK(r.shortfall == 0);
  check_class_constraints(r.triplets, classes);
  CHECK(triplets_respect_classes(r.triplets, classes));

  const std::vector<int> many = {3, 1, 1, 2, 3, 3, 0, 2, 1, 0, 2, 3, 5};
  const auto big = mine_by_class(many, 40, 9);
  CHECK(big.triplets.size() == 40);
  check_class_constraints(big.triplets, many);
  for (const auto& t : big.triplets) CHECK(t.anchor != 12);  // singleton class never anchors
  const std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> distinct = [&] {
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> s;
    for (const auto& t : big.triplets) s.insert({t.anchor, t.positive, t.negative});
    return s;
  }();
  CHECK(distinct.size() == big.triplets.size());
}

TEST_CASE("mine_by_class reports a shortfall instead of padding") {
  // Two anchors per class with one positive and two negatives each: 8 combinations.
  const std::vector<int> classes = {0, 0, 1, 1};
  const auto r = mine_by_class(classes, 20, 3);
  CHECK(r.requested == 20);
  CHECK(r.triplets.size() == 8);
  CHECK(r.shortfall == 12);
  check_class_constraints(r.triplets, classes);
  const auto singles = mine_by_class(std::vector<int>{0, 1, 2}, 5, 3);
  CHECK(singles.triplets.empty());
  CHECK(singles.shortfall == 5);
}

TEST_CASE("mine_by_class errors and determinism") {
  CHECK_THROWS_AS(mine_by_class(std::vector<int>{2, 2, 2}, 3, 1), std::invalid_argument);
  const std::vector<int> classes = {0, 1, 0, 1, 2, 2, 0};
  CHECK(mine_by_class(classes, 10, 77).triplets == mine_by_class(classes, 10, 77).triplets);
  CHECK(mine_by_class(classes, 10, 77).triplets != mine_by_class(classes, 10, 78).triplets);
}

TEST_CASE("quantile bins") {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto edges = quantile_bin_edges(v, 2);
  CHECK(assign_quantile_bins(v, edges) == std::vector<int>{0, 0, 1, 1});
  // Brute force: the lower bin holds exactly the ceil(N/2) smallest values.
  const std::vector<double> odd = {5, -1, 3, 9, 0};
  const auto bins = assign_quantile_bins(odd, quantile_bin_edges(odd, 2));
  CHECK(bins == std::vector<int>{1, 0, 0, 1, 0});
  // A value equal to an edge lands in the lower bin.
  const std::vector<double> ties = {1, 2, 2, 2, 3, 4};
  const auto te = quantile_bin_edges(ties, 2);
  CHECK(te == std::vector<double>{2});
  CHECK(assign_quantile_bins(ties, te) == std::vector<int>{0, 0, 0, 0, 1, 1});
  // Strictly increasing transforms leave the assignment unchanged.
  std::vector<double> mono(odd.size());
  std::transform(odd.begin(), odd.end(), mono.begin(), [](double x) { return std::exp(x) * 3 + 1; });
  CHECK(assign_quantile_bins(mono, quantile_bin_edges(mono, 3)) == assign_quantile_bins(odd, quantile_bin_edges(odd, 3)));
  CHECK_THROWS_AS(quantile_bin_edges(std::vector<double>{2, 2, 2}, 2), std::invalid_argument);
  CHECK_THROWS_AS(quantile_bin_edges(v, 5), std::invalid_argument);
  CHECK_THROWS_AS(quantile_bin_edges(v, 1), std::invalid_argument);
}

TEST_CASE("mine_by_quantile") {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto r = mine_by_quantile(v, 2, 6, 4);
  check_class_constraints(r.triplets, {0, 0, 1, 1});
  CHECK(r.triplets.size() + r.shortfall == 6);
  // One point per bin leaves no eligible anchors.
  const auto single = mine_by_quantile(v, 4, 3, 4);
  CHECK(single.triplets.empty());
  CHECK(single.shortfall == 3);
  CHECK_THROWS_AS(mine_by_quantile(std::vector<double>{1, 1, 1, 1}, 2, 3, 1), std::invalid_argument);
}

TEST_CASE("mine_self_supervised") {
  MatrixXd batch = MatrixXd::Random(6, 4);
  Augmentation aug;
  aug.kind = AugmentKind::tabular_jitter;
  aug.feature_std = VectorXd::Ones(4);
  aug.strength = 0.0;
  const auto zero = mine_self_supervised(batch, aug, 6, 2);
  REQUIRE(zero.views.rows() == std::int64_t(zero.mining.triplets.size()));
  for (std::size_t t = 0; t < zero.mining.triplets.size(); ++t) {
    const auto& tr = zero.mining.triplets[t];
    CHECK(tr.positive == 6 + std::int64_t(t));
    CHECK(tr.negative != tr.anchor);
    CHECK(tr.negative < 6);
    CHECK(zero.views.row(Index(t)) == batch.row(tr.anchor));
  }
  aug.strength = 1.0;
  const auto a = mine_self_supervised(batch, aug, 10, 5), b = mine_self_supervised(batch, aug, 10, 5);
  CHECK(a.views == b.views);
  CHECK(a.mining.triplets == b.mining.triplets);
  for (const auto& t : a.mining.triplets) CHECK(t.negative != t.anchor);
  const double jitter = (a.views.row(0) - batch.row(a.mining.triplets[0].anchor)).norm();
  CHECK(jitter > 0);
  CHECK(jitter < 1.0);
  CHECK_THROWS_AS(mine_self_supervised(batch.topRows(1), aug, 3, 1), std::invalid_argument);
}

TEST_CASE("image augmentation keeps pixels in range and the zero view exact") {
  MatrixXd img = MatrixXd::Zero(2, 784);
  for (Index r = 10; r < 18; ++r)
    for (Index c = 12; c < 16; ++c) img(0, r * 28 + c) = 1.0;
  img.row(1).setConstant(0.5);
  Augmentation aug;
  aug.kind = AugmentKind::image_shift_rotate;
  const VectorXd view = augment_row(img.row(0).transpose(), aug, 11);
  CHECK(view.size() == 784);
  CHECK(view.minCoeff() >= 0.0);
  CHECK(view.maxCoeff() <= 1.0);
  CHECK(view.sum() > 10.0);
  aug.strength = 0.0;
  CHECK(augment_row(img.row(0).transpose(), aug, 11) == VectorXd(img.row(0).transpose()));
  CHECK_THROWS_AS(augment_row(VectorXd::Zero(100), aug, 1), std::invalid_argument);
}
