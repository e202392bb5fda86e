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
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sidescore/data.hpp"
#include "sidescore/eval.hpp"

using namespace sidescore;
using namespace sidescore::eval;

namespace {

/// Best accuracy over every injective map from predicted ids to true ids.
double brute_force_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const int kp = *std::max_element(pred.begin(), pred.end()) + 1;
  const int kt = *std::max_element(truth.begin(), truth.end()) + 1;
  const int k = std::max(kp, kt);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += perm[std::size_t(pred[i])] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return double(best) / double(pred.size());
}

double brute_force_assignment_value(const MatrixXd& w) {
  const Index n = std::max(w.rows(), w.cols());
  MatrixXd padded = MatrixXd::Zero(n, n);
  padded.topLeftCorner(w.rows(), w.cols()) = w;
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1e300;
  do {
    double v = 0;
    for (Index i = 0; i < n; ++i) v += padded(i, perm[std::size_t(i)]);
    best = std::max(best, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("cluster_accuracy examples") {
  const std::vector<int> t = {0, 1, 2, 1, 0};
  CHECK(cluster_accuracy(t, t) == 1.0);
  CHECK(cluster_accuracy(std::vector<int>{0, 0, 1, 1}, std::vector<int>{1, 1, 0, 0}) == 1.0);
  CHECK(cluster_accuracy(std::vector<int>{0, 1, 0, 1, 2, 2}, std::vector<int>{0, 0, 1, 1, 2, 2}) ==
        doctest::Approx(4.0 / 6.0).epsilon(1e-15));
  CHECK_THROWS(cluster_accuracy(std::vector<int>{}, std::vector<int>{}));
  CHECK_THROWS(cluster_accuracy(std::vector<int>{0, 1}, std::vector<int>{0}));
}

TEST_CASE("cluster_accuracy matches brute force and ignores relabeling") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const int kp = 2 + trial % 5, kt = 2 + (trial / 5) % 4;
    std::uniform_int_distribution<int> up(0, kp - 1), ut(0, kt - 1);
    std::vector<int> pred(30), truth(30);
    for (auto& v : pred) v = up(rng);
    for (auto& v : truth) v = ut(rng);
    const double acc = cluster_accuracy(pred, truth);
    CHECK(acc == doctest::Approx(brute_force_accuracy(pred, truth)).epsilon(1e-15));
    std::vector<int> relabel(static_cast<std::size_t>(kp));
    std::iota(relabel.begin(), relabel.end(), 0);
    std::shuffle(relabel.begin(), relabel.end(), rng);
    std::vector<int> permuted(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) permuted[i] = relabel[std::size_t(pred[i])];
    CHECK(cluster_accuracy(permuted, truth) == acc);
  }
}

TEST_CASE("max_weight_assignment is optimal") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2, 5);
  for (int trial = 0; trial < 40; ++trial) {
    const Index r = 1 + trial % 6, c = 1 + (trial / 6) % 6;
    const MatrixXd w = MatrixXd::NullaryExpr(r, c, [&] { return u(rng); });
    const auto match = max_weight_assignment(w);
    REQUIRE(match.size() == std::size_t(r));
    double value = 0;
    std::vector<int> used;
    for (Index i = 0; i < r; ++i) {
      const int j = match[std::size_t(i)];
      if (j < 0) continue;
      CHECK(std::find(used.begin(), used.end(), j) == used.end());
      used.push_back(j);
      value += w(i, j);
    }
    CHECK(used.size() == std::size_t(std::min(r, c)));
    // Unmatched or padded cells contribute zero in the oracle, so compare
    // against the oracle restricted to full matchings of the smaller side.
    const MatrixXd shifted = (w.array() + 10.0).matrix();
    const auto m2 = max_weight_assignment(shifted);
    double v2 = 0;
    for (Index i = 0; i < r; ++i)
      if (m2[std::size_t(i)] >= 0) v2 += shifted(i, m2[std::size_t(i)]);
    CHECK(v2 == doctest::Approx(brute_force_assignment_value(shifted)).epsilon(1e-12));
    CHECK(value == doctest::Approx(v2 - 10.0 * double(std::min(r, c))).epsilon(1e-12));
  }
}

TEST_CASE("pearson_r examples and oracle p-values") {
  const std::vector<double> a = {1, 2, 3, 4}, b = {1, 2, 3, 5};
  const auto c = pearson_r(a, b);
  CHECK(c.r == doctest::Approx(0.9827076298239907).epsilon(1e-13));
  CHECK(c.p_value == doctest::Approx(0.017292370176009264).epsilon(1e-9));
  const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8}, y = {2, 1, 4, 3, 7, 8, 5, 9};
  const auto d = pearson_r(x, y);
  CHECK(d.r == doctest::Approx(0.854670717992912).epsilon(1e-13));
  CHECK(d.p_value == doctest::Approx(0.006861515291359663).epsilon(1e-9));
  CHECK(pearson_r(a, a).r == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> neg(a.size());
  std::transform(a.begin(), a.end(), neg.begin(), [](double v) { return -v; });
  CHECK(pearson_r(a, neg).r == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(pearson_r(a, std::vector<double>{1, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(pearson_r(std::vector<double>{1, 2}, std::vector<double>{2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(pearson_r(a, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("pearson_r affine invariance") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  std::vector<double> x(50), y(50);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = z(rng);
    y[i] = 0.5 * x[i] + z(rng);
  }
  const double r = pearson_r(x, y).r;
  std::vector<double> xa(x.size()), xn(x.size());
  std::transform(x.begin(), x.end(), xa.begin(), [](double v) { return 3.5 * v - 7; });
  std::transform(x.begin(), x.end(), xn.begin(), [](double v) { return -2 * v + 1; });
  CHECK(pearson_r(xa, y).r == doctest::Approx(r).epsilon(1e-12));
  CHECK(pearson_r(xn, y).r == doctest::Approx(-r).epsilon(1e-12));
  CHECK(pearson_r(xn, y).p_value == doctest::Approx(pearson_r(x, y).p_value).epsilon(1e-10));
}

TEST_CASE("student t tail and incomplete beta against reference values") {
  CHECK(student_t_two_sided(2.0, 5) == doctest::Approx(0.10193947882985828).epsilon(1e-10));
  CHECK(student_t_two_sided(0.5, 30) == doctest::Approx(0.6207230048851273).epsilon(1e-10));
  CHECK(student_t_two_sided(10.0, 3) == doctest::Approx(0.0021283990584141494).epsilon(1e-10));
  CHECK(student_t_two_sided(-2.0, 5) == student_t_two_sided(2.0, 5));
  CHECK(student_t_two_sided(0.0, 7) == doctest::Approx(1.0));
  CHECK(incomplete_beta(2.5, 1.5, 0.3) == doctest::Approx(0.08894372317066562).epsilon(1e-11));
  CHECK(incomplete_beta(0.5, 7, 0.9) == doctest::Approx(0.9999999780702157).epsilon(1e-12));
  CHECK(incomplete_beta(30, 40, 0.45) == doctest::Approx(0.6447480085585666).epsilon(1e-10));
  CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
  // I_x(1, 1) = x
  CHECK(incomplete_beta(1, 1, 0.37) == doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("align_score_order") {
  const std::vector<int> classes = {0, 0, 1, 1, 2, 2};
  const std::vector<double> ordered = {1, 2, 3, 4, 5, 6};
  CHECK(align_score_order(classes, ordered, 3).rank_of_class == std::vector<int>{0, 1, 2});
  const std::vector<double> swapped = {5, 6, 3, 4, 1, 2};
  const auto s = align_score_order(classes, swapped, 3);
  CHECK(s.rank_of_class == std::vector<int>{2, 1, 0});
  CHECK(s.rank(0) == 2);
  CHECK(s.class_mean == std::vector<double>{5.5, 3.5, 1.5});
  // Class 3 never appears: without probabilities it takes the global mean.
  const auto missing = align_score_order(classes, ordered, 4);
  CHECK(missing.class_mean[3] == doctest::Approx(3.5));
  MatrixXd probs = MatrixXd::Zero(6, 4);
  for (Index i = 0; i < 6; ++i) probs(i, classes[std::size_t(i)]) = 0.9;
  probs.col(3).setConstant(0.1);
  probs(5, 3) = 0.5;
  probs(5, 2) = 0.5;
  const auto soft = align_score_order(classes, ordered, 4, &probs);
  const double expected = (0.1 * (1 + 2 + 3 + 4 + 5) + 0.5 * 6) / (0.5 + 0.5);
  CHECK(soft.class_mean[3] == doctest::Approx(expected));
  CHECK(soft.rank(3) == 2);
  CHECK(soft.rank(2) == 3);
}

TEST_CASE("pca_project") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  MatrixXd two(40, 2);
  for (Index i = 0; i < 40; ++i) two.row(i) << 3 * z(rng), 0.5 * z(rng);
  const auto p = pca_project(two);
  CHECK(p.explained[0] + p.explained[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.explained[0] > p.explained[1]);
  CHECK_FALSE(p.rank_deficient);
  // Distances are preserved by a rotation or reflection.
  for (Index i = 1; i < 40; ++i)
    CHECK((p.projection.row(i) - p.projection.row(0)).norm() ==
          doctest::Approx((two.row(i) - two.row(0)).norm()).epsilon(1e-10));
  const MatrixXd gram = p.components.transpose() * p.components;
  CHECK((gram - MatrixXd::Identity(2, 2)).norm() <= 1e-12);
  for (Index k = 0; k < 2; ++k) {
    Index arg;
    p.components.col(k).cwiseAbs().maxCoeff(&arg);
    CHECK(p.components(arg, k) > 0);
  }

  MatrixXd plane(30, 3);
  for (Index i = 0; i < 30; ++i) {
    const double a = z(rng), b = z(rng);
    plane.row(i) << a, b, 2 * a - b;
  }
  plane.row(7) = plane.row(3);
  const auto q = pca_project(plane);
  CHECK(q.explained[0] + q.explained[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(q.projection.row(7) == q.projection.row(3));
  const MatrixXd recon = (q.projection * q.components.transpose()).rowwise() + q.center.transpose();
  CHECK((recon - plane).norm() <= 1e-9);

  MatrixXd line(10, 3);
  for (Index i = 0; i < 10; ++i) line.row(i) << i, 2 * i, -i;
  const auto l = pca_project(line);
  CHECK(l.rank_deficient);
  CHECK(l.projection.col(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(l.projection.rows() == 10);
}

TEST_CASE("reveal_labels exposes only the chosen rows") {
  const auto data = make_blobs(3, 2, 2, 0.1, 1);
  const std::vector<Index> rows = {0, 4};
  const auto revealed = reveal_labels(data, rows);
  REQUIRE(revealed.size() == 6);
  const auto& truth = eval_labels(data);
  for (std::size_t i = 0; i < revealed.size(); ++i) {
    if (i == 0 || i == 4) {
      CHECK(revealed[i] == int(truth[i]));
    } else {
      CHECK(revealed[i] == -1);
    }
  }
  Dataset unlabeled;
  unlabeled.features = MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(eval_labels(unlabeled), DataError);
}

TEST_CASE("Report formatting") {
  Report r;
  r.set("rows", 3.0);
  r.set("name", "blobs");
  r.set("acc", 0.125);
  r.set("rows", 4.0);
  CHECK(r.get("rows") == "4");
  CHECK(!r.get("missing").has_value());
  std::ostringstream text, table;
  r.write_text(text);
  r.write_table(table);
  CHECK(text.str() == "rows: 4\nname: blobs\nacc: 0.125\n");
  CHECK(table.str() == "rows\tname\tacc\n4\tblobs\t0.125\n");
  CHECK(format_number(std::nan("")) == "nan");
}
