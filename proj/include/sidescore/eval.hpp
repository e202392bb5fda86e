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

#ifndef SIDESCORE_EVAL_HPP_
#define SIDESCORE_EVAL_HPP_

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sidescore/data.hpp"
#include "sidescore/types.hpp"

namespace sidescore::eval {

/// The only read access to a dataset's evaluation labels.
const std::vector<double>& eval_labels(const Dataset& data);

/// Labels of the chosen rows for semi-supervised training; every other row
/// gets -1.
std::vector<int> reveal_labels(const Dataset& data, std::span<const Index> rows);

/// Accuracy under the best one-to-one matching of predicted classes to true
/// classes (Hungarian algorithm on the contingency table). Classes left
/// unmatched when the two label sets differ in size count as errors.
double cluster_accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Maximum-weight assignment for a square or rectangular weight matrix.
/// Returns, for each row, the matched column or -1.
std::vector<int> max_weight_assignment(const MatrixXd& weights);

struct Correlation {
  double r = 0.0;
  double p_value = 1.0;
};

/// Pearson r with a two-sided p-value from Student's t with N - 2 degrees of
/// freedom.
Correlation pearson_r(std::span<const double> scores, std::span<const double> targets);

/// Two-sided tail probability P(|T| >= |t|) for Student's t.
double student_t_two_sided(double t, double dof);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

struct ScoreAlignment {
  /// rank_of_class[k] is the ordinal position of score class k.
  std::vector<int> rank_of_class;
  /// Mean reference value per class (soft mean for classes with no hard
  /// assignments).
  std::vector<double> class_mean;

  int rank(int score_class) const { return rank_of_class.at(static_cast<std::size_t>(score_class)); }
};

/// Orders score classes by ascending mean of `reference` within each class.
/// A class with no hard assignments takes the probability-weighted mean of
/// the reference when `probs` is given, otherwise the overall reference mean.
ScoreAlignment align_score_order(std::span<const int> score_classes, std::span<const double> reference,
                                 int n_classes, const MatrixXd* probs = nullptr);

struct PcaResult {
  MatrixXd projection;            // N x out_dim
  std::vector<double> explained;  // variance fraction per component
  MatrixXd components;            // d x out_dim loadings
  VectorXd center;
  bool rank_deficient = false;
};

/// Centered projection onto the leading principal components, ordered by
/// descending variance. Each component's largest-magnitude loading is made
/// positive. When the data has fewer than out_dim non-zero directions the
/// missing components are zero and `rank_deficient` is set.
PcaResult pca_project(const MatrixXd& embeddings, Index out_dim = 2);

/// Ordered key: value report. Every key appears once.
class Report {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::optional<std::string> get(const std::string& key) const;

  void write_text(std::ostream& out) const;
  /// Two-row tab-separated table: header and values.
  void write_table(std::ostream& out) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string format_number(double v);

}  // namespace sidescore::eval

#endif  // SIDESCORE_EVAL_HPP_
