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

#include "sidescore/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sidescore::eval {

const std::vector<double>& eval_labels(const Dataset& data) {
  if (!data.has_eval_labels()) throw DataError("dataset has no evaluation labels");
  return data.eval_labels_;
}

std::vector<int> reveal_labels(const Dataset& data, std::span<const Index> rows) {
  const auto& labels = eval_labels(data);
  std::vector<int> out(labels.size(), -1);
  for (Index r : rows) out.at(static_cast<std::size_t>(r)) = static_cast<int>(labels[static_cast<std::size_t>(r)]);
  return out;
}

// ----- assignment ------------------------------------------------------------

std::vector<int> max_weight_assignment(const MatrixXd& weights) {
  const Index rows = weights.rows(), cols = weights.cols();
  const Index n = std::max(rows, cols);
  if (n == 0) return {};
  // Minimization form on a padded square cost matrix.
  const double big = weights.size() > 0 ? weights.maxCoeff() : 0.0;
  MatrixXd cost = MatrixXd::Constant(n, n, big);
  cost.topLeftCorner(rows, cols) = (big - weights.array()).matrix();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i >= rows || j >= cols) cost(i, j) = 0.0;

  // Shortest augmenting path (Jonker-Volgenant style potentials), 1-based.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1)), v(static_cast<std::size_t>(n + 1));
  std::vector<Index> match(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(static_cast<std::size_t>(rows), -1);
  for (Index j = 1; j <= n; ++j) {
    const Index i = match[static_cast<std::size_t>(j)];
    if (i >= 1 && i <= rows && j <= cols) out[static_cast<std::size_t>(i - 1)] = static_cast<int>(j - 1);
  }
  return out;
}

double cluster_accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.empty() || predicted.size() != truth.size()) {
    throw std::invalid_argument("cluster_accuracy: inputs must be non-empty and of equal length");
  }
  std::map<int, Index> pred_ids, true_ids;
  for (int p : predicted) pred_ids.emplace(p, 0);
  for (int t : truth) true_ids.emplace(t, 0);
  Index k = 0;
  for (auto& [id, idx] : pred_ids) idx = k++;
  k = 0;
  for (auto& [id, idx] : true_ids) idx = k++;
  MatrixXd counts = MatrixXd::Zero(static_cast<Index>(pred_ids.size()), static_cast<Index>(true_ids.size()));
  for (std::size_t i = 0; i < predicted.size(); ++i) counts(pred_ids[predicted[i]], true_ids[truth[i]]) += 1.0;
  const auto match = max_weight_assignment(counts);
  double matched = 0.0;
  for (Index r = 0; r < counts.rows(); ++r) {
    const int c = match[static_cast<std::size_t>(r)];
    if (c >= 0) matched += counts(r, c);
  }
  return matched / static_cast<double>(predicted.size());
}

// ----- correlation -----------------------------------------------------------

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  // Continued fraction converges fast for x < (a + 1) / (a + b + 2).
  auto cf = [](double a, double b, double x) {
    const double tiny = 1e-300;
    double c = 1.0, d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
      const double m2 = 2.0 * m;
      double aa = m * (b - m) * x / ((a - 1.0 + m2) * (a + m2));
      d = 1.0 + aa * d;
      if (std::abs(d) < tiny) d = tiny;
      c = 1.0 + aa / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      h *= d * c;
      aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + 1.0 + m2));
      d = 1.0 + aa * d;
      if (std::abs(d) < tiny) d = tiny;
      c = 1.0 + aa / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h;
  };
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * cf(a, b, x) / a;
  return 1.0 - std::exp(log_front) * cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("student_t_two_sided: dof must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

Correlation pearson_r(std::span<const double> scores, std::span<const double> targets) {
  if (scores.size() != targets.size()) throw std::invalid_argument("pearson_r: length mismatch");
  if (scores.size() < 3) throw std::invalid_argument("pearson_r: need at least 3 points");
  const Eigen::Map<const VectorXd> x(scores.data(), static_cast<Index>(scores.size()));
  const Eigen::Map<const VectorXd> y(targets.data(), static_cast<Index>(targets.size()));
  const VectorXd xc = x.array() - x.mean();
  const VectorXd yc = y.array() - y.mean();
  const double sxx = xc.squaredNorm(), syy = yc.squaredNorm();
  if (!(sxx > 0.0) || !(syy > 0.0)) throw std::invalid_argument("pearson_r: zero variance input");
  Correlation out;
  out.r = std::clamp(xc.dot(yc) / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(scores.size()) - 2.0;
  if (dof <= 0.0) {
    out.p_value = 1.0;
  } else if (std::abs(out.r) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.r * std::sqrt(dof / (1.0 - out.r * out.r));
    out.p_value = student_t_two_sided(t, dof);
  }
  return out;
}

// ----- score alignment -------------------------------------------------------

ScoreAlignment align_score_order(std::span<const int> score_classes, std::span<const double> reference,
                                 int n_classes, const MatrixXd* probs) {
  if (score_classes.size() != reference.size() || reference.empty()) {
    throw std::invalid_argument("align_score_order: inputs must be non-empty and of equal length");
  }
  if (probs && (probs->rows() != static_cast<Index>(reference.size()) || probs->cols() != n_classes)) {
    throw std::invalid_argument("align_score_order: probability matrix has the wrong shape");
  }
  std::vector<double> sum(static_cast<std::size_t>(n_classes), 0.0);
  std::vector<double> count(static_cast<std::size_t>(n_classes), 0.0);
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const int k = score_classes[i];
    if (k < 0 || k >= n_classes) throw std::invalid_argument("align_score_order: class out of range");
    sum[static_cast<std::size_t>(k)] += reference[i];
    count[static_cast<std::size_t>(k)] += 1.0;
  }
  const double overall = std::accumulate(reference.begin(), reference.end(), 0.0) / static_cast<double>(reference.size());
  ScoreAlignment out;
  out.class_mean.resize(static_cast<std::size_t>(n_classes));
  for (int k = 0; k < n_classes; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    if (count[ks] > 0.0) {
      out.class_mean[ks] = sum[ks] / count[ks];
    } else if (probs && probs->col(k).sum() > 0.0) {
      const Eigen::Map<const VectorXd> ref(reference.data(), static_cast<Index>(reference.size()));
      out.class_mean[ks] = probs->col(k).dot(ref) / probs->col(k).sum();
    } else {
      out.class_mean[ks] = overall;
    }
  }
  std::vector<int> order(static_cast<std::size_t>(n_classes));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return out.class_mean[static_cast<std::size_t>(a)] < out.class_mean[static_cast<std::size_t>(b)];
  });
  out.rank_of_class.resize(static_cast<std::size_t>(n_classes));
  for (int r = 0; r < n_classes; ++r) out.rank_of_class[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
  return out;
}

// ----- PCA -------------------------------------------------------------------

PcaResult pca_project(const MatrixXd& embeddings, Index out_dim) {
  if (embeddings.rows() < 2) throw std::invalid_argument("pca_project: need at least two rows");
  if (embeddings.cols() < out_dim || out_dim < 1) throw std::invalid_argument("pca_project: d must be >= out_dim");
  PcaResult out;
  out.center = embeddings.colwise().mean().transpose();
  const MatrixXd centered = embeddings.rowwise() - out.center.transpose();
  const MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(embeddings.rows() - 1);
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(cov);
  const VectorXd values = solver.eigenvalues().cwiseMax(0.0);  // ascending
  const MatrixXd& vectors = solver.eigenvectors();
  const double total = values.sum();
  const double tol = 1e-12 * std::max(1.0, values.maxCoeff());
  out.components = MatrixXd::Zero(embeddings.cols(), out_dim);
  for (Index c = 0; c < out_dim; ++c) {
    const Index src = embeddings.cols() - 1 - c;
    if (values[src] <= tol) {
      out.rank_deficient = true;
      out.explained.push_back(0.0);
      continue;
    }
    VectorXd v = vectors.col(src);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    out.components.col(c) = v;
    out.explained.push_back(total > 0.0 ? values[src] / total : 0.0);
  }
  out.projection = centered * out.components;
  return out;
}

// ----- reports ---------------------------------------------------------------

std::string format_number(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

void Report::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Report::set(const std::string& key, double value) { set(key, format_number(value)); }

std::optional<std::string> Report::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

void Report::write_text(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << ": " << v << "\n";
}

void Report::write_table(std::ostream& out) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) out << (i ? "\t" : "") << entries_[i].first;
  out << "\n";
  for (std::size_t i = 0; i < entries_.size(); ++i) out << (i ? "\t" : "") << entries_[i].second;
  out << "\n";
}

}  // namespace sidescore::eval
