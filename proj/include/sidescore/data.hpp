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

#ifndef SIDESCORE_DATA_HPP_
#define SIDESCORE_DATA_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sidescore/error.hpp"
#include "sidescore/types.hpp"

namespace sidescore {

/// Per-instance side information S.
struct SideInfo {
  enum class Kind { categorical, continuous };

  Kind kind = Kind::categorical;
  std::vector<double> values;
  int num_classes = 0;  // categorical only

  static SideInfo categorical(std::vector<int> ids, int num_classes);
  static SideInfo continuous(std::vector<double> values);

  std::size_t size() const { return values.size(); }
  std::vector<int> classes() const;
  SideInfo select(std::span<const Index> rows) const;
  void validate() const;
};

class Dataset;

namespace eval {
const std::vector<double>& eval_labels(const Dataset& data);
}

/// Features, optional side information and held-out evaluation labels.
///
/// Evaluation labels can be attached but not read back through this class;
/// the only accessor is sidescore::eval::eval_labels. Training code receives a
/// TrainingView, which carries no labels at all.
class Dataset {
 public:
  MatrixXd features;
  std::optional<SideInfo> side;
  std::vector<std::string> feature_names;
  std::string split_tag;

  Index rows() const { return features.rows(); }
  bool has_eval_labels() const { return !eval_labels_.empty(); }
  void set_eval_labels(std::vector<double> labels);

  /// Rows in the given order, including side information and labels.
  Dataset select(std::span<const Index> rows) const;
  void validate() const;

 private:
  std::vector<double> eval_labels_;
  friend const std::vector<double>& eval::eval_labels(const Dataset& data);
};

/// What the trainer is allowed to see. `labels` is the partially labeled
/// target of semi-supervised runs: one entry per row, -1 when unlabeled, or
/// empty.
struct TrainingView {
  const MatrixXd* features = nullptr;
  const SideInfo* side = nullptr;
  std::vector<int> labels;

  Index rows() const { return features ? features->rows() : 0; }
};

TrainingView training_view(const Dataset& data);

// ----- IDX -------------------------------------------------------------------

class IdxError : public DataError {
 public:
  enum class Kind { io, bad_magic, truncated, count_mismatch, checksum };
  IdxError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct IdxChecksums {
  std::string images_sha256;
  std::string labels_sha256;
};

/// Reads an IDX image file (magic 0x00000803, N x rows x cols, uint8) and the
/// matching label file (magic 0x00000801). Gzipped files are read
/// transparently. Pixels are scaled by 1/255; labels become evaluation
/// labels.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 const std::optional<IdxChecksums>& checksums = std::nullopt);

/// Writes pixel values in [0, 1] (rounded to bytes) and labels; gzipped when
/// the path ends in ".gz".
void write_idx(const std::string& images_path, const std::string& labels_path,
               const MatrixXd& pixels, std::span<const int> labels, Index height = 28, Index width = 28);

std::string sha256_file(const std::string& path);

// ----- tabular ---------------------------------------------------------------

enum class ColumnRole { feature, side, eval_label, drop };

struct Schema {
  std::map<std::string, ColumnRole> roles;
  ColumnRole default_role = ColumnRole::feature;
  char delimiter = ',';
  SideInfo::Kind side_kind = SideInfo::Kind::continuous;

  /// INI-style file with an optional [options] section (delimiter, default,
  /// side_kind) and a [columns] section of `name = role` lines.
  static Schema parse_file(const std::string& path);
};

struct CsvLoadReport {
  std::size_t rows_dropped_missing = 0;
  std::vector<std::string> constant_columns_dropped;
};

/// Loads a CSV with a header row. Rows with an empty, "NA" or "?" cell in a
/// used column are dropped and counted. Constant feature columns are dropped.
/// Features are returned unstandardized; see split().
Dataset load_tabular_csv(const std::string& path, const Schema& schema, CsvLoadReport* report = nullptr);

// ----- side-information maps -------------------------------------------------

enum class SideMapKind { pure, pairs, heterogeneous, custom };

/// pure: identity; pairs: label / 2; heterogeneous: {0-3} -> 0, {4-6} -> 1,
/// {7,8} -> 2, {9} -> 3. The built-in maps accept labels 0..9. `custom` uses
/// `table`.
SideInfo side_map(std::span<const int> labels, SideMapKind kind,
                  const std::map<int, int>& table = {});

SideMapKind parse_side_map(const std::string& name);
std::string to_string(SideMapKind kind);

// ----- fixtures and splits ---------------------------------------------------

/// n_classes Gaussian clusters of n_per_class points each. Centers sit on a
/// circle of radius 4 in the first two coordinates (on a line for dim = 1);
/// points are center + spread * N(0, I). Class ids serve as categorical side
/// information and as evaluation labels.
Dataset make_blobs(Index n_per_class, Index n_classes, Index dim, double spread, std::uint64_t seed);

/// Per-column standardization fitted on one matrix and applied to others.
struct Standardizer {
  VectorXd mean;
  VectorXd scale;

  static Standardizer fit(const MatrixXd& x);
  MatrixXd apply(const MatrixXd& x) const;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  std::optional<Standardizer> standardizer;
};

/// Seeded random partition. `fractions` holds the train fraction and
/// optionally the test fraction (default: the remainder). With
/// `standardize`, statistics are fitted on the train rows only and applied
/// to both parts.
SplitResult split(const Dataset& data, std::span<const double> fractions, std::uint64_t seed,
                  bool standardize = false);

/// Row order used by split(); exposed so other commands can reproduce it.
std::vector<Index> split_permutation(Index n, std::uint64_t seed);

// ----- quantile bins ---------------------------------------------------------

/// Upper edges of the first n_bins - 1 bins, taken as empirical quantiles
/// sorted[ceil(j N / n_bins) - 1].
std::vector<double> quantile_bin_edges(std::span<const double> values, int n_bins);

/// Bin index = number of edges strictly below the value, so a value equal to
/// an edge lands in the lower bin.
std::vector<int> assign_quantile_bins(std::span<const double> values, std::span<const double> edges);

}  // namespace sidescore

#endif  // SIDESCORE_DATA_HPP_
