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

#ifndef SIDESCORE_RUN_HPP_
#define SIDESCORE_RUN_HPP_

// End-to-end pipeline shared by the command-line tool and the acceptance
// tests: data preparation from a RunConfig, training in the configured
// precision, checkpoint assembly, and held-out evaluation.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sidescore/checkpoint.hpp"
#include "sidescore/config.hpp"
#include "sidescore/data.hpp"
#include "sidescore/eval.hpp"
#include "sidescore/model.hpp"
#include "sidescore/trainer.hpp"

namespace sidescore {

struct PreparedData {
  Dataset train;
  Dataset test;
  std::optional<Standardizer> standardizer;
  /// Semi-supervised target per training row (-1 when hidden), or empty.
  std::vector<int> revealed_labels;
  CsvLoadReport csv_report;
};

PreparedData prepare_data(const DataConfig& cfg);

/// Loads an evaluation dataset outside the configured split: an IDX image
/// file (labels file found by name), a CSV file with a schema, or
/// "blobs" for the configured fixture. Features are standardized with
/// `standardizer` when given.
Dataset load_eval_data(const std::string& path, const std::string& schema_path, const RunConfig& cfg,
                       const std::optional<Standardizer>& standardizer);

/// Fills input_dim, the side-information fields and an automatic
/// n_score_classes (side classes when categorical, else 10) from the data.
ModelSpec resolve_spec(const ModelSpec& requested, const Dataset& train);

/// A trained model of either precision behind a double-precision interface.
class LoadedModel {
 public:
  static LoadedModel from_checkpoint(const Checkpoint& ck);
  template <typename Scalar>
  LoadedModel(Model<Scalar> model, RunConfig cfg) : model_(std::move(model)), config_(std::move(cfg)) {}

  const RunConfig& config() const { return config_; }
  const ModelSpec& spec() const;
  bool has_side_head() const { return spec().side_kind != SideKind::none; }

  GaussianBatch<double> encode(const MatrixXd& x) const;
  MatrixXd embed(const MatrixXd& x) const { return encode(x).mean; }
  MatrixXd predict_score(const MatrixXd& z) const;
  MatrixXd predict_side(const MatrixXd& z) const;

  std::optional<Standardizer> standardizer;
  /// Ordinal position of each score class after alignment to side info.
  std::vector<int> score_rank;

 private:
  std::variant<Model<float>, Model<double>> model_;
  RunConfig config_;
};

struct RunOutput {
  RunConfig resolved;  // config with the model spec completed from the data
  Checkpoint checkpoint;
  TrainHistory history;
  PreparedData data;
};

RunOutput run_training(const RunConfig& cfg, const EpochCallback& on_epoch = {});

/// Score ranks from side information on the training rows.
std::vector<int> score_alignment(const LoadedModel& model, const Dataset& train);

namespace eval {

/// Held-out metrics. Requires evaluation labels on `data`.
Report evaluate_model(const LoadedModel& model, const Dataset& data);

}  // namespace eval

/// Per-epoch loss table. Contains no timings, so reruns are byte-identical.
std::string history_table(const TrainHistory& history);
/// Wall-clock seconds per epoch.
std::string timing_table(const TrainHistory& history);

}  // namespace sidescore

#endif  // SIDESCORE_RUN_HPP_
