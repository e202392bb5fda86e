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

#ifndef SIDESCORE_CONFIG_HPP_
#define SIDESCORE_CONFIG_HPP_

// Run configuration in INI form. Every field has a default; the manifest
// written next to a checkpoint lists all of them, so it can be fed back as a
// config to reproduce the run.

#include <cstdint>
#include <string>

#include "sidescore/model.hpp"
#include "sidescore/trainer.hpp"

namespace sidescore {

enum class DataSource { blobs, idx, csv };

struct DataConfig {
  DataSource source = DataSource::blobs;

  // idx: training files, and optional held-out files. Without test files the
  // training files are split by train_fraction.
  std::string images, labels, test_images, test_labels;
  std::string images_sha256, labels_sha256, test_images_sha256, test_labels_sha256;
  SideMapKind side_map = SideMapKind::pure;
  bool side_info = true;  // false trains without side information
  Index limit = 0;  // use only the first `limit` training rows; 0 keeps all

  // csv
  std::string csv, schema;

  // blobs
  Index blob_per_class = 100;
  Index blob_classes = 4;
  Index blob_dim = 2;
  double blob_spread = 0.5;
  std::uint64_t blob_seed = 0;

  double train_fraction = 0.8;
  std::uint64_t split_seed = 0;
  bool standardize = true;  // applies to csv and blobs

  // Semi-supervised runs reveal `labeled` training labels, the same number
  // from every class.
  Index labeled = 0;
};

enum class Precision { single, double_ };

struct RunConfig {
  DataConfig data;
  ModelSpec model;  // input and side fields come from the data; n_score_classes 0 means auto
  TrainConfig train;
  Precision precision = Precision::double_;
  std::string out_dir = "out";

  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_string(const std::string& text);

  /// Complete INI text with every field materialized.
  std::string to_ini() const;
};

std::string to_string(DataSource s);
std::string to_string(Precision p);
std::string to_string(TripletRegime r);
std::string to_string(nn::Activation a);
std::string to_string(InputKind k);
std::string to_string(SideKind k);

}  // namespace sidescore

#endif  // SIDESCORE_CONFIG_HPP_
