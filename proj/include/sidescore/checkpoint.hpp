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

#ifndef SIDESCORE_CHECKPOINT_HPP_
#define SIDESCORE_CHECKPOINT_HPP_

// Single-file model archive: the run manifest followed by named arrays stored
// as IEEE doubles. Float parameters widen exactly, so save -> load reproduces
// every parameter bit for bit in either precision.

#include <string>
#include <vector>

#include "sidescore/error.hpp"
#include "sidescore/model.hpp"
#include "sidescore/types.hpp"

namespace sidescore {

struct NamedArray {
  std::string name;
  MatrixXd values;
};

struct Checkpoint {
  std::string manifest;
  std::vector<NamedArray> arrays;

  const MatrixXd* find(const std::string& name) const;
  void put(const std::string& name, MatrixXd values);

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

template <typename Scalar>
void export_parameters(Model<Scalar>& model, Checkpoint& ck) {
  for (const auto& p : model.parameters()) ck.put("param." + p.name, p.value->template cast<double>());
}

template <typename Scalar>
void import_parameters(Model<Scalar>& model, const Checkpoint& ck) {
  for (const auto& p : model.parameters()) {
    const MatrixXd* stored = ck.find("param." + p.name);
    if (!stored) throw DataError("checkpoint is missing parameter " + p.name);
    if (stored->rows() != p.value->rows() || stored->cols() != p.value->cols()) {
      throw DataError("checkpoint parameter " + p.name + " has the wrong shape");
    }
    *p.value = stored->template cast<Scalar>();
  }
}

}  // namespace sidescore

#endif  // SIDESCORE_CHECKPOINT_HPP_
