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

#ifndef SIDESCORE_TRIPLET_HPP_
#define SIDESCORE_TRIPLET_HPP_

#include <cstdint>

namespace sidescore {

/// Row indices into one batch.
struct Triplet {
  std::int64_t anchor = 0;
  std::int64_t positive = 0;
  std::int64_t negative = 0;

  bool operator==(const Triplet&) const = default;
};

}  // namespace sidescore

#endif  // SIDESCORE_TRIPLET_HPP_
