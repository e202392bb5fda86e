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

#ifndef SIDESCORE_ERROR_HPP_
#define SIDESCORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sidescore {

// Precondition violations on library calls (shapes, ranges) throw
// std::invalid_argument. The types below are for run-level failures that the
// CLI maps to distinct exit codes.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the training guard when a loss component stops being finite.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string component, const std::string& what)
      : std::runtime_error(what), component_(std::move(component)) {}

  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

}  // namespace sidescore

#endif  // SIDESCORE_ERROR_HPP_
