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

#include "sidescore/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace sidescore {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'S', 'S', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void put_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_raw(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw DataError("truncated checkpoint " + path);
  return v;
}

std::string get_string(std::ifstream& in, const std::string& path) {
  const auto n = get_raw<std::uint64_t>(in, path);
  if (n > (1ULL << 32)) throw DataError("corrupt checkpoint " + path);
  std::string s(n, '\0');
  if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) throw DataError("truncated checkpoint " + path);
  return s;
}

}  // namespace

const MatrixXd* Checkpoint::find(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return &a.values;
  return nullptr;
}

void Checkpoint::put(const std::string& name, MatrixXd values) {
  for (auto& a : arrays) {
    if (a.name == name) {
      a.values = std::move(values);
      return;
    }
  }
  arrays.push_back({name, std::move(values)});
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out.write(kMagic, sizeof(kMagic));
  put_raw<std::uint64_t>(out, manifest.size());
  out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  put_raw<std::uint64_t>(out, arrays.size());
  for (const auto& a : arrays) {
    put_raw<std::uint64_t>(out, a.name.size());
    out.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
    put_raw<std::int64_t>(out, a.values.rows());
    put_raw<std::int64_t>(out, a.values.cols());
    out.write(reinterpret_cast<const char*>(a.values.data()),
              static_cast<std::streamsize>(a.values.size() * sizeof(double)));
  }
  if (!out) throw DataError("failed writing checkpoint " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a sidescore checkpoint: " + path);
  }
  Checkpoint ck;
  ck.manifest = get_string(in, path);
  const auto n = get_raw<std::uint64_t>(in, path);
  for (std::uint64_t i = 0; i < n; ++i) {
    NamedArray a;
    a.name = get_string(in, path);
    const auto rows = get_raw<std::int64_t>(in, path);
    const auto cols = get_raw<std::int64_t>(in, path);
    if (rows < 0 || cols < 0 || (rows && cols > (1LL << 40) / rows)) throw DataError("corrupt checkpoint " + path);
    a.values.resize(rows, cols);
    if (a.values.size() &&
        !in.read(reinterpret_cast<char*>(a.values.data()), static_cast<std::streamsize>(a.values.size() * sizeof(double)))) {
      throw DataError("truncated checkpoint " + path);
    }
    ck.arrays.push_back(std::move(a));
  }
  return ck;
}

}  // namespace sidescore
