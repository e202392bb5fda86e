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

#include "sidescore/plot.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "sidescore/error.hpp"

namespace sidescore {
namespace {

using Rgb = std::array<unsigned char, 3>;

constexpr Rgb kPalette[20] = {
    {31, 119, 180},  {255, 127, 14},  {44, 160, 44},   {214, 39, 40},   {148, 103, 189},
    {140, 86, 75},   {227, 119, 194}, {127, 127, 127}, {188, 189, 34},  {23, 190, 207},
    {174, 199, 232}, {255, 187, 120}, {152, 223, 138}, {255, 152, 150}, {197, 176, 213},
    {196, 156, 148}, {247, 182, 210}, {199, 199, 199}, {219, 219, 141}, {158, 218, 229}};

// Piecewise-linear ramp through five anchors, dark purple to yellow.
Rgb ramp(double t) {
  static constexpr std::array<std::array<double, 3>, 5> anchors = {
      {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  Rgb out;
  for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(c)] = static_cast<unsigned char>(std::lround(
      anchors[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] * (1 - f) +
      anchors[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(c)] * f));
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

}  // namespace

Index Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<Index>(it - header.begin());
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open table " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty table " + path);
  t.header = split_csv(line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != t.header.size()) throw DataError("ragged row in " + path);
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::logic_error&) {
        throw DataError("non-numeric cell '" + c + "' in " + path);
      }
    }
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return t;
}

void write_table(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
  out << '\n';
  char buf[32];
  for (Index i = 0; i < table.values.rows(); ++i) {
    for (Index j = 0; j < table.values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", table.values(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path);
}

void write_scatter_png(const std::string& path, const MatrixXd& xy, const std::vector<double>& colour,
                       const ScatterStyle& style) {
  if (xy.cols() != 2) throw std::invalid_argument("write_scatter_png: need two columns");
  if (static_cast<Index>(colour.size()) != xy.rows()) throw std::invalid_argument("write_scatter_png: colour length");
  const int w = style.width, h = style.height, m = style.margin;
  std::vector<unsigned char> pixels(static_cast<std::size_t>(w * h * 3), 255);

  auto put = [&](int x, int y, const Rgb& c) {
    if (x < 0 || y < 0 || x >= w || y >= h) return;
    const auto at = static_cast<std::size_t>((y * w + x) * 3);
    pixels[at] = c[0];
    pixels[at + 1] = c[1];
    pixels[at + 2] = c[2];
  };
  for (int x = m; x <= w - m; ++x) {
    put(x, m, {0, 0, 0});
    put(x, h - m, {0, 0, 0});
  }
  for (int y = m; y <= h - m; ++y) {
    put(m, y, {0, 0, 0});
    put(w - m, y, {0, 0, 0});
  }

  bool categorical = true;
  std::set<double> distinct;
  for (double v : colour) {
    if (v != std::floor(v)) categorical = false;
    distinct.insert(v);
  }
  if (distinct.size() > 20) categorical = false;
  const std::vector<double> levels(distinct.begin(), distinct.end());
  const double cmin = levels.empty() ? 0.0 : levels.front();
  const double cmax = levels.empty() ? 1.0 : levels.back();

  if (xy.rows() > 0) {
    const Eigen::Vector2d lo = xy.colwise().minCoeff().transpose();
    const Eigen::Vector2d hi = xy.colwise().maxCoeff().transpose();
    const Eigen::Vector2d span = (hi - lo).cwiseMax(1e-12);
    const int inner_w = w - 2 * m - 8, inner_h = h - 2 * m - 8;
    for (Index i = 0; i < xy.rows(); ++i) {
      const int px = m + 4 + static_cast<int>(std::lround((xy(i, 0) - lo[0]) / span[0] * inner_w));
      const int py = h - m - 4 - static_cast<int>(std::lround((xy(i, 1) - lo[1]) / span[1] * inner_h));
      Rgb c;
      const double v = colour[static_cast<std::size_t>(i)];
      if (categorical) {
        const auto level = std::lower_bound(levels.begin(), levels.end(), v) - levels.begin();
        c = kPalette[static_cast<std::size_t>(level) % 20];
      } else {
        c = ramp(cmax > cmin ? (v - cmin) / (cmax - cmin) : 0.5);
      }
      const int r = style.point_radius;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
          if (dx * dx + dy * dy <= r * r) put(px + dx, py + dy, c);
    }
  }

  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw DataError("cannot write image " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw DataError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("failed writing image " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < h; ++y) png_write_row(png, pixels.data() + static_cast<std::size_t>(y * w * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace sidescore
