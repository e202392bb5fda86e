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

#include "sidescore/data.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace sidescore {

// ----- SideInfo / Dataset ----------------------------------------------------

SideInfo SideInfo::categorical(std::vector<int> ids, int num_classes) {
  SideInfo s;
  s.kind = Kind::categorical;
  s.num_classes = num_classes;
  s.values.assign(ids.begin(), ids.end());
  s.validate();
  return s;
}

SideInfo SideInfo::continuous(std::vector<double> values) {
  SideInfo s;
  s.kind = Kind::continuous;
  s.values = std::move(values);
  s.validate();
  return s;
}

std::vector<int> SideInfo::classes() const {
  if (kind != Kind::categorical) throw std::logic_error("SideInfo::classes: side information is continuous");
  std::vector<int> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](double v) { return static_cast<int>(v); });
  return out;
}

SideInfo SideInfo::select(std::span<const Index> rows) const {
  SideInfo out;
  out.kind = kind;
  out.num_classes = num_classes;
  out.values.reserve(rows.size());
  for (Index r : rows) out.values.push_back(values.at(static_cast<std::size_t>(r)));
  return out;
}

void SideInfo::validate() const {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("SideInfo: non-finite value");
    if (kind == Kind::categorical &&
        (v < 0 || v >= num_classes || v != std::floor(v))) {
      throw std::invalid_argument("SideInfo: categorical value outside [0, num_classes)");
    }
  }
}

void Dataset::set_eval_labels(std::vector<double> labels) {
  if (!labels.empty() && static_cast<Index>(labels.size()) != rows()) {
    throw std::invalid_argument("Dataset: eval label count does not match row count");
  }
  eval_labels_ = std::move(labels);
}

Dataset Dataset::select(std::span<const Index> rows) const {
  Dataset out;
  out.features.resize(static_cast<Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.features.row(static_cast<Index>(i)) = features.row(rows[i]);
  if (side) out.side = side->select(rows);
  out.feature_names = feature_names;
  out.split_tag = split_tag;
  if (has_eval_labels()) {
    out.eval_labels_.reserve(rows.size());
    for (Index r : rows) out.eval_labels_.push_back(eval_labels_.at(static_cast<std::size_t>(r)));
  }
  return out;
}

void Dataset::validate() const {
  if (side && static_cast<Index>(side->size()) != rows()) {
    throw std::invalid_argument("Dataset: side information length does not match row count");
  }
  if (has_eval_labels() && static_cast<Index>(eval_labels_.size()) != rows()) {
    throw std::invalid_argument("Dataset: eval label count does not match row count");
  }
  if (side) side->validate();
}

TrainingView training_view(const Dataset& data) {
  data.validate();
  TrainingView view;
  view.features = &data.features;
  view.side = data.side ? &*data.side : nullptr;
  return view;
}

// ----- IDX -------------------------------------------------------------------

namespace {

struct GzCloser {
  void operator()(gzFile f) const {
    if (f) gzclose(f);
  }
};
using GzHandle = std::unique_ptr<std::remove_pointer_t<gzFile>, GzCloser>;

GzHandle open_gz(const std::string& path, const char* mode) {
  GzHandle h(gzopen(path.c_str(), mode));
  if (!h) throw IdxError(IdxError::Kind::io, "cannot open " + path);
  return h;
}

std::uint32_t read_be32(gzFile f, const std::string& path) {
  std::array<unsigned char, 4> b{};
  if (gzread(f, b.data(), 4) != 4) throw IdxError(IdxError::Kind::truncated, "truncated IDX header in " + path);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

void write_be32(gzFile f, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  gzwrite(f, b, 4);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 const std::optional<IdxChecksums>& checksums) {
  if (checksums) {
    if (!checksums->images_sha256.empty() && sha256_file(images_path) != checksums->images_sha256) {
      throw IdxError(IdxError::Kind::checksum, "checksum mismatch for " + images_path);
    }
    if (!checksums->labels_sha256.empty() && sha256_file(labels_path) != checksums->labels_sha256) {
      throw IdxError(IdxError::Kind::checksum, "checksum mismatch for " + labels_path);
    }
  }
  auto img = open_gz(images_path, "rb");
  if (read_be32(img.get(), images_path) != 0x00000803u) {
    throw IdxError(IdxError::Kind::bad_magic, "bad IDX image magic in " + images_path);
  }
  const std::uint32_t n = read_be32(img.get(), images_path);
  const std::uint32_t h = read_be32(img.get(), images_path);
  const std::uint32_t w = read_be32(img.get(), images_path);

  auto lab = open_gz(labels_path, "rb");
  if (read_be32(lab.get(), labels_path) != 0x00000801u) {
    throw IdxError(IdxError::Kind::bad_magic, "bad IDX label magic in " + labels_path);
  }
  const std::uint32_t n_labels = read_be32(lab.get(), labels_path);
  if (n_labels != n) {
    throw IdxError(IdxError::Kind::count_mismatch, "image/label count mismatch: " + std::to_string(n) +
                                                       " images vs " + std::to_string(n_labels) + " labels");
  }

  const std::size_t pixels = std::size_t{h} * w;
  std::vector<unsigned char> buf(pixels);
  Dataset out;
  out.features.resize(n, static_cast<Index>(pixels));
  for (std::uint32_t i = 0; i < n; ++i) {
    if (gzread(img.get(), buf.data(), static_cast<unsigned>(pixels)) != static_cast<int>(pixels)) {
      throw IdxError(IdxError::Kind::truncated, "truncated IDX image payload in " + images_path);
    }
    for (std::size_t p = 0; p < pixels; ++p) out.features(i, static_cast<Index>(p)) = buf[p] / 255.0;
  }
  std::vector<unsigned char> lbuf(n);
  if (n > 0 && gzread(lab.get(), lbuf.data(), n) != static_cast<int>(n)) {
    throw IdxError(IdxError::Kind::truncated, "truncated IDX label payload in " + labels_path);
  }
  out.set_eval_labels(std::vector<double>(lbuf.begin(), lbuf.end()));
  return out;
}

void write_idx(const std::string& images_path, const std::string& labels_path, const MatrixXd& pixels,
               std::span<const int> labels, Index height, Index width) {
  if (pixels.cols() != height * width || static_cast<Index>(labels.size()) != pixels.rows()) {
    throw std::invalid_argument("write_idx: shape mismatch");
  }
  auto img = open_gz(images_path, ends_with(images_path, ".gz") ? "wb9" : "wbT");
  write_be32(img.get(), 0x00000803u);
  write_be32(img.get(), static_cast<std::uint32_t>(pixels.rows()));
  write_be32(img.get(), static_cast<std::uint32_t>(height));
  write_be32(img.get(), static_cast<std::uint32_t>(width));
  std::vector<unsigned char> buf(static_cast<std::size_t>(pixels.cols()));
  for (Index i = 0; i < pixels.rows(); ++i) {
    for (Index p = 0; p < pixels.cols(); ++p) {
      buf[static_cast<std::size_t>(p)] =
          static_cast<unsigned char>(std::lround(std::clamp(pixels(i, p), 0.0, 1.0) * 255.0));
    }
    gzwrite(img.get(), buf.data(), static_cast<unsigned>(buf.size()));
  }
  auto lab = open_gz(labels_path, ends_with(labels_path, ".gz") ? "wb9" : "wbT");
  write_be32(lab.get(), 0x00000801u);
  write_be32(lab.get(), static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) {
    const auto b = static_cast<unsigned char>(l);
    gzwrite(lab.get(), &b, 1);
  }
}

// ----- tabular ---------------------------------------------------------------

namespace {

ColumnRole parse_role(const std::string& s) {
  if (s == "feature") return ColumnRole::feature;
  if (s == "side") return ColumnRole::side;
  if (s == "eval_label") return ColumnRole::eval_label;
  if (s == "drop") return ColumnRole::drop;
  throw ConfigError("unknown column role '" + s + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delim)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "NA" || cell == "?"; }

}  // namespace

Schema Schema::parse_file(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot parse schema " + path + ": " + e.what());
  }
  Schema schema;
  if (auto opts = tree.get_child_optional("options")) {
    const std::string delim = opts->get<std::string>("delimiter", ",");
    schema.delimiter = delim == "tab" ? '\t' : (delim == "semicolon" ? ';' : delim.empty() ? ',' : delim[0]);
    schema.default_role = parse_role(opts->get<std::string>("default", "feature"));
    const std::string kind = opts->get<std::string>("side_kind", "continuous");
    if (kind == "categorical") {
      schema.side_kind = SideInfo::Kind::categorical;
    } else if (kind == "continuous") {
      schema.side_kind = SideInfo::Kind::continuous;
    } else {
      throw ConfigError("schema side_kind must be categorical or continuous");
    }
  }
  if (auto cols = tree.get_child_optional("columns")) {
    for (const auto& [name, value] : *cols) schema.roles[name] = parse_role(value.get_value<std::string>());
  }
  return schema;
}

Dataset load_tabular_csv(const std::string& path, const Schema& schema, CsvLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw DataError("empty CSV file: " + path);
  const std::vector<std::string> header = split_line(line, schema.delimiter);

  for (const auto& [name, role] : schema.roles) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw DataError("column '" + name + "' named in the schema is missing from " + path);
    }
  }
  std::vector<ColumnRole> roles;
  std::vector<std::size_t> feature_cols;
  std::optional<std::size_t> side_col, label_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto it = schema.roles.find(header[c]);
    const ColumnRole role = it == schema.roles.end() ? schema.default_role : it->second;
    roles.push_back(role);
    if (role == ColumnRole::feature) feature_cols.push_back(c);
    if (role == ColumnRole::side) {
      if (side_col) throw ConfigError("schema assigns more than one side column");
      side_col = c;
    }
    if (role == ColumnRole::eval_label) {
      if (label_col) throw ConfigError("schema assigns more than one eval_label column");
      label_col = c;
    }
  }
  if (feature_cols.empty()) throw ConfigError("schema selects no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<double> side_values, labels;
  CsvLoadReport local;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line, schema.delimiter);
    if (cells.size() != header.size()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    bool missing = false;
    std::vector<double> parsed(cells.size(), 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (roles[c] == ColumnRole::drop) continue;
      if (is_missing(cells[c])) {
        missing = true;
        continue;
      }
      const std::string& cell = cells[c];
      double v = 0.0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw DataError(path + ":" + std::to_string(line_no) + ": non-numeric cell '" + cell + "' in column '" +
                        header[c] + "'");
      }
      parsed[c] = v;
    }
    if (missing) {
      ++local.rows_dropped_missing;
      continue;
    }
    std::vector<double> feat;
    feat.reserve(feature_cols.size());
    for (std::size_t c : feature_cols) feat.push_back(parsed[c]);
    rows.push_back(std::move(feat));
    if (side_col) side_values.push_back(parsed[*side_col]);
    if (label_col) labels.push_back(parsed[*label_col]);
  }
  if (rows.empty()) throw DataError("no usable rows in " + path);

  // Drop constant feature columns.
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < feature_cols.size(); ++j) {
    bool constant = true;
    for (const auto& r : rows) {
      if (r[j] != rows.front()[j]) {
        constant = false;
        break;
      }
    }
    if (constant) {
      local.constant_columns_dropped.push_back(header[feature_cols[j]]);
      std::cerr << "warning: dropping constant feature column '" << header[feature_cols[j]] << "'\n";
    } else {
      keep.push_back(j);
    }
  }
  if (keep.empty()) throw DataError("every feature column in " + path + " is constant");

  Dataset out;
  out.features.resize(static_cast<Index>(rows.size()), static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) out.features(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][keep[j]];
  for (std::size_t j : keep) out.feature_names.push_back(header[feature_cols[j]]);
  if (side_col) {
    if (schema.side_kind == SideInfo::Kind::categorical) {
      std::vector<int> ids;
      int k = 0;
      for (double v : side_values) {
        if (v < 0 || v != std::floor(v)) throw DataError("categorical side column must hold non-negative integers");
        ids.push_back(static_cast<int>(v));
        k = std::max(k, static_cast<int>(v) + 1);
      }
      out.side = SideInfo::categorical(std::move(ids), k);
    } else {
      out.side = SideInfo::continuous(std::move(side_values));
    }
  }
  if (label_col) out.set_eval_labels(std::move(labels));
  if (local.rows_dropped_missing > 0) {
    std::cerr << "note: dropped " << local.rows_dropped_missing << " rows with missing values from " << path << "\n";
  }
  if (report) *report = local;
  return out;
}

// ----- side-information maps -------------------------------------------------

SideInfo side_map(std::span<const int> labels, SideMapKind kind, const std::map<int, int>& table) {
  std::vector<int> ids;
  ids.reserve(labels.size());
  int num_classes = 0;
  for (int l : labels) {
    int s = 0;
    if (kind == SideMapKind::custom) {
      auto it = table.find(l);
      if (it == table.end()) throw std::invalid_argument("side_map: label " + std::to_string(l) + " not in table");
      s = it->second;
    } else {
      if (l < 0 || l > 9) throw std::invalid_argument("side_map: label " + std::to_string(l) + " outside 0..9");
      switch (kind) {
        case SideMapKind::pure: s = l; break;
        case SideMapKind::pairs: s = l / 2; break;
        case SideMapKind::heterogeneous: s = l <= 3 ? 0 : l <= 6 ? 1 : l <= 8 ? 2 : 3; break;
        case SideMapKind::custom: break;
      }
    }
    ids.push_back(s);
  }
  switch (kind) {
    case SideMapKind::pure: num_classes = 10; break;
    case SideMapKind::pairs: num_classes = 5; break;
    case SideMapKind::heterogeneous: num_classes = 4; break;
    case SideMapKind::custom:
      for (const auto& [from, to] : table) {
        if (to < 0) throw std::invalid_argument("side_map: negative target class");
        num_classes = std::max(num_classes, to + 1);
      }
      break;
  }
  return SideInfo::categorical(std::move(ids), num_classes);
}

SideMapKind parse_side_map(const std::string& name) {
  if (name == "pure") return SideMapKind::pure;
  if (name == "pairs") return SideMapKind::pairs;
  if (name == "heterogeneous") return SideMapKind::heterogeneous;
  if (name == "custom") return SideMapKind::custom;
  throw ConfigError("unknown side map '" + name + "'");
}

std::string to_string(SideMapKind kind) {
  switch (kind) {
    case SideMapKind::pure: return "pure";
    case SideMapKind::pairs: return "pairs";
    case SideMapKind::heterogeneous: return "heterogeneous";
    case SideMapKind::custom: return "custom";
  }
  return "pure";
}

// ----- fixtures and splits ---------------------------------------------------

Dataset make_blobs(Index n_per_class, Index n_classes, Index dim, double spread, std::uint64_t seed) {
  if (n_per_class < 1 || n_classes < 1 || dim < 1 || spread < 0) {
    throw std::invalid_argument("make_blobs: counts must be positive and spread >= 0");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset out;
  out.features.resize(n_per_class * n_classes, dim);
  std::vector<int> ids;
  std::vector<double> labels;
  for (Index k = 0; k < n_classes; ++k) {
    VectorXd center = VectorXd::Zero(dim);
    if (dim == 1) {
      center[0] = 4.0 * static_cast<double>(k);
    } else {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_classes);
      center[0] = 4.0 * std::cos(angle);
      center[1] = 4.0 * std::sin(angle);
    }
    for (Index i = 0; i < n_per_class; ++i) {
      const Index row = k * n_per_class + i;
      for (Index j = 0; j < dim; ++j) out.features(row, j) = center[j] + spread * normal(rng);
      ids.push_back(static_cast<int>(k));
      labels.push_back(static_cast<double>(k));
    }
  }
  out.side = SideInfo::categorical(std::move(ids), static_cast<int>(n_classes));
  out.set_eval_labels(std::move(labels));
  for (Index j = 0; j < dim; ++j) out.feature_names.push_back("x" + std::to_string(j));
  return out;
}

Standardizer Standardizer::fit(const MatrixXd& x) {
  if (x.rows() < 1) throw std::invalid_argument("Standardizer::fit: empty matrix");
  Standardizer s;
  s.mean = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean[j]).square().mean();
    // Constant columns are left centered but unscaled.
    s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

MatrixXd Standardizer::apply(const MatrixXd& x) const {
  if (x.cols() != mean.size()) throw std::invalid_argument("Standardizer::apply: column count mismatch");
  return ((x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array()).matrix();
}

std::vector<Index> split_permutation(Index n, std::uint64_t seed) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

SplitResult split(const Dataset& data, std::span<const double> fractions, std::uint64_t seed, bool standardize) {
  if (fractions.empty() || fractions.size() > 2) throw std::invalid_argument("split: give one or two fractions");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw std::invalid_argument("split: fractions must be positive");
    total += f;
  }
  if (total > 1.0 + 1e-12) throw std::invalid_argument("split: fractions sum to more than 1");
  const Index n = data.rows();
  const auto order = split_permutation(n, seed);
  const Index n_train = static_cast<Index>(std::llround(fractions[0] * static_cast<double>(n)));
  const Index n_test = fractions.size() == 2
                           ? std::min<Index>(n - n_train, static_cast<Index>(std::llround(fractions[1] * static_cast<double>(n))))
                           : n - n_train;
  if (n_train == 0) throw std::invalid_argument("split: train split is empty");
  if (fractions.size() == 2 && n_test == 0) throw std::invalid_argument("split: test split is empty");

  SplitResult out;
  const std::span<const Index> all(order);
  out.train = data.select(all.subspan(0, static_cast<std::size_t>(n_train)));
  out.test = data.select(all.subspan(static_cast<std::size_t>(n_train), static_cast<std::size_t>(n_test)));
  out.train.split_tag = "train";
  out.test.split_tag = "test";
  if (standardize) {
    out.standardizer = Standardizer::fit(out.train.features);
    out.train.features = out.standardizer->apply(out.train.features);
    if (out.test.rows() > 0) out.test.features = out.standardizer->apply(out.test.features);
  }
  return out;
}

// ----- quantile bins ---------------------------------------------------------

std::vector<double> quantile_bin_edges(std::span<const double> values, int n_bins) {
  if (n_bins < 2) throw std::invalid_argument("quantile_bin_edges: n_bins must be >= 2");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted)
    if (!std::isfinite(v)) throw std::invalid_argument("quantile_bin_edges: non-finite value");
  std::sort(sorted.begin(), sorted.end());
  std::set<double> uniq(sorted.begin(), sorted.end());
  if (uniq.size() < 2) throw std::invalid_argument("quantile_bin_edges: all values are identical");
  if (static_cast<std::size_t>(n_bins) > uniq.size()) {
    throw std::invalid_argument("quantile_bin_edges: more bins than distinct values");
  }
  const std::size_t n = sorted.size();
  std::vector<double> edges;
  for (int j = 1; j < n_bins; ++j) {
    const std::size_t rank = (static_cast<std::size_t>(j) * n + static_cast<std::size_t>(n_bins) - 1) / static_cast<std::size_t>(n_bins);
    edges.push_back(sorted[rank - 1]);
  }
  return edges;
}

std::vector<int> assign_quantile_bins(std::span<const double> values, std::span<const double> edges) {
  std::vector<int> bins;
  bins.reserve(values.size());
  for (double v : values) {
    const auto it = std::lower_bound(edges.begin(), edges.end(), v);
    bins.push_back(static_cast<int>(it - edges.begin()));
  }
  return bins;
}

}  // namespace sidescore
