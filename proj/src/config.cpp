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

#include "sidescore/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "sidescore/error.hpp"

namespace sidescore {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

// Reads typed values and remembers which keys were used so that leftovers
// (usually typos) can be reported.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <typename T>
  void get(const std::string& section, const std::string& key, T& out) {
    const auto child = tree_.get_child_optional(pt::ptree::path_type(section + "." + key, '.'));
    used_.insert(section + "." + key);
    if (!child) return;
    const std::string raw = trim(child->get_value<std::string>());
    try {
      out = convert<T>(raw);
    } catch (const ConfigError& e) {
      throw ConfigError("[" + section + "] " + key + ": " + e.what());
    }
  }

  void check_unused() const {
    static const std::set<std::string> sections = {"data", "model", "train", "weights", "output"};
    for (const auto& [section, body] : tree_) {
      if (!sections.count(section)) throw ConfigError("unknown config section [" + section + "]");
      for (const auto& [key, value] : body) {
        if (!used_.count(section + "." + key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

 private:
  template <typename T>
  static T convert(const std::string& raw);

  const pt::ptree& tree_;
  std::set<std::string> used_;
};

double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("not a number: '" + s + "'");
  }
}

long long parse_integer(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

template <>
std::string Reader::convert<std::string>(const std::string& raw) { return raw; }
template <>
double Reader::convert<double>(const std::string& raw) { return parse_double(raw); }
template <>
int Reader::convert<int>(const std::string& raw) { return static_cast<int>(parse_integer(raw)); }
template <>
long Reader::convert<long>(const std::string& raw) { return static_cast<long>(parse_integer(raw)); }
template <>
std::uint64_t Reader::convert<std::uint64_t>(const std::string& raw) {
  const long long v = parse_integer(raw);
  if (v < 0) throw ConfigError("must be >= 0");
  return static_cast<std::uint64_t>(v);
}
template <>
bool Reader::convert<bool>(const std::string& raw) {
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw ConfigError("expected true or false, got '" + raw + "'");
}
template <>
std::vector<Index> Reader::convert<std::vector<Index>>(const std::string& raw) {
  std::vector<Index> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<Index>(parse_integer(item)));
  }
  return out;
}
template <>
DataSource Reader::convert<DataSource>(const std::string& raw) {
  if (raw == "blobs") return DataSource::blobs;
  if (raw == "idx") return DataSource::idx;
  if (raw == "csv") return DataSource::csv;
  throw ConfigError("source must be blobs, idx or csv");
}
template <>
SideMapKind Reader::convert<SideMapKind>(const std::string& raw) {
  try {
    return parse_side_map(raw);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}
template <>
TripletRegime Reader::convert<TripletRegime>(const std::string& raw) {
  if (raw == "by_class") return TripletRegime::by_class;
  if (raw == "by_quantile") return TripletRegime::by_quantile;
  if (raw == "self_supervised") return TripletRegime::self_supervised;
  if (raw == "off") return TripletRegime::off;
  throw ConfigError("triplets must be by_class, by_quantile, self_supervised or off");
}
template <>
TripletReduction Reader::convert<TripletReduction>(const std::string& raw) {
  if (raw == "sum") return TripletReduction::sum;
  if (raw == "mean") return TripletReduction::mean;
  throw ConfigError("reduction must be sum or mean");
}
template <>
nn::Activation Reader::convert<nn::Activation>(const std::string& raw) {
  if (raw == "relu") return nn::Activation::relu;
  if (raw == "elu") return nn::Activation::elu;
  if (raw == "tanh") return nn::Activation::tanh;
  throw ConfigError("activation must be relu, elu or tanh");
}
template <>
Precision Reader::convert<Precision>(const std::string& raw) {
  if (raw == "float" || raw == "single") return Precision::single;
  if (raw == "double") return Precision::double_;
  throw ConfigError("precision must be float or double");
}
template <>
InputKind Reader::convert<InputKind>(const std::string& raw) {
  if (raw == "tabular") return InputKind::tabular;
  if (raw == "image_28x28") return InputKind::image_28x28;
  throw ConfigError("input_kind must be tabular or image_28x28");
}
template <>
SideKind Reader::convert<SideKind>(const std::string& raw) {
  if (raw == "none") return SideKind::none;
  if (raw == "categorical") return SideKind::categorical;
  if (raw == "continuous") return SideKind::continuous;
  throw ConfigError("side_kind must be none, categorical or continuous");
}

RunConfig from_tree(const pt::ptree& tree) {
  RunConfig c;
  Reader r(tree);
  DataConfig& d = c.data;
  r.get("data", "source", d.source);
  r.get("data", "images", d.images);
  r.get("data", "labels", d.labels);
  r.get("data", "test_images", d.test_images);
  r.get("data", "test_labels", d.test_labels);
  r.get("data", "images_sha256", d.images_sha256);
  r.get("data", "labels_sha256", d.labels_sha256);
  r.get("data", "test_images_sha256", d.test_images_sha256);
  r.get("data", "test_labels_sha256", d.test_labels_sha256);
  r.get("data", "side_map", d.side_map);
  r.get("data", "side_info", d.side_info);
  r.get("data", "limit", d.limit);
  r.get("data", "csv", d.csv);
  r.get("data", "schema", d.schema);
  r.get("data", "blob_per_class", d.blob_per_class);
  r.get("data", "blob_classes", d.blob_classes);
  r.get("data", "blob_dim", d.blob_dim);
  r.get("data", "blob_spread", d.blob_spread);
  r.get("data", "blob_seed", d.blob_seed);
  r.get("data", "train_fraction", d.train_fraction);
  r.get("data", "split_seed", d.split_seed);
  r.get("data", "standardize", d.standardize);
  r.get("data", "labeled", d.labeled);

  ModelSpec& m = c.model;
  m.n_score_classes = 0;  // resolved from the data unless set
  r.get("model", "input_kind", m.input_kind);
  r.get("model", "input_dim", m.input_dim);
  r.get("model", "latent_dim", m.latent_dim);
  r.get("model", "hidden_layers", m.hidden_layers);
  r.get("model", "n_score_classes", m.n_score_classes);
  r.get("model", "side_kind", m.side_kind);
  r.get("model", "side_classes", m.side_classes);
  r.get("model", "head_hidden", m.head_hidden);
  r.get("model", "conv_channels", m.conv_channels);
  r.get("model", "activation", m.activation);

  TrainConfig& t = c.train;
  r.get("train", "epochs", t.epochs);
  r.get("train", "batch_size", t.batch_size);
  r.get("train", "learning_rate", t.learning_rate);
  r.get("train", "seed", t.seed);
  r.get("train", "triplets", t.regime);
  long n_triplets = static_cast<long>(t.n_triplets);
  r.get("train", "n_triplets", n_triplets);
  if (n_triplets < 0) throw ConfigError("[train] n_triplets must be >= 0");
  t.n_triplets = static_cast<std::size_t>(n_triplets);
  r.get("train", "quantile_bins", t.quantile_bins);
  r.get("train", "reduction", t.reduction);
  r.get("train", "augment_strength", t.augment.strength);
  r.get("train", "augment_shift_px", t.augment.max_shift_px);
  r.get("train", "augment_rotation_deg", t.augment.max_rotation_deg);
  r.get("train", "jitter_fraction", t.augment.jitter_fraction);
  r.get("train", "labeled_batch", t.labeled_batch);
  r.get("train", "precision", c.precision);

  LossWeights& w = t.weights;
  r.get("weights", "alpha", w.alpha);
  r.get("weights", "beta", w.beta);
  r.get("weights", "gamma", w.gamma);
  r.get("weights", "delta", w.delta);
  r.get("weights", "zeta", w.zeta);
  r.get("weights", "margin", w.margin);
  r.get("weights", "lambda", w.lambda_skew);
  r.get("weights", "labeled", w.labeled);

  r.get("output", "dir", c.out_dir);
  r.check_unused();

  if (d.blob_per_class < 1 || d.blob_classes < 1 || d.blob_dim < 1) throw ConfigError("[data] blob sizes must be positive");
  if (!(d.train_fraction > 0.0 && d.train_fraction <= 1.0)) throw ConfigError("[data] train_fraction must be in (0, 1]");
  if (d.limit < 0 || d.labeled < 0) throw ConfigError("[data] limit and labeled must be >= 0");
  if (m.latent_dim < 2) throw ConfigError("[model] latent_dim must be >= 2");
  t.validate();
  return c;
}

std::string join(const std::vector<Index>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

RunConfig RunConfig::parse_string(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  return from_tree(tree);
}

std::string to_string(DataSource s) {
  switch (s) {
    case DataSource::blobs: return "blobs";
    case DataSource::idx: return "idx";
    case DataSource::csv: return "csv";
  }
  return "";
}

std::string to_string(Precision p) { return p == Precision::single ? "float" : "double"; }

std::string to_string(TripletRegime r) {
  switch (r) {
    case TripletRegime::by_class: return "by_class";
    case TripletRegime::by_quantile: return "by_quantile";
    case TripletRegime::self_supervised: return "self_supervised";
    case TripletRegime::off: return "off";
  }
  return "";
}

std::string to_string(nn::Activation a) {
  switch (a) {
    case nn::Activation::relu: return "relu";
    case nn::Activation::elu: return "elu";
    case nn::Activation::tanh: return "tanh";
  }
  return "";
}

std::string to_string(InputKind k) { return k == InputKind::tabular ? "tabular" : "image_28x28"; }

std::string to_string(SideKind k) {
  switch (k) {
    case SideKind::none: return "none";
    case SideKind::categorical: return "categorical";
    case SideKind::continuous: return "continuous";
  }
  return "";
}

std::string RunConfig::to_ini() const {
  std::ostringstream o;
  const DataConfig& d = data;
  o << "[data]\n"
    << "source = " << to_string(d.source) << "\n"
    << "images = " << d.images << "\n"
    << "labels = " << d.labels << "\n"
    << "test_images = " << d.test_images << "\n"
    << "test_labels = " << d.test_labels << "\n"
    << "images_sha256 = " << d.images_sha256 << "\n"
    << "labels_sha256 = " << d.labels_sha256 << "\n"
    << "test_images_sha256 = " << d.test_images_sha256 << "\n"
    << "test_labels_sha256 = " << d.test_labels_sha256 << "\n"
    << "side_map = " << to_string(d.side_map) << "\n"
    << "side_info = " << (d.side_info ? "true" : "false") << "\n"
    << "limit = " << d.limit << "\n"
    << "csv = " << d.csv << "\n"
    << "schema = " << d.schema << "\n"
    << "blob_per_class = " << d.blob_per_class << "\n"
    << "blob_classes = " << d.blob_classes << "\n"
    << "blob_dim = " << d.blob_dim << "\n"
    << "blob_spread = " << num(d.blob_spread) << "\n"
    << "blob_seed = " << d.blob_seed << "\n"
    << "train_fraction = " << num(d.train_fraction) << "\n"
    << "split_seed = " << d.split_seed << "\n"
    << "standardize = " << (d.standardize ? "true" : "false") << "\n"
    << "labeled = " << d.labeled << "\n\n";
  const ModelSpec& m = model;
  o << "[model]\n"
    << "input_kind = " << to_string(m.input_kind) << "\n"
    << "input_dim = " << m.input_dim << "\n"
    << "latent_dim = " << m.latent_dim << "\n"
    << "hidden_layers = " << join(m.hidden_layers) << "\n"
    << "n_score_classes = " << m.n_score_classes << "\n"
    << "side_kind = " << to_string(m.side_kind) << "\n"
    << "side_classes = " << m.side_classes << "\n"
    << "head_hidden = " << join(m.head_hidden) << "\n"
    << "conv_channels = " << join(m.conv_channels) << "\n"
    << "activation = " << to_string(m.activation) << "\n"
    << "; dense layers use Glorot-uniform weights and zero biases\n\n";
  const TrainConfig& t = train;
  o << "[train]\n"
    << "; optimizer: Adam (beta1 0.9, beta2 0.999, eps 1e-8)\n"
    << "epochs = " << t.epochs << "\n"
    << "batch_size = " << t.batch_size << "\n"
    << "learning_rate = " << num(t.learning_rate) << "\n"
    << "seed = " << t.seed << "\n"
    << "triplets = " << to_string(t.regime) << "\n"
    << "n_triplets = " << t.n_triplets << "\n"
    << "quantile_bins = " << t.quantile_bins << "\n"
    << "reduction = " << (t.reduction == TripletReduction::sum ? "sum" : "mean") << "\n"
    << "augment_strength = " << num(t.augment.strength) << "\n"
    << "augment_shift_px = " << num(t.augment.max_shift_px) << "\n"
    << "augment_rotation_deg = " << num(t.augment.max_rotation_deg) << "\n"
    << "jitter_fraction = " << num(t.augment.jitter_fraction) << "\n"
    << "labeled_batch = " << t.labeled_batch << "\n"
    << "precision = " << to_string(precision) << "\n\n";
  const LossWeights& w = t.weights;
  o << "[weights]\n"
    << "alpha = " << num(w.alpha) << "\n"
    << "beta = " << num(w.beta) << "\n"
    << "gamma = " << num(w.gamma) << "\n"
    << "delta = " << num(w.delta) << "\n"
    << "zeta = " << num(w.zeta) << "\n"
    << "margin = " << num(w.margin) << "\n"
    << "lambda = " << num(w.lambda_skew) << "\n"
    << "labeled = " << num(w.labeled) << "\n\n";
  o << "[output]\n"
    << "dir = " << out_dir << "\n";
  return o.str();
}

}  // namespace sidescore
