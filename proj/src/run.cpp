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

#include "sidescore/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace sidescore {
namespace {

Dataset with_side_map(Dataset data, const DataConfig& cfg) {
  if (!cfg.side_info) return data;
  const auto& labels = eval::eval_labels(data);
  std::vector<int> ids(labels.begin(), labels.end());
  data.side = side_map(ids, cfg.side_map);
  return data;
}

Dataset first_rows(const Dataset& data, Index n) {
  if (n <= 0 || n >= data.rows()) return data;
  std::vector<Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Index(0));
  return data.select(rows);
}

std::optional<IdxChecksums> checksums(const std::string& images, const std::string& labels) {
  if (images.empty() && labels.empty()) return std::nullopt;
  return IdxChecksums{images, labels};
}

// Equal number of revealed labels per class; leftovers go to the lowest
// class ids. Rows are chosen by a seeded shuffle within each class.
std::vector<int> reveal_balanced(const Dataset& train, Index count, std::uint64_t seed) {
  const auto& labels = eval::eval_labels(train);
  std::map<int, std::vector<Index>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<int>(labels[i])].push_back(static_cast<Index>(i));
  std::mt19937_64 rng(seed ^ 0x72657665616cULL);
  const Index k = static_cast<Index>(by_class.size());
  std::vector<Index> chosen;
  Index c = 0;
  for (auto& [cls, rows] : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    const Index take = std::min<Index>(count / k + (c < count % k ? 1 : 0), static_cast<Index>(rows.size()));
    chosen.insert(chosen.end(), rows.begin(), rows.begin() + take);
    ++c;
  }
  return eval::reveal_labels(train, chosen);
}

std::string idx_labels_path(const std::string& images) {
  std::string out = images;
  const std::string from = "images-idx3", to = "labels-idx1";
  const auto pos = out.find(from);
  if (pos == std::string::npos) throw DataError("cannot infer the labels file for " + images);
  return out.replace(pos, from.size(), to);
}

template <typename Scalar>
RunOutput train_in(const RunConfig& resolved, PreparedData data, const EpochCallback& on_epoch) {
  TrainingView view = training_view(data.train);
  view.labels = data.revealed_labels;
  auto result = train_view<Scalar>(resolved.model, view, resolved.train, on_epoch);
  RunOutput out;
  out.resolved = resolved;
  out.history = std::move(result.history);
  out.checkpoint.manifest = resolved.to_ini();
  export_parameters(result.model, out.checkpoint);
  LoadedModel loaded(std::move(result.model), resolved);
  if (data.standardizer) {
    out.checkpoint.put("standardizer.mean", data.standardizer->mean);
    out.checkpoint.put("standardizer.scale", data.standardizer->scale);
  }
  const auto rank = score_alignment(loaded, data.train);
  MatrixXd r(1, static_cast<Index>(rank.size()));
  for (std::size_t k = 0; k < rank.size(); ++k) r(0, static_cast<Index>(k)) = rank[k];
  out.checkpoint.put("alignment.rank", r);
  out.data = std::move(data);
  return out;
}

std::string fixed(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

PreparedData prepare_data(const DataConfig& cfg) {
  PreparedData out;
  const std::vector<double> fractions = {cfg.train_fraction};
  switch (cfg.source) {
    case DataSource::blobs: {
      Dataset all = make_blobs(cfg.blob_per_class, cfg.blob_classes, cfg.blob_dim, cfg.blob_spread, cfg.blob_seed);
      if (!cfg.side_info) all.side.reset();
      auto parts = split(all, fractions, cfg.split_seed, cfg.standardize);
      out.train = std::move(parts.train);
      out.test = std::move(parts.test);
      out.standardizer = std::move(parts.standardizer);
      break;
    }
    case DataSource::idx: {
      if (cfg.images.empty() || cfg.labels.empty()) throw ConfigError("[data] idx source needs images and labels");
      for (const auto& p : {cfg.images, cfg.labels, cfg.test_images, cfg.test_labels}) {
        if (!p.empty() && !std::filesystem::exists(p)) throw DataError("data file not found: " + p);
      }
      Dataset train = first_rows(load_idx(cfg.images, cfg.labels, checksums(cfg.images_sha256, cfg.labels_sha256)),
                                 cfg.limit);
      train = with_side_map(std::move(train), cfg);
      if (!cfg.test_images.empty()) {
        if (cfg.test_labels.empty()) throw ConfigError("[data] test_images needs test_labels");
        out.train = std::move(train);
        out.train.split_tag = "train";
        out.test = with_side_map(
            load_idx(cfg.test_images, cfg.test_labels, checksums(cfg.test_images_sha256, cfg.test_labels_sha256)), cfg);
        out.test.split_tag = "test";
      } else {
        auto parts = split(train, fractions, cfg.split_seed, false);
        out.train = std::move(parts.train);
        out.test = std::move(parts.test);
      }
      break;
    }
    case DataSource::csv: {
      if (cfg.csv.empty() || cfg.schema.empty()) throw ConfigError("[data] csv source needs csv and schema");
      if (!std::filesystem::exists(cfg.csv)) throw DataError("data file not found: " + cfg.csv);
      const Schema schema = Schema::parse_file(cfg.schema);
      Dataset all = load_tabular_csv(cfg.csv, schema, &out.csv_report);
      if (!cfg.side_info) all.side.reset();
      auto parts = split(all, fractions, cfg.split_seed, cfg.standardize);
      out.train = std::move(parts.train);
      out.test = std::move(parts.test);
      out.standardizer = std::move(parts.standardizer);
      break;
    }
  }
  if (cfg.labeled > 0) out.revealed_labels = reveal_balanced(out.train, cfg.labeled, cfg.split_seed);
  return out;
}

Dataset load_eval_data(const std::string& path, const std::string& schema_path, const RunConfig& cfg,
                       const std::optional<Standardizer>& standardizer) {
  Dataset data;
  if (path == "blobs") {
    data = prepare_data(cfg.data).test;
    return data;  // already standardized by prepare_data
  }
  if (!std::filesystem::exists(path)) throw DataError("data file not found: " + path);
  const bool is_idx = path.find("idx3") != std::string::npos;
  if (is_idx) {
    data = with_side_map(load_idx(path, idx_labels_path(path)), cfg.data);
  } else {
    const std::string schema = schema_path.empty() ? cfg.data.schema : schema_path;
    if (schema.empty()) throw ConfigError("a CSV data file needs --schema");
    data = load_tabular_csv(path, Schema::parse_file(schema));
    if (standardizer) {
      if (standardizer->mean.size() != data.features.cols()) {
        throw DataError("data has " + std::to_string(data.features.cols()) + " features, the model was trained on " +
                        std::to_string(standardizer->mean.size()));
      }
      data.features = standardizer->apply(data.features);
    }
    if (!cfg.data.side_info) data.side.reset();
  }
  return data;
}

ModelSpec resolve_spec(const ModelSpec& requested, const Dataset& train) {
  ModelSpec spec = requested;
  spec.input_dim = train.features.cols();
  if (!train.side) {
    spec.side_kind = SideKind::none;
    spec.side_classes = 0;
  } else if (train.side->kind == SideInfo::Kind::categorical) {
    spec.side_kind = SideKind::categorical;
    spec.side_classes = train.side->num_classes;
  } else {
    spec.side_kind = SideKind::continuous;
    spec.side_classes = 0;
  }
  if (spec.n_score_classes == 0) spec.n_score_classes = spec.side_kind == SideKind::categorical ? spec.side_classes : 10;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

// ----- LoadedModel -------------------------------------------------------------

LoadedModel LoadedModel::from_checkpoint(const Checkpoint& ck) {
  RunConfig cfg = RunConfig::parse_string(ck.manifest);
  auto build = [&](auto tag) {
    using Scalar = decltype(tag);
    Model<Scalar> m(cfg.model);
    import_parameters(m, ck);
    return LoadedModel(std::move(m), cfg);
  };
  LoadedModel out = cfg.precision == Precision::single ? build(float{}) : build(double{});
  const MatrixXd* mean = ck.find("standardizer.mean");
  const MatrixXd* scale = ck.find("standardizer.scale");
  if (mean && scale) out.standardizer = Standardizer{*mean, *scale};
  if (const MatrixXd* rank = ck.find("alignment.rank")) {
    for (Index k = 0; k < rank->cols(); ++k) out.score_rank.push_back(static_cast<int>((*rank)(0, k)));
  }
  return out;
}

const ModelSpec& LoadedModel::spec() const {
  return std::visit([](const auto& m) -> const ModelSpec& { return m.spec(); }, model_);
}

GaussianBatch<double> LoadedModel::encode(const MatrixXd& x) const {
  return std::visit(
      [&](const auto& m) {
        using Scalar = typename std::decay_t<decltype(m)>::Mat::Scalar;
        const auto post = m.encode(x.template cast<Scalar>().eval());
        return GaussianBatch<double>{post.mean.template cast<double>(), post.var.template cast<double>()};
      },
      model_);
}

MatrixXd LoadedModel::predict_score(const MatrixXd& z) const {
  return std::visit(
      [&](const auto& m) -> MatrixXd {
        using Scalar = typename std::decay_t<decltype(m)>::Mat::Scalar;
        return m.predict_score(z.template cast<Scalar>().eval()).template cast<double>();
      },
      model_);
}

MatrixXd LoadedModel::predict_side(const MatrixXd& z) const {
  return std::visit(
      [&](const auto& m) -> MatrixXd {
        using Scalar = typename std::decay_t<decltype(m)>::Mat::Scalar;
        return m.predict_side(z.template cast<Scalar>().eval()).template cast<double>();
      },
      model_);
}

// ----- training ----------------------------------------------------------------

RunOutput run_training(const RunConfig& cfg, const EpochCallback& on_epoch) {
  PreparedData data = prepare_data(cfg.data);
  RunConfig resolved = cfg;
  resolved.model.input_kind = cfg.data.source == DataSource::idx ? InputKind::image_28x28 : InputKind::tabular;
  resolved.model = resolve_spec(resolved.model, data.train);
  resolved.train.augment.kind = resolved.model.input_kind == InputKind::image_28x28 ? AugmentKind::image_shift_rotate
                                                                                   : AugmentKind::tabular_jitter;
  if (resolved.precision == Precision::single) return train_in<float>(resolved, std::move(data), on_epoch);
  return train_in<double>(resolved, std::move(data), on_epoch);
}

std::vector<int> score_alignment(const LoadedModel& model, const Dataset& train) {
  const Index k = model.spec().n_score_classes;
  std::vector<int> identity(static_cast<std::size_t>(k));
  std::iota(identity.begin(), identity.end(), 0);
  if (!train.side || train.rows() == 0) return identity;
  const MatrixXd probs = model.predict_score(model.embed(train.features));
  const auto hard = hard_assignments(probs);
  return eval::align_score_order(hard, train.side->values, static_cast<int>(k), &probs).rank_of_class;
}

// ----- evaluation --------------------------------------------------------------

namespace eval {

Report evaluate_model(const LoadedModel& model, const Dataset& data) {
  if (!data.has_eval_labels()) throw DataError("evaluation needs labels on the data");
  const auto& labels = eval_labels(data);
  const ModelSpec& spec = model.spec();
  const int k = static_cast<int>(spec.n_score_classes);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  const MatrixXd z = model.embed(data.features);
  const MatrixXd probs = model.predict_score(z);
  const std::vector<int> hard = hard_assignments(probs);
  std::vector<int> rank = model.score_rank;
  if (static_cast<int>(rank.size()) != k) {
    rank.resize(static_cast<std::size_t>(k));
    std::iota(rank.begin(), rank.end(), 0);
  }

  const bool categorical_labels = model.config().data.source != DataSource::csv;
  std::vector<int> truth(labels.size());
  if (categorical_labels) {
    for (std::size_t i = 0; i < labels.size(); ++i) truth[i] = static_cast<int>(labels[i]);
  } else {
    truth = assign_quantile_bins(labels, quantile_bin_edges(labels, k));
  }

  std::vector<double> aligned(hard.size()), raw(hard.size());
  std::size_t direct = 0;
  for (std::size_t i = 0; i < hard.size(); ++i) {
    raw[i] = hard[i];
    aligned[i] = rank[static_cast<std::size_t>(hard[i])];
    const int guess = categorical_labels ? hard[i] : rank[static_cast<std::size_t>(hard[i])];
    direct += guess == truth[i];
  }

  Report r;
  r.set("rows", static_cast<double>(data.rows()));
  r.set("score_classes", static_cast<double>(k));
  r.set("label_kind", categorical_labels ? "categorical" : "quantile_bins");
  r.set("cluster_accuracy", cluster_accuracy(hard, truth));
  r.set("direct_accuracy", static_cast<double>(direct) / static_cast<double>(hard.size()));
  Correlation corr{nan, nan};
  double raw_r = nan;
  try {
    corr = pearson_r(aligned, labels);
    raw_r = std::abs(pearson_r(raw, labels).r);
  } catch (const std::invalid_argument&) {
    // a constant score has no correlation
  }
  r.set("pearson_r", corr.r);
  r.set("pearson_p", corr.p_value);
  r.set("raw_abs_pearson_r", raw_r);

  double side_acc = nan, side_nll = nan, side_only = nan, side_r = nan;
  if (model.has_side_head() && data.side) {
    const MatrixXd sp = model.predict_side(z);
    const SideInfo& side = *data.side;
    if (side.kind == SideInfo::Kind::categorical) {
      const auto cls = side.classes();
      const auto pred = hard_assignments(sp);
      std::size_t hit = 0;
      double nll = 0.0;
      for (std::size_t i = 0; i < cls.size(); ++i) {
        hit += pred[i] == cls[i];
        nll -= std::log(std::max(sp(static_cast<Index>(i), cls[i]), std::numeric_limits<double>::min()));
      }
      side_acc = static_cast<double>(hit) / static_cast<double>(cls.size());
      side_nll = nll / static_cast<double>(cls.size());
      side_only = cluster_accuracy(cls, truth);
    } else {
      double nll = 0.0;
      for (std::size_t i = 0; i < side.size(); ++i) nll += sidescore::side_nll(sp(static_cast<Index>(i), 0), sp(static_cast<Index>(i), 1), side.values[i]);
      side_nll = nll / static_cast<double>(side.size());
      try {
        std::vector<double> mean(sp.col(0).data(), sp.col(0).data() + sp.rows());
        side_r = pearson_r(mean, side.values).r;
      } catch (const std::invalid_argument&) {
      }
    }
  }
  r.set("side_accuracy", side_acc);
  r.set("side_nll", side_nll);
  r.set("side_only_cluster_accuracy", side_only);
  r.set("side_pearson_r", side_r);
  return r;
}

}  // namespace eval

std::string history_table(const TrainHistory& history) {
  std::ostringstream o;
  o << "epoch,recon,prior_kl,triplet,side,score,labeled,total,triplets,triplet_shortfall\n";
  for (const auto& e : history.epochs) {
    const auto& l = e.loss;
    o << e.epoch << ',' << fixed(l.recon) << ',' << fixed(l.prior_kl) << ',' << fixed(l.triplet) << ','
      << fixed(l.side) << ',' << fixed(l.score) << ',' << fixed(l.labeled) << ',' << fixed(l.total) << ','
      << e.triplets << ',' << e.triplet_shortfall << '\n';
  }
  return o.str();
}

std::string timing_table(const TrainHistory& history) {
  std::ostringstream o;
  o << "epoch,seconds\n";
  for (const auto& e : history.epochs) o << e.epoch << ',' << e.seconds << '\n';
  return o.str();
}

}  // namespace sidescore
