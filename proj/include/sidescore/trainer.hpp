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

#ifndef SIDESCORE_TRAINER_HPP_
#define SIDESCORE_TRAINER_HPP_

// Minibatch training of the full objective with Adam. One latent sample per
// instance per step; the side and score heads read that sample. Every term is
// evaluated each step for the history, but only terms with a positive weight
// are backpropagated.

#include <chrono>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidescore/data.hpp"
#include "sidescore/error.hpp"
#include "sidescore/losses.hpp"
#include "sidescore/model.hpp"
#include "sidescore/triplets.hpp"

namespace sidescore {

enum class TripletRegime { by_class, by_quantile, self_supervised, off };

struct TrainConfig {
  int epochs = 10;
  Index batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  LossWeights weights;
  TripletRegime regime = TripletRegime::by_class;
  std::size_t n_triplets = 0;  // per batch; 0 means the batch size
  int quantile_bins = 4;
  TripletReduction reduction = TripletReduction::sum;
  Augmentation augment;
  Index labeled_batch = 32;  // labeled rows drawn per step in semi-supervised runs

  void validate() const {
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (batch_size < 2) throw ConfigError("train: batch_size must be >= 2");
    if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
    if (quantile_bins < 2) throw ConfigError("train: quantile_bins must be >= 2");
    if (labeled_batch < 1) throw ConfigError("train: labeled_batch must be >= 1");
    try {
      weights.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

struct EpochRecord {
  int epoch = 0;
  LossBreakdown loss;
  std::size_t triplets = 0;
  std::size_t triplet_shortfall = 0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

template <typename Scalar>
struct TrainResult {
  Model<Scalar> model;
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

namespace detail {

template <typename Scalar>
Matrix<Scalar> gather_rows(const MatrixXd& x, std::span<const Index> rows) {
  Matrix<Scalar> out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(rows[i]).template cast<Scalar>();
  return out;
}

template <typename Scalar>
Matrix<Scalar> standard_normal(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix<Scalar> out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = Scalar(normal(rng));
  return out;
}

/// Adds dL/dz into the posterior gradients for z = mean + sqrt(var) * noise.
template <typename Scalar>
void reparam_backward(const GaussianBatch<Scalar>& post, const Matrix<Scalar>& noise, const Matrix<Scalar>& dz,
                      Matrix<Scalar>& d_mean, Matrix<Scalar>& d_var) {
  d_mean += dz;
  d_var.array() += dz.array() * noise.array() * Scalar(0.5) / post.var.array().sqrt();
}

template <typename Scalar>
GaussianBatch<Scalar> stack(const GaussianBatch<Scalar>& a, const GaussianBatch<Scalar>& b) {
  GaussianBatch<Scalar> out;
  out.mean.resize(a.size() + b.size(), a.dim());
  out.var.resize(a.size() + b.size(), a.dim());
  out.mean << a.mean, b.mean;
  out.var << a.var, b.var;
  return out;
}

inline void accumulate(LossParts& into, const LossParts& p) {
  into.recon += p.recon;
  into.prior_kl += p.prior_kl;
  into.triplet += p.triplet;
  into.side += p.side;
  into.score += p.score;
  into.labeled += p.labeled;
}

inline LossParts scaled(const LossParts& p, double s) {
  return {p.recon * s, p.prior_kl * s, p.triplet * s, p.side * s, p.score * s, p.labeled * s};
}

}  // namespace detail

/// One minibatch: features, the reparameterization noise, side targets,
/// triplets, and an optional labeled minibatch.
template <typename Scalar>
struct Batch {
  Matrix<Scalar> x;
  Matrix<Scalar> noise;              // same shape as the latent batch
  std::vector<int> side_classes;     // categorical side targets, or empty
  std::vector<double> side_values;   // continuous side targets, or empty
  std::vector<Triplet> triplets;     // rows of [x; views]
  Matrix<Scalar> views;              // augmented positives, may be empty
  Matrix<Scalar> labeled_x, labeled_noise;
  std::vector<int> labeled_targets;
};

/// Evaluates every loss term on the batch. With `backprop`, gradients of the
/// weighted total are accumulated into the model; terms with weight 0 are
/// not differentiated.
template <typename Scalar>
LossParts batch_objective(Model<Scalar>& model, const Batch<Scalar>& b, const LossWeights& w,
                          TripletReduction reduction, bool backprop) {
  using Mat = Matrix<Scalar>;
  using Tape = typename Model<Scalar>::MlpTape;
  const Index bsize = b.x.rows();
  const Index d = model.spec().latent_dim;
  LossParts parts;

  typename Model<Scalar>::EncoderTape etape;
  const GaussianBatch<Scalar> post = model.encode(b.x, etape);
  const Mat z = sample_latent(post, b.noise);
  Mat d_mean = Mat::Zero(bsize, d), d_var = Mat::Zero(bsize, d), dz = Mat::Zero(bsize, d);
  auto want = [&](double weight) { return backprop && weight > 0.0; };

  {
    Tape tape;
    const Mat logits = model.decoder_logits(z, tape);
    Mat g;
    parts.recon = static_cast<double>(
        reconstruction_term(b.x, logits, model.spec().likelihood(), want(w.alpha) ? &g : nullptr));
    if (want(w.alpha)) dz += model.decoder_backward(tape, Scalar(w.alpha) * g);
  }
  {
    Mat gm, gv;
    parts.prior_kl = static_cast<double>(
        prior_kl_term(post, want(w.beta) ? &gm : nullptr, want(w.beta) ? &gv : nullptr));
    if (want(w.beta)) {
      d_mean += Scalar(w.beta) * gm;
      d_var += Scalar(w.beta) * gv;
    }
  }
  if (model.has_side_head() && (!b.side_classes.empty() || !b.side_values.empty())) {
    Tape tape;
    const Mat raw = model.side_raw(z, tape);
    Mat d_raw;
    if (!b.side_classes.empty()) {
      parts.side = static_cast<double>(categorical_nll_term(raw, b.side_classes, want(w.delta) ? &d_raw : nullptr));
    } else {
      Mat d_pred;
      parts.side = static_cast<double>(
          gaussian_nll_term(model.side_transform(raw), b.side_values, want(w.delta) ? &d_pred : nullptr));
      if (want(w.delta)) d_raw = model.side_transform_backward(raw, d_pred);
    }
    if (want(w.delta)) dz += model.side_backward(tape, Scalar(w.delta) * d_raw);
  }
  {
    Tape tape;
    const Mat logits = model.score_logits(z, tape);
    Mat g;
    parts.score = static_cast<double>(score_mi_term(logits, want(w.zeta) ? &g : nullptr));
    if (want(w.zeta)) dz += model.score_backward(tape, Scalar(w.zeta) * g);
  }
  if (!b.triplets.empty()) {
    Mat gm, gv;
    Mat* pm = want(w.gamma) ? &gm : nullptr;
    Mat* pv = want(w.gamma) ? &gv : nullptr;
    if (b.views.rows() > 0) {
      typename Model<Scalar>::EncoderTape vtape;
      const GaussianBatch<Scalar> vpost = model.encode(b.views, vtape);
      parts.triplet = static_cast<double>(
          triplet_term(detail::stack(post, vpost), std::span<const Triplet>(b.triplets), w.margin, w.skew(), reduction, pm, pv));
      if (pm) {
        d_mean += Scalar(w.gamma) * gm.topRows(bsize);
        d_var += Scalar(w.gamma) * gv.topRows(bsize);
        model.encode_backward(vtape, Scalar(w.gamma) * gm.bottomRows(vpost.size()),
                              Scalar(w.gamma) * gv.bottomRows(vpost.size()));
      }
    } else {
      parts.triplet = static_cast<double>(
          triplet_term(post, std::span<const Triplet>(b.triplets), w.margin, w.skew(), reduction, pm, pv));
      if (pm) {
        d_mean += Scalar(w.gamma) * gm;
        d_var += Scalar(w.gamma) * gv;
      }
    }
  }
  if (!b.labeled_targets.empty() && w.labeled > 0.0) {
    typename Model<Scalar>::EncoderTape ltape;
    const GaussianBatch<Scalar> lpost = model.encode(b.labeled_x, ltape);
    const Mat zl = sample_latent(lpost, b.labeled_noise);
    Tape tape;
    const Mat logits = model.score_logits(zl, tape);
    Mat g;
    parts.labeled = static_cast<double>(categorical_nll_term(logits, b.labeled_targets, backprop ? &g : nullptr));
    if (backprop) {
      const Mat dzl = model.score_backward(tape, Scalar(w.labeled) * g);
      Mat lm = Mat::Zero(lpost.size(), d), lv = Mat::Zero(lpost.size(), d);
      detail::reparam_backward(lpost, b.labeled_noise, dzl, lm, lv);
      model.encode_backward(ltape, lm, lv);
    }
  }
  if (backprop) {
    detail::reparam_backward(post, b.noise, dz, d_mean, d_var);
    model.encode_backward(etape, d_mean, d_var);
  }
  return parts;
}

/// Shared implementation of train() and train_semi_supervised(). `view.labels`
/// is either empty or holds one entry per row (-1 for unlabeled rows).
template <typename Scalar>
TrainResult<Scalar> train_view(const ModelSpec& spec, const TrainingView& view, const TrainConfig& cfg,
                               const EpochCallback& on_epoch = {}) {
  cfg.validate();
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!view.features || view.rows() < 2) throw DataError("train: need at least two training rows");
  if (view.features->cols() != spec.input_dim) {
    throw DataError("train: data has " + std::to_string(view.features->cols()) + " features, model expects " +
                    std::to_string(spec.input_dim));
  }
  const LossWeights& w = cfg.weights;
  const SideInfo* side = view.side;
  if (w.delta > 0.0 && (!side || spec.side_kind == SideKind::none)) {
    throw ConfigError("train: side-information weight > 0 but no side information is available");
  }
  if (side && spec.side_kind != SideKind::none) {
    const bool categorical = side->kind == SideInfo::Kind::categorical;
    if (categorical != (spec.side_kind == SideKind::categorical)) {
      throw ConfigError("train: side-information kind does not match the model");
    }
    if (categorical && side->num_classes != spec.side_classes) {
      throw ConfigError("train: side-information class count does not match the model");
    }
  }
  if (side && static_cast<Index>(side->size()) != view.rows()) throw DataError("train: side information row count mismatch");
  const bool triplets_on = cfg.regime != TripletRegime::off;
  if (triplets_on && cfg.regime != TripletRegime::self_supervised) {
    if (!side) throw ConfigError("train: the triplet regime needs side information");
    if (cfg.regime == TripletRegime::by_class && side->kind != SideInfo::Kind::categorical) {
      throw ConfigError("train: by_class triplets need categorical side information");
    }
  }

  // Labeled rows for the cross-entropy term.
  std::vector<Index> labeled_rows;
  if (!view.labels.empty()) {
    if (static_cast<Index>(view.labels.size()) != view.rows()) throw DataError("train: label vector length mismatch");
    for (std::size_t i = 0; i < view.labels.size(); ++i) {
      const int c = view.labels[i];
      if (c < -1 || c >= spec.n_score_classes) throw DataError("train: label out of range [0, K)");
      if (c >= 0) labeled_rows.push_back(static_cast<Index>(i));
    }
  }
  const bool use_labeled = w.labeled > 0.0 && !labeled_rows.empty();

  // Class ids driving the triplet sampler, fixed over the run.
  std::vector<int> triplet_classes;
  if (triplets_on && cfg.regime == TripletRegime::by_class) triplet_classes = side->classes();
  if (triplets_on && cfg.regime == TripletRegime::by_quantile) {
    const auto edges = quantile_bin_edges(side->values, cfg.quantile_bins);
    triplet_classes = assign_quantile_bins(side->values, edges);
  }
  std::vector<int> side_classes;
  if (side && side->kind == SideInfo::Kind::categorical) side_classes = side->classes();

  Augmentation augment = cfg.augment;
  if (cfg.regime == TripletRegime::self_supervised && augment.kind == AugmentKind::tabular_jitter &&
      augment.feature_std.size() == 0) {
    const MatrixXd& x = *view.features;
    const Eigen::RowVectorXd mu = x.colwise().mean();
    augment.feature_std = ((x.rowwise() - mu).array().square().colwise().sum() / double(std::max<Index>(1, x.rows() - 1)))
                              .sqrt()
                              .transpose();
  }

  TrainResult<Scalar> result{Model<Scalar>(spec), {}};
  Model<Scalar>& model = result.model;
  model.init(cfg.seed);
  nn::Adam<Scalar> adam(cfg.learning_rate);
  auto params = model.parameters();

  std::mt19937_64 order_rng(cfg.seed ^ 0x5eedULL);
  std::mt19937_64 noise_rng(cfg.seed ^ 0x6e6f697365ULL);
  std::mt19937_64 mining_rng(cfg.seed ^ 0x747269706cULL);
  std::mt19937_64 labeled_rng(cfg.seed ^ 0x6c6162656cULL);

  const Index n = view.rows();
  const Index d = spec.latent_dim;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), order_rng);
    LossParts epoch_sum;
    std::size_t batches = 0, epoch_triplets = 0, epoch_shortfall = 0;

    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index bsize = std::min(cfg.batch_size, n - start);
      if (bsize < 2) break;
      const std::span<const Index> rows(order.data() + start, static_cast<std::size_t>(bsize));
      Batch<Scalar> batch;
      batch.x = detail::gather_rows<Scalar>(*view.features, rows);
      batch.noise = detail::standard_normal<Scalar>(bsize, d, noise_rng);
      if (side && model.has_side_head()) {
        for (Index r : rows) {
          if (side->kind == SideInfo::Kind::categorical) {
            batch.side_classes.push_back(side_classes[static_cast<std::size_t>(r)]);
          } else {
            batch.side_values.push_back(side->values[static_cast<std::size_t>(r)]);
          }
        }
      }
      if (triplets_on) {
        const std::size_t want = cfg.n_triplets ? cfg.n_triplets : static_cast<std::size_t>(bsize);
        const std::uint64_t mseed = mining_rng();
        if (cfg.regime == TripletRegime::self_supervised) {
          auto ss = mine_self_supervised(batch.x.template cast<double>(), augment, want, mseed);
          batch.views = ss.views.template cast<Scalar>();
          batch.triplets = std::move(ss.mining.triplets);
          epoch_shortfall += ss.mining.shortfall;
        } else {
          std::vector<int> cls;
          for (Index r : rows) cls.push_back(triplet_classes[static_cast<std::size_t>(r)]);
          // A batch drawn from a single class has no negatives.
          if (std::adjacent_find(cls.begin(), cls.end(), std::not_equal_to<>()) != cls.end()) {
            auto mined = mine_by_class(cls, want, mseed);
            batch.triplets = std::move(mined.triplets);
            epoch_shortfall += mined.shortfall;
          }
        }
        epoch_triplets += batch.triplets.size();
      }
      if (use_labeled) {
        const Index lb = std::min<Index>(cfg.labeled_batch, static_cast<Index>(labeled_rows.size()));
        std::vector<Index> pick(static_cast<std::size_t>(lb));
        std::uniform_int_distribution<std::size_t> u(0, labeled_rows.size() - 1);
        for (auto& r : pick) r = labeled_rows[u(labeled_rng)];
        batch.labeled_x = detail::gather_rows<Scalar>(*view.features, pick);
        batch.labeled_noise = detail::standard_normal<Scalar>(lb, d, labeled_rng);
        for (Index r : pick) batch.labeled_targets.push_back(view.labels[static_cast<std::size_t>(r)]);
      }

      model.zero_grad();
      const LossParts parts = batch_objective(model, batch, w, cfg.reduction, true);
      total_loss(parts, w);  // throws on a non-finite component
      adam.step(params);
      detail::accumulate(epoch_sum, parts);
      ++batches;
    }
    if (batches == 0) throw DataError("train: no batch of at least two rows");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = total_loss(detail::scaled(epoch_sum, 1.0 / static_cast<double>(batches)), w);
    rec.triplets = epoch_triplets;
    rec.triplet_shortfall = epoch_shortfall;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

/// Unsupervised training on features and side information.
template <typename Scalar>
TrainResult<Scalar> train(const ModelSpec& spec, const Dataset& data, const TrainConfig& cfg,
                          const EpochCallback& on_epoch = {}) {
  return train_view<Scalar>(spec, training_view(data), cfg, on_epoch);
}

/// Adds the mean cross-entropy of the score head on the labeled rows
/// (`labels[i] >= 0`), weighted by cfg.weights.labeled. With no labeled rows
/// or a zero weight this is exactly train().
template <typename Scalar>
TrainResult<Scalar> train_semi_supervised(const ModelSpec& spec, const Dataset& data, std::vector<int> labels,
                                          const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  TrainingView view = training_view(data);
  view.labels = std::move(labels);
  return train_view<Scalar>(spec, view, cfg, on_epoch);
}

}  // namespace sidescore

#endif  // SIDESCORE_TRAINER_HPP_
