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

#ifndef SIDESCORE_MODEL_HPP_
#define SIDESCORE_MODEL_HPP_

// Encoder q(z | x), decoder p(x | z), and the side-information and score
// heads. Both heads read only the latent code; nothing here ever takes side
// information as an input.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidescore/gaussian.hpp"
#include "sidescore/losses.hpp"
#include "sidescore/nn/layers.hpp"

namespace sidescore {

enum class InputKind { tabular, image_28x28 };
enum class SideKind { none, categorical, continuous };

struct ModelSpec {
  InputKind input_kind = InputKind::tabular;
  Index input_dim = 2;
  Index latent_dim = 2;
  std::vector<Index> hidden_layers = {64, 32};
  Index n_score_classes = 10;
  SideKind side_kind = SideKind::none;
  Index side_classes = 0;  // only for categorical side information
  std::vector<Index> head_hidden = {32};
  std::vector<Index> conv_channels = {8, 16};
  nn::Activation activation = nn::Activation::elu;

  Likelihood likelihood() const {
    return input_kind == InputKind::image_28x28 ? Likelihood::bernoulli : Likelihood::gaussian_unit_var;
  }

  void validate() const {
    if (input_dim < 1) throw std::invalid_argument("ModelSpec: input_dim must be positive");
    if (latent_dim < 2) throw std::invalid_argument("ModelSpec: latent_dim must be >= 2");
    if (n_score_classes < 2) throw std::invalid_argument("ModelSpec: n_score_classes must be >= 2");
    if (input_kind == InputKind::image_28x28) {
      if (input_dim != 784) throw std::invalid_argument("ModelSpec: image_28x28 requires input_dim = 784");
      if (conv_channels.size() != 2) throw std::invalid_argument("ModelSpec: image encoder needs two conv layers");
    }
    if (side_kind == SideKind::categorical && side_classes < 2) {
      throw std::invalid_argument("ModelSpec: categorical side information needs >= 2 classes");
    }
    for (Index h : hidden_layers)
      if (h < 1) throw std::invalid_argument("ModelSpec: hidden layer sizes must be positive");
    for (Index h : head_hidden)
      if (h < 1) throw std::invalid_argument("ModelSpec: head layer sizes must be positive");
  }

  Index side_outputs() const {
    switch (side_kind) {
      case SideKind::categorical: return side_classes;
      case SideKind::continuous: return 2;
      case SideKind::none: return 0;
    }
    return 0;
  }
};

/// z = mean + sqrt(var) * noise, row by row.
template <typename Scalar>
Matrix<Scalar> sample_latent(const GaussianBatch<Scalar>& post, const Matrix<Scalar>& noise) {
  if (noise.rows() != post.size() || noise.cols() != post.dim()) {
    throw std::invalid_argument("sample_latent: noise shape must match the posterior batch");
  }
  return post.mean + (post.var.array().sqrt() * noise.array()).matrix();
}

/// argmax per row; ties go to the lowest class index.
template <typename Scalar>
std::vector<int> hard_assignments(const Matrix<Scalar>& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Index n = 0; n < probs.rows(); ++n) {
    Index best = 0;
    for (Index k = 1; k < probs.cols(); ++k)
      if (probs(n, k) > probs(n, best)) best = k;
    out[static_cast<std::size_t>(n)] = static_cast<int>(best);
  }
  return out;
}

template <typename Scalar>
class Model {
 public:
  using Mat = Matrix<Scalar>;
  using MlpTape = typename nn::Mlp<Scalar>::Tape;

  struct EncoderTape {
    Mat input;
    Mat conv_pre[2], conv_out[2];
    MlpTape mlp;
    Mat raw_var;
  };

  Model() = default;

  explicit Model(const ModelSpec& spec) : spec_(spec) {
    spec_.validate();
    const Index d = spec_.latent_dim;
    Index trunk_in = spec_.input_dim;
    if (spec_.input_kind == InputKind::image_28x28) {
      typename nn::Conv2d<Scalar>::Geometry g1;
      g1.in_channels = 1;
      g1.height = g1.width = 28;
      g1.out_channels = spec_.conv_channels[0];
      conv_[0] = nn::Conv2d<Scalar>(g1);
      typename nn::Conv2d<Scalar>::Geometry g2;
      g2.in_channels = g1.out_channels;
      g2.height = g1.out_height();
      g2.width = g1.out_width();
      g2.out_channels = spec_.conv_channels[1];
      conv_[1] = nn::Conv2d<Scalar>(g2);
      trunk_in = conv_[1].out_dim();
    }
    std::vector<Index> enc = {trunk_in};
    enc.insert(enc.end(), spec_.hidden_layers.begin(), spec_.hidden_layers.end());
    enc.push_back(2 * d);
    encoder_ = nn::Mlp<Scalar>(enc, spec_.activation);

    std::vector<Index> dec = {d};
    dec.insert(dec.end(), spec_.hidden_layers.rbegin(), spec_.hidden_layers.rend());
    dec.push_back(spec_.input_dim);
    decoder_ = nn::Mlp<Scalar>(dec, spec_.activation);

    if (spec_.side_kind != SideKind::none) side_head_ = nn::Mlp<Scalar>(head_sizes(spec_.side_outputs()), spec_.activation);
    score_head_ = nn::Mlp<Scalar>(head_sizes(spec_.n_score_classes), spec_.activation);
  }

  const ModelSpec& spec() const { return spec_; }
  bool has_side_head() const { return spec_.side_kind != SideKind::none; }

  void init(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    if (is_image()) {
      conv_[0].init(rng);
      conv_[1].init(rng);
    }
    encoder_.init(rng);
    decoder_.init(rng);
    if (has_side_head()) side_head_.init(rng);
    score_head_.init(rng);
  }

  // ----- inference ---------------------------------------------------------

  GaussianBatch<Scalar> encode(const Mat& x) const {
    EncoderTape tape;
    return encode(x, tape);
  }

  Mat embed(const Mat& x) const { return encode(x).mean; }

  /// Bernoulli probabilities for images, Gaussian means for tabular data.
  Mat decode(const Mat& z) const {
    Mat out = decoder_logits(z);
    if (spec_.likelihood() == Likelihood::bernoulli) {
      out = out.unaryExpr([](Scalar v) { return detail::sigmoid(v); });
    }
    return out;
  }

  /// Categorical: class probabilities (N x K_s). Continuous: columns
  /// (mean, variance).
  Mat predict_side(const Mat& z) const {
    if (!has_side_head()) throw std::logic_error("predict_side: model has no side-information head");
    return side_transform(side_raw(z));
  }

  Mat predict_score(const Mat& z) const { return softmax_rows<Scalar>(score_logits(z)); }

  // ----- training passes ---------------------------------------------------

  GaussianBatch<Scalar> encode(const Mat& x, EncoderTape& tape) const {
    check_input(x);
    tape.input = x;
    Mat h = x;
    if (is_image()) {
      for (int i = 0; i < 2; ++i) {
        tape.conv_pre[i] = conv_[i].forward(h);
        tape.conv_out[i] = nn::activate(tape.conv_pre[i], spec_.activation);
        h = tape.conv_out[i];
      }
    }
    const Mat head = encoder_.forward(h, tape.mlp);
    const Index d = spec_.latent_dim;
    GaussianBatch<Scalar> post;
    post.mean = head.leftCols(d);
    tape.raw_var = head.rightCols(d);
    post.var = tape.raw_var.unaryExpr(
        [](Scalar v) { return detail::softplus(v) + Scalar(kVarianceFloor); });
    return post;
  }

  void encode_backward(const EncoderTape& tape, const Mat& d_mean, const Mat& d_var) {
    const Index d = spec_.latent_dim;
    Mat d_head(d_mean.rows(), 2 * d);
    d_head.leftCols(d) = d_mean;
    d_head.rightCols(d) =
        (d_var.array() * tape.raw_var.unaryExpr([](Scalar v) { return detail::sigmoid(v); }).array()).matrix();
    Mat dh = encoder_.backward(tape.mlp, d_head);
    if (is_image()) {
      for (int i = 1; i >= 0; --i) {
        dh = nn::activate_backward(tape.conv_pre[i], tape.conv_out[i], dh, spec_.activation);
        dh = conv_[i].backward(i == 0 ? tape.input : tape.conv_out[0], dh);
      }
    }
  }

  Mat decoder_logits(const Mat& z) const {
    check_latent(z);
    return decoder_.forward(z);
  }
  Mat decoder_logits(const Mat& z, MlpTape& tape) const {
    check_latent(z);
    return decoder_.forward(z, tape);
  }
  Mat decoder_backward(const MlpTape& tape, const Mat& d_out) { return decoder_.backward(tape, d_out); }

  Mat side_raw(const Mat& z) const {
    check_latent(z);
    return side_head_.forward(z);
  }
  Mat side_raw(const Mat& z, MlpTape& tape) const {
    check_latent(z);
    return side_head_.forward(z, tape);
  }
  /// Raw head outputs to distribution parameters.
  Mat side_transform(const Mat& raw) const {
    if (spec_.side_kind == SideKind::categorical) return softmax_rows<Scalar>(raw);
    Mat out = raw;
    out.col(1) = raw.col(1).unaryExpr([](Scalar v) { return detail::softplus(v) + Scalar(kVarianceFloor); });
    return out;
  }
  /// For continuous side heads: gradient on (mean, var) to gradient on raw.
  Mat side_transform_backward(const Mat& raw, const Mat& d_params) const {
    Mat d_raw = d_params;
    d_raw.col(1) = (d_params.col(1).array() *
                    raw.col(1).unaryExpr([](Scalar v) { return detail::sigmoid(v); }).array()).matrix();
    return d_raw;
  }
  Mat side_backward(const MlpTape& tape, const Mat& d_raw) { return side_head_.backward(tape, d_raw); }

  Mat score_logits(const Mat& z) const {
    check_latent(z);
    return score_head_.forward(z);
  }
  Mat score_logits(const Mat& z, MlpTape& tape) const {
    check_latent(z);
    return score_head_.forward(z, tape);
  }
  Mat score_backward(const MlpTape& tape, const Mat& d_logits) { return score_head_.backward(tape, d_logits); }

  /// Every trainable array, in a fixed order. References stay valid while the
  /// model is not moved.
  std::vector<nn::ParameterRef<Scalar>> parameters() {
    std::vector<nn::ParameterRef<Scalar>> out;
    if (is_image()) {
      conv_[0].parameters("encoder.conv0", out);
      conv_[1].parameters("encoder.conv1", out);
    }
    encoder_.parameters("encoder.fc", out);
    decoder_.parameters("decoder", out);
    if (has_side_head()) side_head_.parameters("side_head", out);
    score_head_.parameters("score_head", out);
    return out;
  }

  void zero_grad() {
    for (auto& p : parameters()) p.grad->setZero();
  }

 private:
  bool is_image() const { return spec_.input_kind == InputKind::image_28x28; }

  std::vector<Index> head_sizes(Index out) const {
    std::vector<Index> sizes = {spec_.latent_dim};
    sizes.insert(sizes.end(), spec_.head_hidden.begin(), spec_.head_hidden.end());
    sizes.push_back(out);
    return sizes;
  }

  void check_input(const Mat& x) const {
    if (x.cols() != spec_.input_dim) throw std::invalid_argument("encode: input has the wrong number of features");
    if (!x.allFinite()) throw std::invalid_argument("encode: non-finite input");
  }
  void check_latent(const Mat& z) const {
    if (z.cols() != spec_.latent_dim) throw std::invalid_argument("latent batch has the wrong dimension");
  }

  ModelSpec spec_;
  nn::Conv2d<Scalar> conv_[2];
  nn::Mlp<Scalar> encoder_, decoder_, side_head_, score_head_;
};

}  // namespace sidescore

#endif  // SIDESCORE_MODEL_HPP_
