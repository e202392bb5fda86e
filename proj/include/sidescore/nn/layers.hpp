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

#ifndef SIDESCORE_NN_LAYERS_HPP_
#define SIDESCORE_NN_LAYERS_HPP_

// Minimal dense building blocks with hand-written backward passes. Layers
// keep their parameters and accumulated gradients side by side; inference
// (`forward`) is const, training records what backward needs in a tape.

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidescore/types.hpp"

namespace sidescore::nn {

enum class Activation { relu, elu, tanh };

template <typename Scalar>
struct ParameterRef {
  std::string name;
  Matrix<Scalar>* value;
  Matrix<Scalar>* grad;
};

template <typename Scalar>
Matrix<Scalar> activate(const Matrix<Scalar>& pre, Activation act) {
  switch (act) {
    case Activation::relu:
      return pre.cwiseMax(Scalar(0));
    case Activation::elu:
      return (pre.array() > Scalar(0)).select(pre.array(), pre.array().exp() - Scalar(1)).matrix();
    case Activation::tanh:
      return pre.array().tanh().matrix();
  }
  return pre;
}

/// dL/dpre given dL/dout, the pre-activation and the activation output.
template <typename Scalar>
Matrix<Scalar> activate_backward(const Matrix<Scalar>& pre, const Matrix<Scalar>& out,
                                 const Matrix<Scalar>& d_out, Activation act) {
  switch (act) {
    case Activation::relu:
      return (pre.array() > Scalar(0)).select(d_out.array(), Scalar(0)).matrix();
    case Activation::elu:
      return (pre.array() > Scalar(0)).select(d_out.array(), d_out.array() * (out.array() + Scalar(1))).matrix();
    case Activation::tanh:
      return (d_out.array() * (Scalar(1) - out.array().square())).matrix();
  }
  return d_out;
}

/// y = x W + b, x is (batch x in).
template <typename Scalar>
class Dense {
 public:
  Dense() = default;
  Dense(Index in, Index out)
      : weight_(Matrix<Scalar>::Zero(in, out)),
        bias_(Matrix<Scalar>::Zero(1, out)),
        d_weight_(Matrix<Scalar>::Zero(in, out)),
        d_bias_(Matrix<Scalar>::Zero(1, out)) {}

  Index in_dim() const { return weight_.rows(); }
  Index out_dim() const { return weight_.cols(); }

  void init(std::mt19937_64& rng, Scalar gain = Scalar(1)) {
    const double limit = static_cast<double>(gain) * std::sqrt(6.0 / static_cast<double>(in_dim() + out_dim()));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Index j = 0; j < weight_.cols(); ++j)
      for (Index i = 0; i < weight_.rows(); ++i) weight_(i, j) = Scalar(u(rng));
    bias_.setZero();
  }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) const {
    if (x.cols() != in_dim()) throw std::invalid_argument("Dense: input width mismatch");
    Matrix<Scalar> y = x * weight_;
    y.rowwise() += bias_.row(0);
    return y;
  }

  Matrix<Scalar> backward(const Matrix<Scalar>& x, const Matrix<Scalar>& dy) {
    d_weight_.noalias() += x.transpose() * dy;
    d_bias_ += dy.colwise().sum();
    return dy * weight_.transpose();
  }

  void parameters(const std::string& prefix, std::vector<ParameterRef<Scalar>>& out) {
    out.push_back({prefix + ".weight", &weight_, &d_weight_});
    out.push_back({prefix + ".bias", &bias_, &d_bias_});
  }

  Matrix<Scalar>& weight() { return weight_; }
  Matrix<Scalar>& bias() { return bias_; }

 private:
  Matrix<Scalar> weight_, bias_, d_weight_, d_bias_;
};

/// 2-D convolution over channel-major flattened images: each row of the input
/// holds (channels, height, width) in that order, and so does the output.
template <typename Scalar>
class Conv2d {
 public:
  struct Geometry {
    Index in_channels = 1, height = 28, width = 28;
    Index out_channels = 8, kernel = 5, stride = 2, padding = 2;

    Index out_height() const { return (height + 2 * padding - kernel) / stride + 1; }
    Index out_width() const { return (width + 2 * padding - kernel) / stride + 1; }
    Index in_size() const { return in_channels * height * width; }
    Index out_size() const { return out_channels * out_height() * out_width(); }
    Index patch() const { return in_channels * kernel * kernel; }
  };

  Conv2d() = default;
  explicit Conv2d(Geometry g)
      : g_(g),
        weight_(Matrix<Scalar>::Zero(g.patch(), g.out_channels)),
        bias_(Matrix<Scalar>::Zero(1, g.out_channels)),
        d_weight_(Matrix<Scalar>::Zero(g.patch(), g.out_channels)),
        d_bias_(Matrix<Scalar>::Zero(1, g.out_channels)) {}

  const Geometry& geometry() const { return g_; }
  Index in_dim() const { return g_.in_size(); }
  Index out_dim() const { return g_.out_size(); }

  void init(std::mt19937_64& rng) {
    const double fan_in = static_cast<double>(g_.patch());
    const double fan_out = static_cast<double>(g_.out_channels * g_.kernel * g_.kernel);
    std::uniform_real_distribution<double> u(-std::sqrt(6.0 / (fan_in + fan_out)),
                                             std::sqrt(6.0 / (fan_in + fan_out)));
    for (Index j = 0; j < weight_.cols(); ++j)
      for (Index i = 0; i < weight_.rows(); ++i) weight_(i, j) = Scalar(u(rng));
    bias_.setZero();
  }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) const {
    if (x.cols() != in_dim()) throw std::invalid_argument("Conv2d: input width mismatch");
    const Index positions = g_.out_height() * g_.out_width();
    Matrix<Scalar> out_cols = im2col(x) * weight_;  // (batch * positions) x out_channels
    out_cols.rowwise() += bias_.row(0);
    Matrix<Scalar> y(x.rows(), out_dim());
    for (Index n = 0; n < x.rows(); ++n) {
      for (Index c = 0; c < g_.out_channels; ++c) {
        y.row(n).segment(c * positions, positions) =
            out_cols.block(n * positions, c, positions, 1).transpose();
      }
    }
    return y;
  }

  Matrix<Scalar> backward(const Matrix<Scalar>& x, const Matrix<Scalar>& dy) {
    const Index positions = g_.out_height() * g_.out_width();
    Matrix<Scalar> d_cols_out(x.rows() * positions, g_.out_channels);
    for (Index n = 0; n < x.rows(); ++n) {
      for (Index c = 0; c < g_.out_channels; ++c) {
        d_cols_out.block(n * positions, c, positions, 1) =
            dy.row(n).segment(c * positions, positions).transpose();
      }
    }
    const Matrix<Scalar> cols = im2col(x);
    d_weight_.noalias() += cols.transpose() * d_cols_out;
    d_bias_ += d_cols_out.colwise().sum();
    const Matrix<Scalar> d_cols = d_cols_out * weight_.transpose();
    return col2im(d_cols, x.rows());
  }

  void parameters(const std::string& prefix, std::vector<ParameterRef<Scalar>>& out) {
    out.push_back({prefix + ".weight", &weight_, &d_weight_});
    out.push_back({prefix + ".bias", &bias_, &d_bias_});
  }

 private:
  // Row (n * positions + p) holds the receptive field of output position p of
  // instance n, ordered (channel, ky, kx).
  Matrix<Scalar> im2col(const Matrix<Scalar>& x) const {
    const Index oh = g_.out_height(), ow = g_.out_width(), k = g_.kernel;
    Matrix<Scalar> cols = Matrix<Scalar>::Zero(x.rows() * oh * ow, g_.patch());
    for (Index n = 0; n < x.rows(); ++n) {
      for (Index oy = 0; oy < oh; ++oy) {
        for (Index ox = 0; ox < ow; ++ox) {
          const Index row = n * oh * ow + oy * ow + ox;
          for (Index c = 0; c < g_.in_channels; ++c) {
            for (Index ky = 0; ky < k; ++ky) {
              const Index iy = oy * g_.stride + ky - g_.padding;
              if (iy < 0 || iy >= g_.height) continue;
              for (Index kx = 0; kx < k; ++kx) {
                const Index ix = ox * g_.stride + kx - g_.padding;
                if (ix < 0 || ix >= g_.width) continue;
                cols(row, (c * k + ky) * k + kx) = x(n, (c * g_.height + iy) * g_.width + ix);
              }
            }
          }
        }
      }
    }
    return cols;
  }

  Matrix<Scalar> col2im(const Matrix<Scalar>& cols, Index batch) const {
    const Index oh = g_.out_height(), ow = g_.out_width(), k = g_.kernel;
    Matrix<Scalar> dx = Matrix<Scalar>::Zero(batch, in_dim());
    for (Index n = 0; n < batch; ++n) {
      for (Index oy = 0; oy < oh; ++oy) {
        for (Index ox = 0; ox < ow; ++ox) {
          const Index row = n * oh * ow + oy * ow + ox;
          for (Index c = 0; c < g_.in_channels; ++c) {
            for (Index ky = 0; ky < k; ++ky) {
              const Index iy = oy * g_.stride + ky - g_.padding;
              if (iy < 0 || iy >= g_.height) continue;
              for (Index kx = 0; kx < k; ++kx) {
                const Index ix = ox * g_.stride + kx - g_.padding;
                if (ix < 0 || ix >= g_.width) continue;
                dx(n, (c * g_.height + iy) * g_.width + ix) += cols(row, (c * k + ky) * k + kx);
              }
            }
          }
        }
      }
    }
    return dx;
  }

  Geometry g_;
  Matrix<Scalar> weight_, bias_, d_weight_, d_bias_;
};

/// Stack of dense layers with an activation after every layer except the
/// last.
template <typename Scalar>
class Mlp {
 public:
  struct Tape {
    std::vector<Matrix<Scalar>> inputs;  // input of each layer
    std::vector<Matrix<Scalar>> pre;     // pre-activation of each hidden layer
  };

  Mlp() = default;
  Mlp(const std::vector<Index>& sizes, Activation act) : act_(act) {
    if (sizes.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) layers_.emplace_back(sizes[i], sizes[i + 1]);
  }

  Index in_dim() const { return layers_.front().in_dim(); }
  Index out_dim() const { return layers_.back().out_dim(); }

  void init(std::mt19937_64& rng) {
    for (auto& l : layers_) l.init(rng);
  }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) const {
    Matrix<Scalar> h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      h = layers_[i].forward(h);
      if (i + 1 < layers_.size()) h = activate(h, act_);
    }
    return h;
  }

  Matrix<Scalar> forward(const Matrix<Scalar>& x, Tape& tape) const {
    tape.inputs.clear();
    tape.pre.clear();
    Matrix<Scalar> h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      tape.inputs.push_back(h);
      h = layers_[i].forward(h);
      if (i + 1 < layers_.size()) {
        tape.pre.push_back(h);
        h = activate(h, act_);
      }
    }
    return h;
  }

  Matrix<Scalar> backward(const Tape& tape, const Matrix<Scalar>& dy) {
    Matrix<Scalar> d = dy;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      if (i + 1 < layers_.size()) {
        // tape.inputs[i + 1] is the activation output of layer i.
        d = activate_backward(tape.pre[i], tape.inputs[i + 1], d, act_);
      }
      d = layers_[i].backward(tape.inputs[i], d);
    }
    return d;
  }

  void parameters(const std::string& prefix, std::vector<ParameterRef<Scalar>>& out) {
    for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i].parameters(prefix + "." + std::to_string(i), out);
  }

 private:
  std::vector<Dense<Scalar>> layers_;
  Activation act_ = Activation::elu;
};

/// Adam with bias correction.
template <typename Scalar>
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<ParameterRef<Scalar>>& params) {
    if (m_.empty()) {
      for (const auto& p : params) {
        m_.push_back(Matrix<Scalar>::Zero(p.value->rows(), p.value->cols()));
        v_.push_back(Matrix<Scalar>::Zero(p.value->rows(), p.value->cols()));
      }
    }
    if (m_.size() != params.size()) throw std::logic_error("Adam: parameter set changed");
    ++t_;
    const Scalar c1 = Scalar(1.0 - std::pow(beta1_, static_cast<double>(t_)));
    const Scalar c2 = Scalar(1.0 - std::pow(beta2_, static_cast<double>(t_)));
    const Scalar b1(beta1_), b2(beta2_), lr(lr_), eps(eps_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& g = *params[i].grad;
      m_[i] = b1 * m_[i] + (Scalar(1) - b1) * g;
      v_[i] = b2 * v_[i] + (Scalar(1) - b2) * g.cwiseProduct(g);
      params[i].value->array() -=
          lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps);
    }
  }

  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix<Scalar>> m_, v_;
};

}  // namespace sidescore::nn

#endif  // SIDESCORE_NN_LAYERS_HPP_
