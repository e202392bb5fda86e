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

#ifndef SIDESCORE_LOSSES_HPP_
#define SIDESCORE_LOSSES_HPP_

// The loss terms of the scoring objective and their weighted sum.
//
// Batch terms take one instance per row and, where a gradient is useful for
// training, an optional output pointer that receives d(term)/d(input) with
// the same shape as the input. Batch means and sums are accumulated
// sequentially in row order.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidescore/divergence.hpp"
#include "sidescore/error.hpp"
#include "sidescore/gaussian.hpp"
#include "sidescore/triplet.hpp"

namespace sidescore {

struct LossWeights {
  double alpha = 1.0;   // reconstruction
  double beta = 1.0;    // KL to the prior
  double gamma = 1.0;   // triplet
  double delta = 1.0;   // side information
  double zeta = 1.0;    // score mutual information
  double margin = 1.0;
  double lambda_skew = 0.5;
  double labeled = 0.0;  // cross-entropy on labeled instances (semi-supervised runs)

  void validate() const {
    for (double w : {alpha, beta, gamma, delta, zeta, margin, labeled}) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("LossWeights: weights and margin must be finite and >= 0");
      }
    }
    SkewParam check(lambda_skew);
    (void)check;
  }
  SkewParam skew() const { return SkewParam(lambda_skew); }
};

struct LossParts {
  double recon = 0.0;
  double prior_kl = 0.0;
  double triplet = 0.0;
  double side = 0.0;
  double score = 0.0;
  double labeled = 0.0;
};

struct LossBreakdown {
  double recon = 0.0;
  double prior_kl = 0.0;
  double triplet = 0.0;
  double side = 0.0;
  double score = 0.0;
  double labeled = 0.0;
  double total = 0.0;
};

/// Weighted objective. Throws NumericalError naming the first non-finite
/// component.
inline LossBreakdown total_loss(const LossParts& parts, const LossWeights& w) {
  const std::pair<const char*, double> named[] = {
      {"recon", parts.recon}, {"prior_kl", parts.prior_kl}, {"triplet", parts.triplet},
      {"side", parts.side},   {"score", parts.score},       {"labeled", parts.labeled}};
  for (const auto& [name, value] : named) {
    if (!std::isfinite(value)) {
      throw NumericalError(name, std::string("non-finite loss component: ") + name);
    }
  }
  LossBreakdown b;
  b.recon = parts.recon;
  b.prior_kl = parts.prior_kl;
  b.triplet = parts.triplet;
  b.side = parts.side;
  b.score = parts.score;
  b.labeled = parts.labeled;
  b.total = w.alpha * parts.recon + w.beta * parts.prior_kl + w.gamma * parts.triplet +
            w.delta * parts.side + w.zeta * parts.score + w.labeled * parts.labeled;
  if (!std::isfinite(b.total)) throw NumericalError("total", "non-finite total loss");
  return b;
}

// ---------------------------------------------------------------------------
// Reconstruction

enum class Likelihood { bernoulli, gaussian_unit_var };

namespace detail {

template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  return x > Scalar(0) ? x + log1p(exp(-x)) : log1p(exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  return x >= Scalar(0) ? Scalar(1) / (Scalar(1) + exp(-x)) : exp(x) / (Scalar(1) + exp(x));
}

template <typename Scalar>
Scalar xlogy(Scalar x, Scalar y) {
  using std::log;
  return x == Scalar(0) ? Scalar(0) : x * log(y);
}

template <typename Scalar>
void require_unit_interval(const Matrix<Scalar>& x) {
  if ((x.array() < Scalar(0)).any() || (x.array() > Scalar(1)).any()) {
    throw std::invalid_argument("bernoulli likelihood: x must lie in [0, 1]");
  }
}

template <typename Scalar>
Matrix<Scalar> log_softmax_rows(const Matrix<Scalar>& logits) {
  using std::exp;
  using std::log;
  Matrix<Scalar> out(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const Scalar mx = logits.row(i).maxCoeff();
    const Scalar lse = mx + log((logits.row(i).array() - mx).exp().sum());
    out.row(i) = logits.row(i).array() - lse;
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
Matrix<Scalar> softmax_rows(const Matrix<Scalar>& logits) {
  return detail::log_softmax_rows(logits).array().exp().matrix();
}

/// -log p(x | recon) for a single instance. For `bernoulli` the
/// reconstruction holds probabilities; for `gaussian_unit_var` it holds means.
template <typename Scalar>
Scalar reconstruction_nll(const Vector<Scalar>& x, const Vector<Scalar>& recon, Likelihood lik) {
  if (x.size() != recon.size()) throw std::invalid_argument("reconstruction_nll: dimension mismatch");
  if (lik == Likelihood::bernoulli) {
    detail::require_unit_interval<Scalar>(x);
    Scalar nll(0);
    for (Index i = 0; i < x.size(); ++i) {
      const Scalar r = recon[i];
      if (!(r >= Scalar(0) && r <= Scalar(1))) {
        throw std::invalid_argument("reconstruction_nll: probabilities must lie in [0, 1]");
      }
      nll -= detail::xlogy(x[i], r) + detail::xlogy(Scalar(1) - x[i], Scalar(1) - r);
    }
    return nll;
  }
  const Scalar half_log_2pi(0.5 * std::log(2.0 * std::numbers::pi));
  return Scalar(0.5) * (x - recon).squaredNorm() + Scalar(x.size()) * half_log_2pi;
}

template <typename Scalar>
Scalar reconstruction_nll(const Matrix<Scalar>& x, const Matrix<Scalar>& recon, Likelihood lik) {
  if (x.rows() != recon.rows() || x.cols() != recon.cols() || x.rows() == 0) {
    throw std::invalid_argument("reconstruction_nll: shape mismatch");
  }
  Scalar sum(0);
  for (Index n = 0; n < x.rows(); ++n) {
    sum += reconstruction_nll<Scalar>(Vector<Scalar>(x.row(n).transpose()), Vector<Scalar>(recon.row(n).transpose()), lik);
  }
  return sum / Scalar(x.rows());
}

/// Mean reconstruction NLL from decoder outputs: logits for `bernoulli`,
/// means for `gaussian_unit_var`.
template <typename Scalar>
Scalar reconstruction_term(const Matrix<Scalar>& x, const Matrix<Scalar>& decoder_out,
                           Likelihood lik, Matrix<Scalar>* d_out = nullptr) {
  if (x.rows() != decoder_out.rows() || x.cols() != decoder_out.cols() || x.rows() == 0) {
    throw std::invalid_argument("reconstruction_term: shape mismatch");
  }
  const Scalar inv_n = Scalar(1) / Scalar(x.rows());
  if (d_out) d_out->resize(x.rows(), x.cols());
  Scalar sum(0);
  if (lik == Likelihood::bernoulli) {
    detail::require_unit_interval(x);
    for (Index n = 0; n < x.rows(); ++n) {
      for (Index i = 0; i < x.cols(); ++i) {
        const Scalar l = decoder_out(n, i);
        sum += detail::softplus(l) - x(n, i) * l;
        if (d_out) (*d_out)(n, i) = inv_n * (detail::sigmoid(l) - x(n, i));
      }
    }
    return sum * inv_n;
  }
  const Scalar half_log_2pi(0.5 * std::log(2.0 * std::numbers::pi));
  for (Index n = 0; n < x.rows(); ++n) {
    sum += Scalar(0.5) * (x.row(n) - decoder_out.row(n)).squaredNorm();
  }
  if (d_out) *d_out = inv_n * (decoder_out - x);
  return sum * inv_n + Scalar(x.cols()) * half_log_2pi;
}

// ---------------------------------------------------------------------------
// KL to the standard normal prior

template <typename Scalar>
Scalar prior_kl(const GaussianDiag<Scalar>& posterior) {
  posterior.validate();
  const Vector<Scalar> v_vec = detail::floored(posterior.var);
  const auto v = v_vec.array();
  return Scalar(0.5) * (v + posterior.mean.array().square() - Scalar(1) - v.log()).sum();
}

/// Mean over the batch of KL(q(z | x_n) || N(0, I)).
template <typename Scalar>
Scalar prior_kl_term(const GaussianBatch<Scalar>& post, Matrix<Scalar>* d_mean = nullptr,
                     Matrix<Scalar>* d_var = nullptr) {
  if (post.size() == 0) throw std::invalid_argument("prior_kl_term: empty batch");
  const Scalar inv_n = Scalar(1) / Scalar(post.size());
  Scalar sum(0);
  for (Index n = 0; n < post.size(); ++n) sum += prior_kl(post.row(n));
  if (d_mean) *d_mean = inv_n * post.mean;
  if (d_var) {
    const Matrix<Scalar> v = post.var.cwiseMax(Scalar(kVarianceFloor));
    *d_var = (inv_n * Scalar(0.5) * (Matrix<Scalar>::Ones(v.rows(), v.cols()) - v.cwiseInverse()));
    *d_var = (post.var.array() < Scalar(kVarianceFloor)).select(Scalar(0), d_var->array()).matrix();
  }
  return sum * inv_n;
}

// ---------------------------------------------------------------------------
// Side information

namespace detail {

template <typename Scalar>
void require_simplex(const Vector<Scalar>& probs, const char* what) {
  using std::abs;
  if (probs.size() < 1 || (probs.array() < Scalar(0)).any() ||
      abs(probs.sum() - Scalar(1)) > Scalar(1e-6)) {
    throw std::invalid_argument(std::string(what) + ": prediction is not a probability vector");
  }
}

}  // namespace detail

/// -log p(s | x) for categorical side information.
template <typename Scalar>
Scalar side_nll(const Vector<Scalar>& predicted, Index observed) {
  using std::log;
  detail::require_simplex(predicted, "side_nll");
  if (observed < 0 || observed >= predicted.size()) {
    throw std::invalid_argument("side_nll: observed class out of range");
  }
  return -log(predicted[observed]);
}

/// -log N(s; mean, var) for continuous side information.
template <typename Scalar>
Scalar side_nll(Scalar mean, Scalar var, Scalar observed) {
  using std::log;
  if (!(var > Scalar(0))) throw std::invalid_argument("side_nll: variance must be > 0");
  const Scalar v = std::max(var, Scalar(kVarianceFloor));
  return Scalar(0.5) * (log(Scalar(2.0 * std::numbers::pi) * v) + (observed - mean) * (observed - mean) / v);
}

/// Mean cross-entropy of categorical targets under softmax(logits).
template <typename Scalar>
Scalar categorical_nll_term(const Matrix<Scalar>& logits, std::span<const int> classes,
                            Matrix<Scalar>* d_logits = nullptr) {
  if (logits.rows() != static_cast<Index>(classes.size()) || logits.rows() == 0) {
    throw std::invalid_argument("categorical_nll_term: batch size mismatch");
  }
  const Matrix<Scalar> logp = detail::log_softmax_rows(logits);
  const Scalar inv_n = Scalar(1) / Scalar(logits.rows());
  Scalar sum(0);
  for (Index n = 0; n < logits.rows(); ++n) {
    const int c = classes[static_cast<std::size_t>(n)];
    if (c < 0 || c >= logits.cols()) {
      throw std::invalid_argument("categorical_nll_term: class index out of range");
    }
    sum -= logp(n, c);
  }
  if (d_logits) {
    *d_logits = logp.array().exp().matrix();
    for (Index n = 0; n < logits.rows(); ++n) (*d_logits)(n, classes[static_cast<std::size_t>(n)]) -= Scalar(1);
    *d_logits *= inv_n;
  }
  return sum * inv_n;
}

/// Mean Gaussian NLL of continuous targets; `pred` has columns (mean, var).
template <typename Scalar>
Scalar gaussian_nll_term(const Matrix<Scalar>& pred, std::span<const double> observed,
                         Matrix<Scalar>* d_pred = nullptr) {
  if (pred.cols() != 2 || pred.rows() != static_cast<Index>(observed.size()) || pred.rows() == 0) {
    throw std::invalid_argument("gaussian_nll_term: shape mismatch");
  }
  const Scalar inv_n = Scalar(1) / Scalar(pred.rows());
  if (d_pred) d_pred->resize(pred.rows(), 2);
  Scalar sum(0);
  for (Index n = 0; n < pred.rows(); ++n) {
    const Scalar s(observed[static_cast<std::size_t>(n)]);
    const Scalar m = pred(n, 0);
    const Scalar v_raw = pred(n, 1);
    sum += side_nll(m, v_raw, s);
    if (d_pred) {
      const Scalar v = std::max(v_raw, Scalar(kVarianceFloor));
      const Scalar r = s - m;
      (*d_pred)(n, 0) = -inv_n * r / v;
      (*d_pred)(n, 1) = v_raw < Scalar(kVarianceFloor)
                            ? Scalar(0)
                            : inv_n * Scalar(0.5) * (Scalar(1) / v - r * r / (v * v));
    }
  }
  return sum * inv_n;
}

// ---------------------------------------------------------------------------
// Score mutual information

/// L = H(C | Z) - H(C), the negated plug-in estimate of I(Z; C). H(C | Z) is
/// the mean entropy of the per-instance score distributions (uniform weight
/// 1/N per instance) and H(C) the entropy of their batch mean. Minimizing L
/// favours confident and balanced score assignments. The value lies in
/// [-log K, log K].
template <typename Scalar>
Scalar score_mi_loss(const Matrix<Scalar>& probs) {
  if (probs.rows() == 0) throw std::invalid_argument("score_mi_loss: empty batch");
  if (probs.cols() < 2) throw std::invalid_argument("score_mi_loss: K must be >= 2");
  Scalar cond(0);
  for (Index n = 0; n < probs.rows(); ++n) {
    detail::require_simplex<Scalar>(probs.row(n).transpose(), "score_mi_loss");
    for (Index k = 0; k < probs.cols(); ++k) cond -= detail::xlogy(probs(n, k), probs(n, k));
  }
  cond /= Scalar(probs.rows());
  const RowVector<Scalar> marginal = probs.colwise().mean();
  Scalar marg(0);
  for (Index k = 0; k < probs.cols(); ++k) marg -= detail::xlogy(marginal[k], marginal[k]);
  return cond - marg;
}

/// score_mi_loss of softmax(logits), with the gradient on the logits.
template <typename Scalar>
Scalar score_mi_term(const Matrix<Scalar>& logits, Matrix<Scalar>* d_logits = nullptr) {
  using std::log;
  if (logits.rows() == 0) throw std::invalid_argument("score_mi_term: empty batch");
  if (logits.cols() < 2) throw std::invalid_argument("score_mi_term: K must be >= 2");
  const Matrix<Scalar> logp = detail::log_softmax_rows(logits);
  const Matrix<Scalar> p = logp.array().exp().matrix();
  const Scalar inv_n = Scalar(1) / Scalar(logits.rows());
  const Scalar cond = -inv_n * (p.array() * logp.array()).sum();
  const RowVector<Scalar> marginal = p.colwise().mean();
  RowVector<Scalar> log_marginal(marginal.size());
  Scalar marg(0);
  for (Index k = 0; k < marginal.size(); ++k) {
    log_marginal[k] = log(std::max(marginal[k], std::numeric_limits<Scalar>::min()));
    marg -= detail::xlogy(marginal[k], marginal[k]);
  }
  if (d_logits) {
    // dL/dp_nk = (log pbar_k - log p_nk) / N, then through the softmax.
    Matrix<Scalar> g = inv_n * ((-logp).rowwise() + log_marginal);
    const Vector<Scalar> inner = (p.array() * g.array()).rowwise().sum();
    *d_logits = (p.array() * (g.colwise() - inner).array()).matrix();
  }
  return cond - marg;
}

// ---------------------------------------------------------------------------
// Triplet loss on latent Gaussians

/// max(0, sqrtJS(a, p) - sqrtJS(a, n) + margin) with the skew-geometric
/// square-root JS distance.
template <typename Scalar>
Scalar triplet_sqrt_js(const GaussianDiag<Scalar>& anchor, const GaussianDiag<Scalar>& positive,
                       const GaussianDiag<Scalar>& negative, const LossWeights& w) {
  if (anchor.dim() != positive.dim() || anchor.dim() != negative.dim()) {
    throw std::invalid_argument("triplet_sqrt_js: dimension mismatch");
  }
  const SkewParam s = w.skew();
  const Scalar value = sqrt_js_geo(anchor, positive, s) - sqrt_js_geo(anchor, negative, s) + Scalar(w.margin);
  return std::max(value, Scalar(0));
}

enum class TripletReduction { sum, mean };

/// Triplet hinge over a batch of posteriors. Indices refer to rows of `post`.
/// Sum over triplets by default; `mean` divides by the number of triplets.
template <typename Scalar>
Scalar triplet_term(const GaussianBatch<Scalar>& post, std::span<const Triplet> triplets,
                    double margin, SkewParam skew, TripletReduction reduction = TripletReduction::sum,
                    Matrix<Scalar>* d_mean = nullptr, Matrix<Scalar>* d_var = nullptr) {
  if (d_mean) d_mean->setZero(post.size(), post.dim());
  if (d_var) d_var->setZero(post.size(), post.dim());
  if (triplets.empty()) return Scalar(0);
  const Scalar scale = reduction == TripletReduction::mean ? Scalar(1) / Scalar(triplets.size()) : Scalar(1);
  Scalar sum(0);
  for (const Triplet& t : triplets) {
    for (auto idx : {t.anchor, t.positive, t.negative}) {
      if (idx < 0 || idx >= post.size()) throw std::invalid_argument("triplet_term: index out of range");
    }
    const auto a = post.row(t.anchor);
    const auto p = post.row(t.positive);
    const auto n = post.row(t.negative);
    if (!d_mean && !d_var) {
      sum += std::max(sqrt_js_geo(a, p, skew) - sqrt_js_geo(a, n, skew) + Scalar(margin), Scalar(0));
      continue;
    }
    const auto gp = sqrt_js_geo_gradient(a, p, skew);
    const auto gn = sqrt_js_geo_gradient(a, n, skew);
    const Scalar hinge = gp.value - gn.value + Scalar(margin);
    if (hinge <= Scalar(0)) continue;
    sum += hinge;
    if (d_mean) {
      d_mean->row(t.anchor) += scale * (gp.dmean_p - gn.dmean_p).transpose();
      d_mean->row(t.positive) += scale * gp.dmean_q.transpose();
      d_mean->row(t.negative) -= scale * gn.dmean_q.transpose();
    }
    if (d_var) {
      d_var->row(t.anchor) += scale * (gp.dvar_p - gn.dvar_p).transpose();
      d_var->row(t.positive) += scale * gp.dvar_q.transpose();
      d_var->row(t.negative) -= scale * gn.dvar_q.transpose();
    }
  }
  return sum * scale;
}

}  // namespace sidescore

#endif  // SIDESCORE_LOSSES_HPP_
