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

#ifndef SIDESCORE_DIVERGENCE_HPP_
#define SIDESCORE_DIVERGENCE_HPP_

// Divergences between diagonal Gaussians.
//
// The skew-geometric Jensen-Shannon divergence replaces the arithmetic
// mixture (P + Q) / 2 of the ordinary JS divergence with the normalized
// weighted geometric mean G_l ~ p^(1-l) q^l. For Gaussians G_l is again a
// Gaussian N_l with
//
//   Sigma_l^-1 = (1-l) Sigma_1^-1 + l Sigma_2^-1
//   mu_l       = Sigma_l ((1-l) Sigma_1^-1 mu_1 + l Sigma_2^-1 mu_2)
//
// and JS^G_l(N1 || N2) = (1-l) KL(N1 || N_l) + l KL(N2 || N_l), which has a
// closed form. Everything here is elementwise because covariances are
// diagonal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "sidescore/gaussian.hpp"

namespace sidescore {

/// How the interpolant mean is formed. `unnormalized` drops the Sigma_l
/// premultiplier; it is wrong (it misses both endpoints) and exists only so
/// the property suite can demonstrate that it catches the mistake.
enum class InterpolantMean { precision_weighted, unnormalized };

namespace detail {

template <typename Scalar>
void require_pair(const GaussianDiag<Scalar>& p, const GaussianDiag<Scalar>& q) {
  p.validate();
  q.validate();
  if (p.dim() != q.dim()) throw std::invalid_argument("Gaussian pair: dimension mismatch");
}

// One coordinate of JS^G_l. u1 = Pl*v1 - 1 and u2 = Pl*v2 - 1 are formed from
// variance ratios so that identical inputs give exactly zero.
template <typename Scalar>
Scalar js_geo_coord(Scalar m1, Scalar v1, Scalar m2, Scalar v2, Scalar lambda,
                    InterpolantMean rule) {
  using std::log1p;
  const Scalar floor(kVarianceFloor);
  v1 = std::max(v1, floor);
  v2 = std::max(v2, floor);
  const Scalar a = Scalar(1) - lambda;
  const Scalar b = lambda;
  const Scalar rho = v1 / v2;
  const Scalar u1 = b * (rho - Scalar(1));
  const Scalar u2 = a * (Scalar(1) / rho - Scalar(1));
  const Scalar prec = a / v1 + b / v2;

  Scalar d1, d2;  // mu_l - mu_1, mu_l - mu_2
  if (rule == InterpolantMean::precision_weighted) {
    d1 = b * (m2 - m1) / (prec * v2);
    d2 = a * (m1 - m2) / (prec * v1);
  } else {
    const Scalar mu = a * m1 / v1 + b * m2 / v2;
    d1 = mu - m1;
    d2 = mu - m2;
  }
  // tr(Sigma_l^-1 ((1-l)S1 + l S2)) - 1  and  log(|S_l| / |S1|^(1-l) |S2|^l)
  Scalar trace = Scalar(0), logdet = Scalar(0);
  if (a > Scalar(0)) {
    trace += a * u1;
    logdet -= a * log1p(u1);
  }
  if (b > Scalar(0)) {
    trace += b * u2;
    logdet -= b * log1p(u2);
  }
  return Scalar(0.5) * (trace + logdet + a * prec * d1 * d1 + b * prec * d2 * d2);
}

// Partial derivatives of js_geo_coord (precision-weighted rule) with respect
// to (m1, v1, m2, v2). A floored variance has zero derivative.
template <typename Scalar>
void js_geo_coord_grad(Scalar m1, Scalar v1_raw, Scalar m2, Scalar v2_raw, Scalar lambda,
                       Scalar& dm1, Scalar& dv1, Scalar& dm2, Scalar& dv2) {
  const Scalar floor(kVarianceFloor);
  const Scalar v1 = std::max(v1_raw, floor);
  const Scalar v2 = std::max(v2_raw, floor);
  const Scalar a = Scalar(1) - lambda;
  const Scalar b = lambda;
  const Scalar p1 = Scalar(1) / v1;
  const Scalar p2 = Scalar(1) / v2;
  const Scalar prec = a * p1 + b * p2;
  const Scalar vl = Scalar(1) / prec;
  const Scalar delta = m1 - m2;
  const Scalar q = a * p1 * p1 + b * p2 * p2;
  const Scalar mix = a * v1 + b * v2;
  const Scalar abd2 = a * b * delta * delta;

  dm1 = a * b * delta * q * vl;
  dm2 = -dm1;
  dv1 = Scalar(0.5) * a * (prec - p1) -
        p1 * p1 * Scalar(0.5) * a * (mix - vl + abd2 * vl * (Scalar(2) * p1 - q * vl));
  dv2 = Scalar(0.5) * b * (prec - p2) -
        p2 * p2 * Scalar(0.5) * b * (mix - vl + abd2 * vl * (Scalar(2) * p2 - q * vl));
  if (v1_raw < floor) dv1 = Scalar(0);
  if (v2_raw < floor) dv2 = Scalar(0);
}

}  // namespace detail

/// KL(p || q) for diagonal Gaussians.
template <typename Scalar>
Scalar kl_diag(const GaussianDiag<Scalar>& p, const GaussianDiag<Scalar>& q) {
  detail::require_pair(p, q);
  const Vector<Scalar> vp_vec = detail::floored(p.var), vq_vec = detail::floored(q.var);
  const Vector<Scalar> diff_vec = p.mean - q.mean;
  const auto vp = vp_vec.array();
  const auto vq = vq_vec.array();
  const auto diff = diff_vec.array();
  return Scalar(0.5) *
         ((vq / vp).log() + (vp + diff.square()) / vq - Scalar(1)).sum();
}

/// The normalized weighted geometric mean N_l of p and q. lambda = 0 gives
/// p, lambda = 1 gives q.
template <typename Scalar>
GaussianDiag<Scalar> geometric_interpolant(
    const GaussianDiag<Scalar>& p, const GaussianDiag<Scalar>& q, SkewParam s,
    InterpolantMean rule = InterpolantMean::precision_weighted) {
  detail::require_pair(p, q);
  const Scalar lambda(s.value());
  if (rule == InterpolantMean::precision_weighted) {
    if (s.value() == 0.0) return p;
    if (s.value() == 1.0) return q;
  }
  const Vector<Scalar> prec1 = detail::floored(p.var).cwiseInverse();
  const Vector<Scalar> prec2 = detail::floored(q.var).cwiseInverse();
  const Vector<Scalar> prec = (Scalar(1) - lambda) * prec1 + lambda * prec2;
  GaussianDiag<Scalar> out;
  out.var = prec.cwiseInverse();
  out.mean = (Scalar(1) - lambda) * prec1.cwiseProduct(p.mean) +
             lambda * prec2.cwiseProduct(q.mean);
  if (rule == InterpolantMean::precision_weighted) out.mean = out.mean.cwiseProduct(out.var);
  return out;
}

/// Skew-geometric JS divergence, evaluated as one closed-form expression
/// (trace, log-determinant and two Mahalanobis terms about N_l).
template <typename Scalar>
Scalar js_geo(const GaussianDiag<Scalar>& p, const GaussianDiag<Scalar>& q,
              SkewParam s = SkewParam(0.5),
              InterpolantMean rule = InterpolantMean::precision_weighted) {
  detail::require_pair(p, q);
  const Scalar lambda(s.value());
  Scalar total(0);
  for (Index i = 0; i < p.dim(); ++i) {
    total += detail::js_geo_coord(p.mean[i], p.var[i], q.mean[i], q.var[i], lambda, rule);
  }
  return total;
}

/// Same quantity as js_geo, computed as (1-l) KL(p || N_l) + l KL(q || N_l).
template <typename Scalar>
Scalar js_geo_composed(const GaussianDiag<Scalar>& p, const GaussianDiag<Scalar>& q,
                       SkewParam s = SkewParam(0.5),
                       InterpolantMean rule = InterpolantMean::precision_weighted) {
  const auto mid = geometric_interpolant(p, q, s, rule);
  const Scalar lambda(s.value());
  Scalar out(0);
  if (s.value() < 1.0) out += (Scalar(1) - lambda) * kl_diag(p, mid);
  if (s.value() > 0.0) out += lambda * kl_diag(q, mid);
  return out;
}

template <typename Scalar>
Scalar sqrt_js_geo(const GaussianDiag<Scalar>& p, const GaussianDiag<Scalar>& q,
                   SkewParam s = SkewParam(0.5)) {
  using std::sqrt;
  return sqrt(std::max(js_geo(p, q, s), Scalar(0)));
}

template <typename Scalar>
struct PairGradient {
  Scalar value{};
  Vector<Scalar> dmean_p, dvar_p, dmean_q, dvar_q;
};

/// js_geo together with its partial derivatives.
template <typename Scalar>
PairGradient<Scalar> js_geo_gradient(const GaussianDiag<Scalar>& p,
                                     const GaussianDiag<Scalar>& q,
                                     SkewParam s = SkewParam(0.5)) {
  detail::require_pair(p, q);
  const Index d = p.dim();
  const Scalar lambda(s.value());
  PairGradient<Scalar> g;
  g.value = js_geo(p, q, s);
  g.dmean_p.resize(d);
  g.dvar_p.resize(d);
  g.dmean_q.resize(d);
  g.dvar_q.resize(d);
  for (Index i = 0; i < d; ++i) {
    detail::js_geo_coord_grad(p.mean[i], p.var[i], q.mean[i], q.var[i], lambda, g.dmean_p[i],
                              g.dvar_p[i], g.dmean_q[i], g.dvar_q[i]);
  }
  return g;
}

/// Smallest divergence used in the denominator of d sqrt(f) = df / (2 sqrt f).
inline constexpr double kSqrtGradFloor = 1e-12;

template <typename Scalar>
PairGradient<Scalar> sqrt_js_geo_gradient(const GaussianDiag<Scalar>& p,
                                          const GaussianDiag<Scalar>& q,
                                          SkewParam s = SkewParam(0.5)) {
  using std::sqrt;
  auto g = js_geo_gradient(p, q, s);
  const Scalar f = std::max(g.value, Scalar(0));
  const Scalar scale = Scalar(0.5) / sqrt(std::max(f, Scalar(kSqrtGradFloor)));
  g.value = sqrt(f);
  g.dmean_p *= scale;
  g.dvar_p *= scale;
  g.dmean_q *= scale;
  g.dvar_q *= scale;
  return g;
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

namespace detail {

inline double log_density(const GaussianDiag<double>& g, const VectorXd& x) {
  const VectorXd v_vec = floored(g.var);
  const auto v = v_vec.array();
  return -0.5 * ((x - g.mean).array().square() / v + v.log() +
                 std::log(2.0 * std::numbers::pi))
                    .sum();
}

}  // namespace detail

/// Monte-Carlo estimate of the ordinary JS divergence
/// 1/2 KL(P || M) + 1/2 KL(Q || M), M = (P + Q) / 2.
///
/// Samples x ~ M and averages h(r) = 1/2 r log r + 1/2 (2-r) log(2-r) with
/// r = p(x) / m(x) in [0, 2]. Every h(r) lies in [0, log 2], so the estimate
/// does as well. Deterministic for a fixed seed on a given standard library.
inline MonteCarloEstimate js_mixture_mc(const GaussianDiag<double>& p,
                                        const GaussianDiag<double>& q,
                                        std::int64_t n_samples, std::uint64_t seed) {
  detail::require_pair(p, q);
  if (n_samples < 1) throw std::invalid_argument("js_mixture_mc: n_samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const Index d = p.dim();
  const VectorXd sd_p = detail::floored(p.var).cwiseSqrt();
  const VectorXd sd_q = detail::floored(q.var).cwiseSqrt();
  VectorXd x(d);
  auto h = [](double r) { return r > 0.0 ? 0.5 * r * std::log(r) : 0.0; };
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t n = 0; n < n_samples; ++n) {
    const bool from_p = coin(rng);
    for (Index i = 0; i < d; ++i) x[i] = normal(rng);
    x = from_p ? VectorXd(p.mean + sd_p.cwiseProduct(x)) : VectorXd(q.mean + sd_q.cwiseProduct(x));
    const double lp = detail::log_density(p, x);
    const double lq = detail::log_density(q, x);
    // r = 2 p / (p + q) = 2 sigmoid(lp - lq)
    const double r = 2.0 / (1.0 + std::exp(lq - lp));
    const double value = std::clamp(h(r) + h(2.0 - r), 0.0, std::numbers::ln2);
    sum += value;
    sum_sq += value * value;
  }
  const double nn = static_cast<double>(n_samples);
  MonteCarloEstimate out;
  out.estimate = std::clamp(sum / nn, 0.0, std::numbers::ln2);
  const double var = n_samples > 1 ? std::max(0.0, (sum_sq - nn * out.estimate * out.estimate) / (nn - 1.0)) : 0.0;
  out.std_error = std::sqrt(var / nn);
  return out;
}

/// One-dimensional quadrature of JS^G_l straight from the densities:
/// (1-l) * int p log(p / g) + l * int q log(q / g), with g the normalized
/// geometric mean p^(1-l) q^l / Z. Composite Simpson rule on a grid covering
/// +-12 standard deviations of both inputs.
inline double js_geo_quadrature_1d(const GaussianDiag<double>& p, const GaussianDiag<double>& q,
                                   SkewParam s, std::int64_t grid_points = 20001) {
  detail::require_pair(p, q);
  if (p.dim() != 1) throw std::invalid_argument("js_geo_quadrature_1d: requires d = 1");
  if (grid_points < 3) throw std::invalid_argument("js_geo_quadrature_1d: grid_points must be >= 3");
  if (grid_points % 2 == 0) ++grid_points;
  const double lambda = s.value();
  const double m1 = p.mean[0], m2 = q.mean[0];
  const double v1 = std::max(p.var[0], kVarianceFloor), v2 = std::max(q.var[0], kVarianceFloor);
  const double s1 = std::sqrt(v1), s2 = std::sqrt(v2);
  const double lo = std::min(m1 - 12.0 * s1, m2 - 12.0 * s2);
  const double hi = std::max(m1 + 12.0 * s1, m2 + 12.0 * s2);
  const double h = (hi - lo) / static_cast<double>(grid_points - 1);
  const double log2pi = std::log(2.0 * std::numbers::pi);

  auto log_normal = [&](double x, double m, double v) {
    return -0.5 * ((x - m) * (x - m) / v + std::log(v) + log2pi);
  };
  auto simpson_weight = [&](std::int64_t k) {
    if (k == 0 || k == grid_points - 1) return 1.0;
    return k % 2 == 1 ? 4.0 : 2.0;
  };

  // log Z of the unnormalized geometric mean, with a max shift.
  double max_lg = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < grid_points; ++k) {
    const double x = lo + h * static_cast<double>(k);
    max_lg = std::max(max_lg, (1.0 - lambda) * log_normal(x, m1, v1) + lambda * log_normal(x, m2, v2));
  }
  double z = 0.0;
  for (std::int64_t k = 0; k < grid_points; ++k) {
    const double x = lo + h * static_cast<double>(k);
    const double lg = (1.0 - lambda) * log_normal(x, m1, v1) + lambda * log_normal(x, m2, v2);
    z += simpson_weight(k) * std::exp(lg - max_lg);
  }
  const double log_z = std::log(z * h / 3.0) + max_lg;

  double i1 = 0.0, i2 = 0.0;
  for (std::int64_t k = 0; k < grid_points; ++k) {
    const double x = lo + h * static_cast<double>(k);
    const double lp = log_normal(x, m1, v1);
    const double lq = log_normal(x, m2, v2);
    const double lg = (1.0 - lambda) * lp + lambda * lq - log_z;
    const double w = simpson_weight(k);
    i1 += w * std::exp(lp) * (lp - lg);
    i2 += w * std::exp(lq) * (lq - lg);
  }
  return (h / 3.0) * ((1.0 - lambda) * i1 + lambda * i2);
}

}  // namespace sidescore

#endif  // SIDESCORE_DIVERGENCE_HPP_
