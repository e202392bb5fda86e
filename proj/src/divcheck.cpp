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

#include "sidescore/divcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace sidescore {
namespace {

using G = GaussianDiag<double>;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  G gaussian(Index d) {
    std::uniform_real_distribution<double> mean(-3.0, 3.0), log_var(std::log(0.1), std::log(10.0));
    G g;
    g.mean.resize(d);
    g.var.resize(d);
    for (Index i = 0; i < d; ++i) {
      g.mean[i] = mean(rng_);
      g.var[i] = std::exp(log_var(rng_));
    }
    return g;
  }
  Index dim() {
    static constexpr Index dims[] = {1, 2, 8};
    return dims[std::uniform_int_distribution<int>(0, 2)(rng_)];
  }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

 private:
  std::mt19937_64 rng_;
};

void record(PropertyResult& r, double error, bool violated) {
  ++r.trials;
  r.worst = std::max(r.worst, error);
  r.violations += violated;
}

double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

}  // namespace

std::vector<PropertyResult> run_divcheck(const DivcheckOptions& opt) {
  const InterpolantMean rule = opt.rule;
  const std::size_t n = std::max<std::size_t>(1, opt.n_trials);
  std::vector<PropertyResult> out;

  {
    PropertyResult r{"interpolant_endpoints", 0, 0, 0.0, 1e-12};
    Sampler s(opt.seed + 1);
    for (std::size_t t = 0; t < n; ++t) {
      const Index d = s.dim();
      const G p = s.gaussian(d), q = s.gaussian(d);
      for (double lam : {0.0, 1.0}) {
        const G mid = geometric_interpolant(p, q, SkewParam(lam), rule);
        const G& want = lam == 0.0 ? p : q;
        const double err = std::max((mid.mean - want.mean).cwiseAbs().maxCoeff(),
                                    ((mid.var - want.var).cwiseAbs().array() / want.var.array()).maxCoeff());
        record(r, err, err > r.tolerance);
      }
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"identity_zero", 0, 0, 0.0, 0.0};
    Sampler s(opt.seed + 2);
    for (std::size_t t = 0; t < n; ++t) {
      const G p = s.gaussian(s.dim());
      const double v = std::abs(js_geo(p, p, SkewParam(s.unit()), rule));
      record(r, v, v > r.tolerance);
    }
    out.push_back(r);
  }
  {
    // worst holds the most negative value seen, reported as a magnitude.
    PropertyResult r{"non_negative", 0, 0, 0.0, 0.0};
    Sampler s(opt.seed + 3);
    for (std::size_t t = 0; t < n; ++t) {
      const Index d = s.dim();
      const G p = s.gaussian(d), q = s.gaussian(d);
      const double v = js_geo(p, q, SkewParam(s.unit()), rule);
      record(r, std::max(0.0, -v), v < 0.0);
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"swap_symmetry", 0, 0, 0.0, 1e-9};
    Sampler s(opt.seed + 4);
    for (std::size_t t = 0; t < n; ++t) {
      const Index d = s.dim();
      const G p = s.gaussian(d), q = s.gaussian(d);
      const double lam = s.unit();
      const double err = std::abs(js_geo(p, q, SkewParam(lam), rule) - js_geo(q, p, SkewParam(1.0 - lam), rule));
      record(r, err, err > r.tolerance);
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"closed_form_vs_composed", 0, 0, 0.0, 1e-9};
    Sampler s(opt.seed + 5);
    for (std::size_t t = 0; t < n; ++t) {
      const Index d = s.dim();
      const G p = s.gaussian(d), q = s.gaussian(d);
      const SkewParam lam(s.unit());
      const double err = std::abs(js_geo(p, q, lam, rule) - js_geo_composed(p, q, lam, rule));
      record(r, err, err > r.tolerance);
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"quadrature_1d", 0, 0, 0.0, 1e-5};
    Sampler s(opt.seed + 6);
    const std::size_t trials = std::max<std::size_t>(100, n / 10);
    for (std::size_t t = 0; t < trials; ++t) {
      const G p = s.gaussian(1), q = s.gaussian(1);
      const SkewParam lam(s.unit());
      const double err = std::abs(js_geo(p, q, lam, rule) - js_geo_quadrature_1d(p, q, lam));
      record(r, err, err > r.tolerance);
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"hand_values", 0, 0, 0.0, 1e-9};
    const G a{VectorXd::Constant(1, 0.0), VectorXd::Ones(1)};
    const G b{VectorXd::Constant(1, 1.0), VectorXd::Ones(1)};
    const G c{VectorXd::Constant(1, 3.0), VectorXd::Ones(1)};
    const double errs[] = {std::abs(js_geo(a, b, SkewParam(0.5), rule) - 0.125),
                           std::abs(js_geo(a, c, SkewParam(0.5), rule) - 9.0 / 8.0),
                           std::abs(kl_diag(a, b) - 0.5)};
    for (double e : errs) record(r, e, e > r.tolerance);
    out.push_back(r);
  }
  {
    PropertyResult r{"sqrt_symmetry_lambda_half", 0, 0, 0.0, 1e-9};
    PropertyResult pos{"sqrt_positive_when_means_differ", 0, 0, 0.0, 0.0};
    PropertyResult tri{"sqrt_triangle_inequality", 0, 0, 0.0, 1e-9, false};
    Sampler s(opt.seed + 7);
    const SkewParam half(0.5);
    auto dist = [&](const G& x, const G& y) { return std::sqrt(std::max(0.0, js_geo(x, y, half, rule))); };
    for (std::size_t t = 0; t < 10 * n; ++t) {
      const Index d = s.dim();
      const G a = s.gaussian(d), b = s.gaussian(d), c = s.gaussian(d);
      const double ab = dist(a, b), bc = dist(b, c), ac = dist(a, c);
      const double sym = std::abs(ab - dist(b, a));
      record(r, sym, sym > r.tolerance);
      const double excess = ac - ab - bc;
      record(tri, std::max(0.0, excess), excess > tri.tolerance);
      G shifted = a;
      shifted.mean[0] += 1e-3;
      const double sep = dist(a, shifted);
      record(pos, sep > 0.0 ? 0.0 : 1.0, !(sep > 0.0) || dist(a, a) != 0.0);
    }
    out.push_back(r);
    out.push_back(pos);
    out.push_back(tri);
  }
  {
    PropertyResult r{"gradient_vs_finite_difference", 0, 0, 0.0, 1e-4};
    Sampler s(opt.seed + 8);
    const double h = 1e-5;
    const std::size_t trials = std::max<std::size_t>(50, n / 20);
    for (std::size_t t = 0; t < trials; ++t) {
      const Index d = s.dim();
      const G p = s.gaussian(d), q = s.gaussian(d);
      const SkewParam lam(0.05 + 0.9 * s.unit());
      const auto g = js_geo_gradient(p, q, lam);
      auto f = [&](const G& pp, const G& qq) { return js_geo(pp, qq, lam, rule); };
      for (Index i = 0; i < d; ++i) {
        for (int which = 0; which < 4; ++which) {
          G pp = p, pm = p, qp = q, qm = q;
          double analytic = 0.0;
          switch (which) {
            case 0: pp.mean[i] += h; pm.mean[i] -= h; analytic = g.dmean_p[i]; break;
            case 1: pp.var[i] += h; pm.var[i] -= h; analytic = g.dvar_p[i]; break;
            case 2: qp.mean[i] += h; qm.mean[i] -= h; analytic = g.dmean_q[i]; break;
            default: qp.var[i] += h; qm.var[i] -= h; analytic = g.dvar_q[i]; break;
          }
          const double numeric = which < 2 ? (f(pp, q) - f(pm, q)) / (2 * h) : (f(p, qp) - f(p, qm)) / (2 * h);
          const double err = rel_error(analytic, numeric);
          record(r, err, err > r.tolerance);
        }
      }
    }
    out.push_back(r);
  }
  return out;
}

bool divcheck_passed(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.pass() || !r.gating; });
}

void print_divcheck(std::ostream& out, const std::vector<PropertyResult>& results) {
  char line[256];
  for (const auto& r : results) {
    std::snprintf(line, sizeof(line), "%s %-34s trials=%-6zu violations=%-5zu worst=%.3e tol=%.1e%s\n",
                  r.pass() ? "PASS" : "FAIL", r.name.c_str(), r.trials, r.violations, r.worst, r.tolerance,
                  r.gating ? "" : " (info)");
    out << line;
  }
}

}  // namespace sidescore
