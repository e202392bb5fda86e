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

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sidescore/divergence.hpp"

using namespace sidescore;
using sidescore::testing::gauss1;

TEST_CASE("kl_diag closed form") {
  CHECK(kl_diag(gauss1(0, 1), gauss1(0, 1)) == 0.0);
  CHECK(kl_diag(gauss1(0, 1), gauss1(1, 1)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(kl_diag(gauss1(0, 1), gauss1(0, 4)) == doctest::Approx(0.31815).epsilon(1e-5));
  CHECK(kl_diag(gauss1(0, 1), gauss1(0, 4)) == doctest::Approx(std::log(2.0) + 0.125 - 0.5).epsilon(1e-14));
}

TEST_CASE("kl_diag agrees with a Monte-Carlo log-ratio average") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (const auto& [p, q] : {std::pair{gauss1(0, 1), gauss1(1, 1)}, std::pair{gauss1(0, 1), gauss1(0, 4)}}) {
    const int n = 400000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double x = p.mean[0] + std::sqrt(p.var[0]) * z(rng);
      const double r = testing::log_normal_pdf(x, p.mean[0], p.var[0]) - testing::log_normal_pdf(x, q.mean[0], q.var[0]);
      sum += r;
      sq += r * r;
    }
    const double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(kl_diag(p, q) - mean) < 4 * se);
  }
}

TEST_CASE("kl_diag input checks") {
  CHECK_THROWS_AS(kl_diag(gauss1(0, 1), GaussianDiag<double>::standard(2)), std::invalid_argument);
  CHECK_THROWS_AS(kl_diag(gauss1(0, -1), gauss1(0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(kl_diag(gauss1(0, 0), gauss1(0, 1)), std::invalid_argument);
}

TEST_CASE("geometric_interpolant endpoints and midpoint") {
  std::mt19937_64 rng(5);
  const auto p = testing::random_gaussian(rng, 3), q = testing::random_gaussian(rng, 3);
  CHECK(geometric_interpolant(p, q, SkewParam(0.0)) == p);
  CHECK(geometric_interpolant(p, q, SkewParam(1.0)) == q);
  const auto mid = geometric_interpolant(gauss1(0, 1), gauss1(1, 1), SkewParam(0.5));
  CHECK(mid.mean[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mid.var[0] == doctest::Approx(1.0).epsilon(1e-15));
  // Near-endpoint skews converge to the endpoints too.
  const auto near0 = geometric_interpolant(p, q, SkewParam(1e-9));
  CHECK((near0.mean - p.mean).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("geometric_interpolant without the covariance factor misses the endpoint") {
  const auto p = gauss1(1.0, 4.0), q = gauss1(0.0, 1.0);
  const auto wrong = geometric_interpolant(p, q, SkewParam(0.0), InterpolantMean::unnormalized);
  CHECK(wrong.mean[0] == doctest::Approx(0.25));
}

TEST_CASE("js_geo hand values and oracles") {
  CHECK(js_geo(gauss1(0, 1), gauss1(1, 1), SkewParam(0.5)) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(std::abs(js_geo(gauss1(0, 1), gauss1(1, 1), SkewParam(0.5)) - 0.125) <= 1e-9);
  CHECK(sqrt_js_geo(gauss1(0, 1), gauss1(1, 1)) == doctest::Approx(0.35355).epsilon(1e-5));
  CHECK(sqrt_js_geo(gauss1(0, 1), gauss1(3, 1)) == doctest::Approx(1.06066).epsilon(1e-5));
  // Values from adaptive scipy quadrature of the defining integrals.
  CHECK(js_geo(gauss1(0, 1), gauss1(0, 4), SkewParam(0.3)) == doctest::Approx(0.15575197064641155).epsilon(1e-9));
  CHECK(js_geo(gauss1(-1, 0.5), gauss1(2, 3), SkewParam(0.7)) == doctest::Approx(1.6971185544471303).epsilon(1e-9));
  CHECK(js_geo(gauss1(0, 1), gauss1(0, 4), SkewParam(0.3)) ==
        doctest::Approx(testing::js_geo_by_integration(0, 1, 0, 4, 0.3)).epsilon(1e-7));
}

TEST_CASE("js_geo identity, symmetry and composition") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const Index d = 1 + t % 8;
    const auto p = testing::random_gaussian(rng, d), q = testing::random_gaussian(rng, d);
    const double lam = unit(rng);
    CHECK(js_geo(p, p, SkewParam(lam)) == 0.0);
    CHECK(js_geo(p, q, SkewParam(lam)) >= 0.0);
    CHECK(std::abs(js_geo(p, q, SkewParam(lam)) - js_geo(q, p, SkewParam(1 - lam))) <= 1e-9);
    CHECK(std::abs(js_geo(p, q, SkewParam(lam)) - js_geo_composed(p, q, SkewParam(lam))) <= 1e-9);
  }
  CHECK(js_geo(gauss1(0, 2), gauss1(1, 3), SkewParam(0.5)) == js_geo(gauss1(1, 3), gauss1(0, 2), SkewParam(0.5)));
}

TEST_CASE("js_geo_quadrature_1d") {
  CHECK(std::abs(js_geo_quadrature_1d(gauss1(0.3, 2), gauss1(0.3, 2), SkewParam(0.4))) <= 1e-8);
  CHECK(std::abs(js_geo_quadrature_1d(gauss1(0, 1), gauss1(1, 1), SkewParam(0.5)) - 0.125) <= 1e-6);
  CHECK(std::abs(js_geo_quadrature_1d(gauss1(0, 1), gauss1(0, 4), SkewParam(0.3)) -
                 js_geo(gauss1(0, 1), gauss1(0, 4), SkewParam(0.3))) <= 1e-5);
  CHECK_THROWS_AS(js_geo_quadrature_1d(GaussianDiag<double>::standard(2), GaussianDiag<double>::standard(2),
                                       SkewParam(0.5)),
                  std::invalid_argument);
}

TEST_CASE("js_mixture_mc") {
  const auto same = js_mixture_mc(gauss1(0, 1), gauss1(0, 1), 20000, 1);
  CHECK(std::abs(same.estimate) <= 3 * same.std_error + 1e-15);
  const auto a = js_mixture_mc(gauss1(0, 1), gauss1(1, 1), 1000000, 20240101);
  // Independent reference: scipy adaptive quadrature of the mixture JS.
  const double truth = 0.11142148218473617;
  CHECK(std::abs(a.estimate - truth) < 3 * a.std_error);
  CHECK(a.estimate >= 0.0);
  CHECK(a.estimate <= std::log(2.0));
  // Regression value for seed 20240101 and 10^6 samples.
  CHECK(a.estimate == doctest::Approx(0.11137314745391884).epsilon(1e-12));
  const auto b = js_mixture_mc(gauss1(0, 1), gauss1(1, 1), 1000000, 20240101);
  CHECK(a.estimate == b.estimate);
  const auto far = js_mixture_mc(gauss1(0, 0.01), gauss1(50, 0.01), 5000, 2);
  CHECK(far.estimate <= std::log(2.0));
  CHECK(far.estimate == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("js_geo gradient matches central differences") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + t % 4;
    const auto p = testing::random_gaussian(rng, d), q = testing::random_gaussian(rng, d);
    const SkewParam lam(unit(rng));
    const auto g = js_geo_gradient(p, q, lam);
    const auto gs = sqrt_js_geo_gradient(p, q, lam);
    for (Index i = 0; i < d; ++i) {
      auto fp_mean = [&](VectorXd m) { return js_geo(GaussianDiag<double>{m, p.var}, q, lam); };
      auto fp_var = [&](VectorXd v) { return js_geo(GaussianDiag<double>{p.mean, v}, q, lam); };
      auto fq_mean = [&](VectorXd m) { return js_geo(p, GaussianDiag<double>{m, q.var}, lam); };
      auto fq_var = [&](VectorXd v) { return js_geo(p, GaussianDiag<double>{q.mean, v}, lam); };
      auto sq_mean = [&](VectorXd m) { return sqrt_js_geo(GaussianDiag<double>{m, p.var}, q, lam); };
      worst = std::max({worst, testing::rel_error(g.dmean_p[i], testing::central_difference(fp_mean, p.mean, i)),
                        testing::rel_error(g.dvar_p[i], testing::central_difference(fp_var, p.var, i)),
                        testing::rel_error(g.dmean_q[i], testing::central_difference(fq_mean, q.mean, i)),
                        testing::rel_error(g.dvar_q[i], testing::central_difference(fq_var, q.var, i)),
                        testing::rel_error(gs.dmean_p[i], testing::central_difference(sq_mean, p.mean, i))});
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("sqrt_js_geo gradient at coincident inputs is finite") {
  const auto g = sqrt_js_geo_gradient(gauss1(0, 1), gauss1(0, 1), SkewParam(0.5));
  CHECK(g.value == 0.0);
  CHECK(std::isfinite(g.dmean_p[0]));
  CHECK(std::isfinite(g.dvar_q[0]));
}

TEST_CASE("variance floor keeps tiny variances finite") {
  const auto p = gauss1(0, 1e-12), q = gauss1(0.1, 1.0);
  CHECK(std::isfinite(js_geo(p, q, SkewParam(0.5))));
  CHECK(std::isfinite(kl_diag(p, q)));
}

TEST_CASE("float and double agree") {
  GaussianDiag<float> pf{Vector<float>::Constant(2, 0.5f), Vector<float>::Constant(2, 2.0f)};
  GaussianDiag<float> qf{Vector<float>::Constant(2, -0.5f), Vector<float>::Constant(2, 0.5f)};
  const GaussianDiag<double> pd{pf.mean.cast<double>(), pf.var.cast<double>()};
  const GaussianDiag<double> qd{qf.mean.cast<double>(), qf.var.cast<double>()};
  CHECK(js_geo(pf, qf) == doctest::Approx(js_geo(pd, qd)).epsilon(1e-6));
}
