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
#include "sidescore/model.hpp"
#include "sidescore/trainer.hpp"

using namespace sidescore;

namespace {

ModelSpec tabular_spec(SideKind side) {
  ModelSpec s;
  s.input_kind = InputKind::tabular;
  s.input_dim = 5;
  s.latent_dim = 2;
  s.hidden_layers = {7, 6};
  s.head_hidden = {5};
  s.n_score_classes = 3;
  s.side_kind = side;
  s.side_classes = side == SideKind::categorical ? 3 : 0;
  return s;
}

ModelSpec image_spec() {
  ModelSpec s;
  s.input_kind = InputKind::image_28x28;
  s.input_dim = 784;
  s.latent_dim = 2;
  s.hidden_layers = {12, 8};
  s.head_hidden = {6};
  s.conv_channels = {2, 3};
  s.n_score_classes = 4;
  return s;
}

MatrixXd random_matrix(Index r, Index c, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  return MatrixXd::NullaryExpr(r, c, [&] { return u(rng); });
}

/// Relative error between backpropagated and central-difference gradients
/// on up to `per_tensor` entries of every parameter tensor.
double end_to_end_gradient_error(Model<double>& model, const Batch<double>& batch, const LossWeights& w,
                                 TripletReduction red, int per_tensor, std::uint64_t seed) {
  model.zero_grad();
  batch_objective(model, batch, w, red, true);
  std::mt19937_64 rng(seed);
  double worst = 0;
  auto objective = [&] { return total_loss(batch_objective(model, batch, w, red, false), w).total; };
  for (auto& p : model.parameters()) {
    std::uniform_int_distribution<Index> pick(0, p.value->size() - 1);
    for (int k = 0; k < per_tensor; ++k) {
      const Index i = pick(rng);
      double& v = p.value->data()[i];
      const double saved = v, h = 1e-5;
      v = saved + h;
      const double up = objective();
      v = saved - h;
      const double down = objective();
      v = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = p.grad->data()[i];
      const double err = testing::rel_error(analytic, numeric, 1e-6);
      if (err > worst) worst = err;
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("ModelSpec validation") {
  auto s = tabular_spec(SideKind::none);
  CHECK_NOTHROW(s.validate());
  s.latent_dim = 1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = tabular_spec(SideKind::none);
  s.n_score_classes = 1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = image_spec();
  s.input_dim = 100;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = tabular_spec(SideKind::categorical);
  s.side_classes = 1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("encode, decode and heads honour their shape and range contracts") {
  std::mt19937_64 rng(2);
  for (auto side : {SideKind::none, SideKind::categorical, SideKind::continuous}) {
    const auto spec = tabular_spec(side);
    Model<double> m(spec);
    m.init(11);
    const MatrixXd x = random_matrix(9, spec.input_dim, rng, -30, 30);
    const auto post = m.encode(x);
    CHECK(post.mean.rows() == 9);
    CHECK(post.mean.cols() == spec.latent_dim);
    CHECK((post.var.array() > 0).all());
    CHECK(m.embed(x) == post.mean);
    CHECK(m.decode(post.mean).cols() == spec.input_dim);
    const MatrixXd probs = m.predict_score(post.mean);
    CHECK(probs.cols() == spec.n_score_classes);
    CHECK(((probs.rowwise().sum().array() - 1).abs() <= 1e-6).all());
    if (side == SideKind::none) {
      CHECK_THROWS_AS(m.predict_side(post.mean), std::logic_error);
    } else if (side == SideKind::categorical) {
      const MatrixXd sp = m.predict_side(post.mean);
      CHECK(sp.cols() == 3);
      CHECK(((sp.rowwise().sum().array() - 1).abs() <= 1e-6).all());
    } else {
      const MatrixXd sp = m.predict_side(post.mean);
      CHECK(sp.cols() == 2);
      CHECK((sp.col(1).array() > 0).all());
    }
    CHECK_THROWS_AS(m.encode(random_matrix(2, spec.input_dim + 1, rng)), std::invalid_argument);
    MatrixXd bad = random_matrix(2, spec.input_dim, rng);
    bad(1, 1) = std::nan("");
    CHECK_THROWS_AS(m.encode(bad), std::invalid_argument);
  }
}

TEST_CASE("image decoder outputs probabilities") {
  std::mt19937_64 rng(3);
  Model<double> m(image_spec());
  m.init(5);
  const MatrixXd x = random_matrix(3, 784, rng, 0, 1);
  const auto post = m.encode(x);
  const MatrixXd recon = m.decode(post.mean);
  CHECK(recon.cols() == 784);
  CHECK((recon.array() > 0).all());
  CHECK((recon.array() < 1).all());
}

TEST_CASE("encoding is deterministic and row-order preserving") {
  std::mt19937_64 rng(4);
  Model<double> m(tabular_spec(SideKind::none));
  m.init(1);
  MatrixXd x = random_matrix(6, 5, rng);
  x.row(4) = x.row(1);
  const auto post = m.encode(x);
  CHECK(post.mean.row(4) == post.mean.row(1));
  CHECK(post.var.row(4) == post.var.row(1));
  CHECK(m.embed(x) == m.embed(x));
  const MatrixXd reversed = x.colwise().reverse();
  CHECK(m.embed(reversed) == m.embed(x).colwise().reverse());
  Model<double> again(tabular_spec(SideKind::none));
  again.init(1);
  CHECK(again.embed(x) == m.embed(x));
}

TEST_CASE("sample_latent") {
  GaussianBatch<double> post{MatrixXd::Constant(2, 3, 0.5), MatrixXd::Constant(2, 3, 4.0)};
  CHECK(sample_latent(post, MatrixXd(MatrixXd::Zero(2, 3))) == post.mean);
  CHECK(sample_latent(post, MatrixXd(MatrixXd::Ones(2, 3))) == MatrixXd::Constant(2, 3, 2.5));
  GaussianBatch<double> tiny{MatrixXd::Constant(1, 2, 0.5), MatrixXd::Constant(1, 2, 1e-12)};
  CHECK((sample_latent(tiny, MatrixXd(MatrixXd::Constant(1, 2, 3.0))) - tiny.mean).cwiseAbs().maxCoeff() <= 3e-4);
  CHECK_THROWS_AS(sample_latent(post, MatrixXd(MatrixXd::Zero(2, 2))), std::invalid_argument);
}

TEST_CASE("hard_assignments breaks ties toward the lowest index") {
  MatrixXd p(3, 3);
  p << 0.2, 0.4, 0.4,  //
      0.5, 0.25, 0.25,  //
      1.0 / 3, 1.0 / 3, 1.0 / 3;
  CHECK(hard_assignments(p) == std::vector<int>{1, 0, 0});
}

TEST_CASE("end-to-end gradient matches finite differences on a tabular model") {
  std::mt19937_64 rng(6);
  for (auto side : {SideKind::categorical, SideKind::continuous}) {
    Model<double> m(tabular_spec(side));
    m.init(7);
    Batch<double> b;
    b.x = random_matrix(8, 5, rng);
    b.noise = random_matrix(8, 2, rng);
    if (side == SideKind::categorical) {
      b.side_classes = {0, 1, 2, 0, 1, 2, 0, 1};
    } else {
      b.side_values = {0.1, -0.3, 1.2, 0.4, -1.0, 0.0, 0.7, 2.0};
    }
    b.triplets = {{0, 3, 1}, {1, 4, 2}, {2, 5, 0}, {6, 0, 7}};
    b.labeled_x = random_matrix(4, 5, rng);
    b.labeled_noise = random_matrix(4, 2, rng);
    b.labeled_targets = {0, 2, 1, 1};
    LossWeights w{0.7, 0.9, 1.3, 1.1, 0.8};
    w.margin = 10.0;
    w.lambda_skew = 0.4;
    w.labeled = 0.6;
    CHECK(end_to_end_gradient_error(m, b, w, TripletReduction::mean, 4, 1) <= 1e-3);
    // A weight of zero removes the term's gradient contribution entirely.
    LossWeights only_recon{1, 0, 0, 0, 0};
    CHECK(end_to_end_gradient_error(m, b, only_recon, TripletReduction::sum, 4, 2) <= 1e-3);
  }
}

TEST_CASE("end-to-end gradient matches finite differences on an image model with views") {
  std::mt19937_64 rng(9);
  Model<double> m(image_spec());
  m.init(3);
  Batch<double> b;
  b.x = random_matrix(8, 784, rng, 0, 1);
  b.noise = random_matrix(8, 2, rng);
  b.views = random_matrix(8, 784, rng, 0, 1);
  for (std::int64_t i = 0; i < 8; ++i) b.triplets.push_back({i, 8 + i, (i + 1) % 8});
  LossWeights w{1, 1, 1, 0, 1};
  w.margin = 10.0;
  CHECK(end_to_end_gradient_error(m, b, w, TripletReduction::mean, 3, 4) <= 1e-3);
}
