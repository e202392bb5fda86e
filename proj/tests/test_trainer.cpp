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
#include <vector>

#include "doctest.h"
#include "sidescore/data.hpp"
#include "sidescore/divergence.hpp"
#include "sidescore/eval.hpp"
#include "sidescore/trainer.hpp"

using namespace sidescore;

namespace {

struct Fixture {
  Dataset train, test;
};

const Fixture& blobs() {
  static const Fixture f = [] {
    const auto all = make_blobs(60, 4, 2, 0.5, 7);
    const std::vector<double> frac = {0.75};
    auto s = split(all, frac, 11, true);
    return Fixture{std::move(s.train), std::move(s.test)};
  }();
  return f;
}

ModelSpec blob_spec() {
  ModelSpec s;
  s.input_dim = 2;
  s.latent_dim = 2;
  s.hidden_layers = {16, 8};
  s.head_hidden = {8};
  s.n_score_classes = 4;
  s.side_kind = SideKind::categorical;
  s.side_classes = 4;
  return s;
}

TrainConfig base_config(int epochs, LossWeights w) {
  TrainConfig c;
  c.epochs = epochs;
  c.batch_size = 32;
  c.learning_rate = 3e-3;
  c.seed = 5;
  c.weights = w;
  return c;
}

std::vector<MatrixXd> snapshot(Model<double>& m) {
  std::vector<MatrixXd> out;
  for (auto& p : m.parameters()) out.push_back(*p.value);
  return out;
}

bool same_history(const TrainHistory& a, const TrainHistory& b) {
  if (a.epochs.size() != b.epochs.size()) return false;
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    const auto &x = a.epochs[i].loss, &y = b.epochs[i].loss;
    if (x.total != y.total || x.recon != y.recon || x.prior_kl != y.prior_kl || x.triplet != y.triplet ||
        x.side != y.side || x.score != y.score || x.labeled != y.labeled)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("all-zero weights leave parameters unchanged") {
  const auto cfg = base_config(3, LossWeights{0, 0, 0, 0, 0});
  Model<double> fresh(blob_spec());
  fresh.init(cfg.seed);
  auto result = train<double>(blob_spec(), blobs().train, cfg);
  CHECK(snapshot(result.model) == snapshot(fresh));
  CHECK(result.history.epochs.size() == 3);
  for (const auto& e : result.history.epochs) CHECK(e.loss.total == 0.0);
}

TEST_CASE("reconstruction-only training decreases the reconstruction term") {
  const auto cfg = base_config(5, LossWeights{1, 0, 0, 0, 0});
  const auto result = train<double>(blob_spec(), blobs().train, cfg);
  REQUIRE(result.history.epochs.size() == 5);
  for (std::size_t i = 1; i < 5; ++i) {
    CHECK(result.history.epochs[i].loss.recon < result.history.epochs[i - 1].loss.recon);
  }
  // The trained decoder beats a freshly initialized one on held-out rows.
  Model<double> fresh(blob_spec());
  fresh.init(cfg.seed);
  const MatrixXd& x = blobs().test.features;
  auto nll = [&](const Model<double>& m) {
    return reconstruction_term(x, m.decoder_logits(m.embed(x)), Likelihood::gaussian_unit_var);
  };
  CHECK(nll(result.model) < nll(fresh));
}

TEST_CASE("triplet-only training separates classes on held-out data") {
  auto cfg = base_config(30, LossWeights{0, 0, 1, 0, 0});
  const auto result = train<double>(blob_spec(), blobs().train, cfg);
  const auto post = result.model.encode(blobs().test.features);
  const auto& labels = eval::eval_labels(blobs().test);
  double within = 0, between = 0;
  int nw = 0, nb = 0;
  for (Index i = 0; i < post.size(); ++i) {
    for (Index j = i + 1; j < post.size(); ++j) {
      const double d = sqrt_js_geo(post.row(i), post.row(j));
      if (labels[std::size_t(i)] == labels[std::size_t(j)]) {
        within += d;
        ++nw;
      } else {
        between += d;
        ++nb;
      }
    }
  }
  CHECK(within / nw < between / nb);
}

TEST_CASE("training is deterministic and the recorded total is the weighted sum") {
  LossWeights w{1, 0.5, 1, 1, 1};
  w.margin = 1.0;
  const auto cfg = base_config(4, w);
  const auto a = train<double>(blob_spec(), blobs().train, cfg);
  const auto b = train<double>(blob_spec(), blobs().train, cfg);
  CHECK(same_history(a.history, b.history));
  for (const auto& e : a.history.epochs) {
    const auto& l = e.loss;
    CHECK(l.total == w.alpha * l.recon + w.beta * l.prior_kl + w.gamma * l.triplet + w.delta * l.side +
                         w.zeta * l.score + w.labeled * l.labeled);
    CHECK(std::isfinite(l.total));
    CHECK(e.triplets > 0);
  }
  auto other = cfg;
  other.seed = 6;
  CHECK_FALSE(same_history(train<double>(blob_spec(), blobs().train, other).history, a.history));
}

TEST_CASE("float training runs and tracks the double run") {
  const auto cfg = base_config(3, LossWeights{1, 1, 1, 1, 1});
  const auto f = train<float>(blob_spec(), blobs().train, cfg);
  const auto d = train<double>(blob_spec(), blobs().train, cfg);
  REQUIRE(f.history.epochs.size() == 3);
  CHECK(f.history.epochs[0].loss.total == doctest::Approx(d.history.epochs[0].loss.total).epsilon(1e-3));
}

TEST_CASE("quantile and self-supervised regimes on continuous side information") {
  Dataset data = blobs().train;
  std::vector<double> values(std::size_t(data.rows()));
  for (Index i = 0; i < data.rows(); ++i) values[std::size_t(i)] = data.features(i, 0) + 0.1 * data.features(i, 1);
  data.side = SideInfo::continuous(values);
  auto spec = blob_spec();
  spec.side_kind = SideKind::continuous;
  spec.side_classes = 0;
  auto cfg = base_config(2, LossWeights{1, 1, 1, 1, 1});
  cfg.regime = TripletRegime::by_quantile;
  const auto q = train<double>(spec, data, cfg);
  CHECK(q.history.epochs.back().triplets > 0);
  cfg.regime = TripletRegime::self_supervised;
  cfg.augment.feature_std = VectorXd::Ones(2);
  const auto s = train<double>(spec, data, cfg);
  CHECK(s.history.epochs.back().triplets > 0);
  cfg.regime = TripletRegime::off;
  CHECK(train<double>(spec, data, cfg).history.epochs.back().triplets == 0);
}

TEST_CASE("semi-supervised reductions") {
  LossWeights w{1, 1, 1, 1, 1};
  w.labeled = 1.0;
  const auto cfg = base_config(3, w);
  const auto plain = train<double>(blob_spec(), blobs().train, cfg);
  const std::vector<int> none(std::size_t(blobs().train.rows()), -1);
  CHECK(same_history(train_semi_supervised<double>(blob_spec(), blobs().train, none, cfg).history, plain.history));

  std::vector<int> some = none;
  const auto& truth = eval::eval_labels(blobs().train);
  for (std::size_t i = 0; i < 20; ++i) some[i] = int(truth[i]);
  auto off = cfg;
  off.weights.labeled = 0.0;
  CHECK(same_history(train_semi_supervised<double>(blob_spec(), blobs().train, some, off).history,
                     train<double>(blob_spec(), blobs().train, off).history));
  const auto semi = train_semi_supervised<double>(blob_spec(), blobs().train, some, cfg);
  CHECK(semi.history.epochs.back().loss.labeled > 0.0);
  std::vector<int> bad = none;
  bad[3] = 4;
  CHECK_THROWS_AS(train_semi_supervised<double>(blob_spec(), blobs().train, bad, cfg), DataError);
}

TEST_CASE("configuration errors") {
  auto cfg = base_config(1, LossWeights{1, 1, 1, 1, 1});
  Dataset no_side = blobs().train;
  no_side.side.reset();
  auto spec = blob_spec();
  CHECK_THROWS_AS(train<double>(spec, no_side, cfg), ConfigError);
  cfg.epochs = 0;
  CHECK_THROWS_AS(train<double>(spec, blobs().train, cfg), ConfigError);
  cfg = base_config(1, LossWeights{1, 1, 1, 1, 1});
  cfg.batch_size = 1;
  CHECK_THROWS_AS(train<double>(spec, blobs().train, cfg), ConfigError);
  cfg = base_config(1, LossWeights{1, 1, 1, 1, 1});
  spec.side_classes = 5;
  CHECK_THROWS_AS(train<double>(spec, blobs().train, cfg), ConfigError);
}

TEST_CASE("a non-finite loss aborts and names the component") {
  const auto cfg = base_config(1, LossWeights{1, 1, 1, 1, 1});
  Dataset huge = blobs().train;
  huge.features *= 1e160;  // squared errors overflow to infinity
  try {
    train<double>(blob_spec(), huge, cfg);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.component() == "recon");
  }
}

TEST_CASE("epoch callback sees every epoch") {
  const auto cfg = base_config(4, LossWeights{1, 1, 1, 1, 1});
  std::vector<int> seen;
  train<double>(blob_spec(), blobs().train, cfg, [&](const EpochRecord& r) { seen.push_back(r.epoch); });
  CHECK(seen == std::vector<int>{1, 2, 3, 4});
}
