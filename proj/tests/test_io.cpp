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
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "doctest.h"
#include "sidescore/checkpoint.hpp"
#include "sidescore/config.hpp"
#include "sidescore/run.hpp"

using namespace sidescore;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sidescore_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool bitwise_equal(const MatrixXd& a, const MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * std::size_t(a.size())) == 0;
}

const char* kBlobConfig = R"(
[data]
source = blobs
blob_per_class = 40
blob_classes = 3
blob_dim = 2
blob_spread = 0.4
blob_seed = 3
split_seed = 4
[model]
latent_dim = 2
hidden_layers = 16
head_hidden = 8
[train]
epochs = 5
batch_size = 16
learning_rate = 0.003
seed = 9
[output]
dir = unused
)";

}  // namespace

TEST_CASE("checkpoint round trip is bit-exact") {
  const auto dir = scratch("ckpt");
  Checkpoint ck;
  ck.manifest = "[run]\nname = test\n";
  MatrixXd odd(2, 3);
  odd << 0.1, -0.0, std::numeric_limits<double>::denorm_min(), 1e308, -1.0 / 3.0, std::nextafter(1.0, 2.0);
  ck.put("odd", odd);
  ck.put("empty", MatrixXd(0, 4));
  ck.put("col", MatrixXd::Random(5, 1));
  const auto path = (dir / "a.ckpt").string();
  ck.save(path);
  const auto back = Checkpoint::load(path);
  CHECK(back.manifest == ck.manifest);
  REQUIRE(back.arrays.size() == 3);
  for (const auto& a : ck.arrays) {
    REQUIRE(back.find(a.name) != nullptr);
    CHECK(bitwise_equal(*back.find(a.name), a.values));
  }
  CHECK(back.find("missing") == nullptr);
  ck.put("odd", MatrixXd::Zero(1, 1));
  CHECK(ck.arrays.size() == 3);
  fs::remove_all(dir);
}

TEST_CASE("corrupt checkpoints raise DataError") {
  const auto dir = scratch("ckpt_bad");
  Checkpoint ck;
  ck.manifest = "x";
  ck.put("w", MatrixXd::Ones(4, 4));
  const auto path = (dir / "c.ckpt").string();
  ck.save(path);
  const auto size = fs::file_size(path);
  fs::resize_file(path, size - 7);
  CHECK_THROWS_AS(Checkpoint::load(path), DataError);
  std::ofstream(dir / "magic.ckpt") << "NOTACKPT and more bytes";
  CHECK_THROWS_AS(Checkpoint::load((dir / "magic.ckpt").string()), DataError);
  CHECK_THROWS_AS(Checkpoint::load((dir / "none.ckpt").string()), DataError);
  fs::remove_all(dir);
}

TEST_CASE("model parameters survive export and import") {
  ModelSpec spec;
  spec.input_dim = 3;
  spec.hidden_layers = {5};
  spec.head_hidden = {4};
  spec.n_score_classes = 3;
  spec.side_kind = SideKind::continuous;
  Model<double> a(spec), b(spec);
  a.init(1);
  b.init(2);
  Checkpoint ck;
  export_parameters(a, ck);
  import_parameters(b, ck);
  const MatrixXd x = MatrixXd::Random(4, 3);
  CHECK(bitwise_equal(a.embed(x), b.embed(x)));
  ModelSpec wider = spec;
  wider.hidden_layers = {6};
  Model<double> c(wider);
  CHECK_THROWS_AS(import_parameters(c, ck), DataError);
}

TEST_CASE("config parse, defaults and round trip") {
  const auto cfg = RunConfig::parse_string(kBlobConfig);
  CHECK(cfg.data.source == DataSource::blobs);
  CHECK(cfg.data.blob_classes == 3);
  CHECK(cfg.model.hidden_layers == std::vector<Index>{16});
  CHECK(cfg.train.epochs == 5);
  CHECK(cfg.train.weights.alpha == 1.0);
  CHECK(cfg.train.weights.lambda_skew == 0.5);
  CHECK(cfg.train.regime == TripletRegime::by_class);
  const auto again = RunConfig::parse_string(cfg.to_ini());
  CHECK(again.to_ini() == cfg.to_ini());
  CHECK(again.train.learning_rate == cfg.train.learning_rate);
  CHECK(again.data.split_seed == 4);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(RunConfig::parse_string("[train]\nepoch = 3\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("[nonsense]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("[train]\nepochs = many\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("[train]\ntriplets = sideways\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("[weights]\nlambda = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_file("/nonexistent/run.ini"), ConfigError);
}

TEST_CASE("run_training produces a loadable, self-describing checkpoint") {
  const auto cfg = RunConfig::parse_string(kBlobConfig);
  const auto out = run_training(cfg);
  CHECK(out.history.epochs.size() == 5);
  CHECK(out.resolved.model.n_score_classes == 3);
  CHECK(out.resolved.model.side_kind == SideKind::categorical);
  const auto loaded = LoadedModel::from_checkpoint(out.checkpoint);
  CHECK(loaded.config().to_ini() == out.resolved.to_ini());
  REQUIRE(loaded.standardizer.has_value());
  CHECK(loaded.score_rank.size() == 3);
  // A second identical run gives an identical checkpoint payload.
  const auto out2 = run_training(cfg);
  REQUIRE(out2.checkpoint.arrays.size() == out.checkpoint.arrays.size());
  for (std::size_t i = 0; i < out.checkpoint.arrays.size(); ++i) {
    CHECK(bitwise_equal(out2.checkpoint.arrays[i].values, out.checkpoint.arrays[i].values));
  }
  CHECK(history_table(out.history) == history_table(out2.history));

  const auto report = eval::evaluate_model(loaded, out.data.test);
  std::set<std::string> keys;
  for (const auto& [k, v] : report.entries()) CHECK(keys.insert(k).second);
  for (const char* k : {"rows", "cluster_accuracy", "pearson_r", "pearson_p", "raw_abs_pearson_r", "side_accuracy",
                        "side_nll"}) {
    CHECK(keys.count(k) == 1);
  }
  CHECK(report.get("rows") == std::to_string(out.data.test.rows()));
}

namespace {

double mean_untrained_accuracy(const RunConfig& cfg, const PreparedData& data, int seeds) {
  const auto spec = resolve_spec(cfg.model, data.train);
  double sum = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    Model<double> m(spec);
    m.init(std::uint64_t(seed));
    LoadedModel loaded(std::move(m), cfg);
    loaded.score_rank = {0, 1, 2};
    sum += std::stod(*eval::evaluate_model(loaded, data.test).get("cluster_accuracy"));
  }
  return sum / seeds;
}

}  // namespace

TEST_CASE("an untrained model scores near chance when features carry no class signal") {
  auto cfg = RunConfig::parse_string(kBlobConfig);
  cfg.data.blob_per_class = 200;
  cfg.data.blob_spread = 100.0;  // centres at radius 4 are lost in the noise
  const double acc = mean_untrained_accuracy(cfg, prepare_data(cfg.data), 10);
  MESSAGE("mean untrained accuracy on overlapping blobs: " << acc);
  CHECK(acc >= 1.0 / 3.0 - 1e-12);
  CHECK(acc <= 1.0 / 3.0 + 0.1);
}

TEST_CASE("training beats an untrained model on separated blobs") {
  auto cfg = RunConfig::parse_string(kBlobConfig);
  cfg.train.epochs = 40;
  const auto out = run_training(cfg);
  const double trained =
      std::stod(*eval::evaluate_model(LoadedModel::from_checkpoint(out.checkpoint), out.data.test).get("cluster_accuracy"));
  const double untrained = mean_untrained_accuracy(cfg, out.data, 20);
  MESSAGE("trained " << trained << " vs mean untrained " << untrained);
  CHECK(trained > untrained);
  CHECK(trained >= 0.95);
}
