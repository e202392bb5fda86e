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

// sidescore command-line tool: train, eval, embed, plot-latent, divcheck.
//
// Exit codes: 0 success, 1 divcheck failure or unexpected error, 2 config
// error, 3 data error, 4 numerical abort.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sidescore/checkpoint.hpp"
#include "sidescore/config.hpp"
#include "sidescore/divcheck.hpp"
#include "sidescore/error.hpp"
#include "sidescore/eval.hpp"
#include "sidescore/plot.hpp"
#include "sidescore/run.hpp"

namespace fs = std::filesystem;
using namespace sidescore;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Options {
  std::string config, checkpoint, data, schema, out, color_by = "side", split = "test";
  std::optional<std::uint64_t> seed;
  std::size_t trials = 1000;
  bool inject_uncorrected_mean = false;
  bool annotate = false;
};

std::string output_dir(const Options& o, const std::string& fallback) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("SIDESCORE_OUT_DIR"); env && *env) return env;
  return fallback;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_report(const eval::Report& report, const fs::path& dir) {
  std::ofstream text(dir / "metrics.txt", std::ios::trunc), table(dir / "metrics.tsv", std::ios::trunc);
  if (!text || !table) throw DataError("cannot write metrics into " + dir.string());
  report.write_text(text);
  report.write_table(table);
}

Dataset eval_dataset(const Options& o, const LoadedModel& model) {
  if (!o.data.empty()) return load_eval_data(o.data, o.schema, model.config(), model.standardizer);
  PreparedData prepared = prepare_data(model.config().data);
  if (o.split == "train") return prepared.train;
  if (o.split == "test") return prepared.test;
  throw ConfigError("--split must be train or test");
}

int cmd_train(const Options& o) {
  RunConfig cfg = RunConfig::parse_file(o.config);
  if (o.seed) cfg.train.seed = *o.seed;
  const fs::path dir = output_dir(o, cfg.out_dir);
  cfg.out_dir = dir.string();
  fs::create_directories(dir);
  RunOutput run = run_training(cfg, [](const EpochRecord& e) {
    std::fprintf(stderr, "epoch %d  total %.6f  recon %.5f  kl %.5f  triplet %.5f  side %.5f  score %.5f  (%.1fs)\n",
                 e.epoch, e.loss.total, e.loss.recon, e.loss.prior_kl, e.loss.triplet, e.loss.side, e.loss.score,
                 e.seconds);
  });
  run.checkpoint.save((dir / "model.ckpt").string());
  write_file(dir / "manifest.ini", run.checkpoint.manifest);
  write_file(dir / "history.csv", history_table(run.history));
  write_file(dir / "timing.csv", timing_table(run.history));
  if (run.data.test.rows() > 0 && run.data.test.has_eval_labels()) {
    const LoadedModel model = LoadedModel::from_checkpoint(run.checkpoint);
    const eval::Report report = eval::evaluate_model(model, run.data.test);
    write_report(report, dir);
    report.write_text(std::cout);
  }
  std::fprintf(stderr, "wrote %s\n", (dir / "model.ckpt").c_str());
  return 0;
}

int cmd_eval(const Options& o) {
  const LoadedModel model = LoadedModel::from_checkpoint(Checkpoint::load(o.checkpoint));
  const Dataset data = eval_dataset(o, model);
  if (!data.has_eval_labels()) throw DataError("evaluation data has no labels");
  const eval::Report report = eval::evaluate_model(model, data);
  report.write_text(std::cout);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_report(report, o.out);
  }
  return 0;
}

int cmd_embed(const Options& o) {
  if (o.out.empty()) throw ConfigError("embed needs --out");
  const LoadedModel model = LoadedModel::from_checkpoint(Checkpoint::load(o.checkpoint));
  const Dataset data = eval_dataset(o, model);
  if (data.features.cols() != model.spec().input_dim) {
    throw DataError("data has " + std::to_string(data.features.cols()) + " features, the model expects " +
                    std::to_string(model.spec().input_dim));
  }
  const GaussianBatch<double> post = model.encode(data.features);
  const Index d = post.dim();
  Table t;
  t.header.push_back("id");
  for (Index j = 0; j < d; ++j) t.header.push_back("mean_" + std::to_string(j));
  for (Index j = 0; j < d; ++j) t.header.push_back("var_" + std::to_string(j));
  Index cols = 1 + 2 * d;
  MatrixXd extra;
  if (o.annotate) {
    std::vector<std::string> names;
    std::vector<VectorXd> columns;
    if (data.side) {
      names.push_back("side");
      columns.push_back(Eigen::Map<const VectorXd>(data.side->values.data(), static_cast<Index>(data.side->size())));
    }
    if (model.has_side_head()) {
      const MatrixXd sp = model.predict_side(post.mean);
      VectorXd inferred(sp.rows());
      if (model.spec().side_kind == SideKind::categorical) {
        const auto hard = hard_assignments(sp);
        for (Index i = 0; i < sp.rows(); ++i) inferred[i] = hard[static_cast<std::size_t>(i)];
      } else {
        inferred = sp.col(0);
      }
      names.push_back("inferred_side");
      columns.push_back(inferred);
    }
    const auto hard = hard_assignments(model.predict_score(post.mean));
    VectorXd score(static_cast<Index>(hard.size())), aligned(static_cast<Index>(hard.size()));
    for (std::size_t i = 0; i < hard.size(); ++i) {
      score[static_cast<Index>(i)] = hard[i];
      aligned[static_cast<Index>(i)] = model.score_rank.empty() ? hard[i] : model.score_rank[static_cast<std::size_t>(hard[i])];
    }
    names.push_back("score");
    columns.push_back(score);
    names.push_back("aligned_score");
    columns.push_back(aligned);
    if (data.has_eval_labels()) {
      const auto& labels = eval::eval_labels(data);
      names.push_back("label");
      columns.push_back(Eigen::Map<const VectorXd>(labels.data(), static_cast<Index>(labels.size())));
    }
    extra.resize(data.rows(), static_cast<Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) extra.col(static_cast<Index>(c)) = columns[c];
    t.header.insert(t.header.end(), names.begin(), names.end());
    cols += extra.cols();
  }
  t.values.resize(data.rows(), cols);
  for (Index i = 0; i < data.rows(); ++i) t.values(i, 0) = static_cast<double>(i);
  t.values.middleCols(1, d) = post.mean;
  t.values.middleCols(1 + d, d) = post.var;
  if (extra.cols() > 0) t.values.rightCols(extra.cols()) = extra;
  if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
  write_table(o.out, t);
  return 0;
}

int cmd_plot(const Options& o) {
  if (o.data.empty() || o.out.empty()) throw ConfigError("plot-latent needs --data <embeddings file> and --out <png>");
  const Table t = read_table(o.data);
  const Index colour = t.column(o.color_by);
  if (colour < 0) throw ConfigError("unknown colour column '" + o.color_by + "' in " + o.data);
  std::vector<Index> mean_cols;
  for (std::size_t j = 0; j < t.header.size(); ++j)
    if (t.header[j].rfind("mean_", 0) == 0) mean_cols.push_back(static_cast<Index>(j));
  if (mean_cols.size() < 2) throw DataError("embeddings file needs at least two mean_ columns");
  if (t.values.rows() < 2) throw DataError("embeddings file needs at least two rows");
  MatrixXd means(t.values.rows(), static_cast<Index>(mean_cols.size()));
  for (std::size_t j = 0; j < mean_cols.size(); ++j) means.col(static_cast<Index>(j)) = t.values.col(mean_cols[j]);
  const eval::PcaResult pca = eval::pca_project(means, 2);
  const VectorXd c = t.values.col(colour);
  if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
  write_scatter_png(o.out, pca.projection, std::vector<double>(c.data(), c.data() + c.size()));
  std::fprintf(stderr, "explained variance: %.4f %.4f%s\n", pca.explained[0], pca.explained[1],
               pca.rank_deficient ? " (rank deficient)" : "");
  return 0;
}

int cmd_divcheck(const Options& o) {
  DivcheckOptions opt;
  opt.n_trials = o.trials;
  opt.seed = o.seed.value_or(0);
  if (o.inject_uncorrected_mean) opt.rule = InterpolantMean::unnormalized;
  const auto results = run_divcheck(opt);
  print_divcheck(std::cout, results);
  return divcheck_passed(results) ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sidescore: learning to score with side information"};
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "train a model from a config file");
  train->add_option("--config", o.config, "run config (INI)")->required();
  train->add_option("--out", o.out, "output directory (default: $SIDESCORE_OUT_DIR, then [output] dir)");
  train->add_option("--seed", o.seed, "override the training seed");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on labeled data");
  eval_cmd->add_option("--checkpoint", o.checkpoint, "model checkpoint")->required();
  eval_cmd->add_option("--data", o.data, "IDX image file, CSV file, or 'blobs' (default: configured split)");
  eval_cmd->add_option("--schema", o.schema, "column schema for CSV data");
  eval_cmd->add_option("--split", o.split, "train or test when --data is absent")->check(CLI::IsMember({"train", "test"}));
  eval_cmd->add_option("--out", o.out, "directory for metrics.txt and metrics.tsv");

  auto* embed = app.add_subcommand("embed", "write posterior means and variances");
  embed->add_option("--checkpoint", o.checkpoint, "model checkpoint")->required();
  embed->add_option("--data", o.data, "IDX image file, CSV file, or 'blobs' (default: configured split)");
  embed->add_option("--schema", o.schema, "column schema for CSV data");
  embed->add_option("--split", o.split, "train or test when --data is absent")->check(CLI::IsMember({"train", "test"}));
  embed->add_option("--out", o.out, "output CSV")->required();
  embed->add_flag("--annotate", o.annotate, "append side, inferred_side, score, aligned_score and label columns");

  auto* plot = app.add_subcommand("plot-latent", "PCA scatter of an embeddings file");
  plot->add_option("--data", o.data, "embeddings CSV from 'embed'")->required();
  plot->add_option("--color-by", o.color_by, "column used for colour");
  plot->add_option("--out", o.out, "output PNG")->required();

  auto* div = app.add_subcommand("divcheck", "randomized property checks of the divergences");
  div->add_option("--trials", o.trials, "trials per property");
  div->add_option("--seed", o.seed, "random seed");
  div->add_flag("--inject-uncorrected-mean", o.inject_uncorrected_mean,
                "use the interpolant mean without the covariance factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train) return cmd_train(o);
    if (*eval_cmd) return cmd_eval(o);
    if (*embed) return cmd_embed(o);
    if (*plot) return cmd_plot(o);
    if (*div) return cmd_divcheck(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error in " << e.component() << ": " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
