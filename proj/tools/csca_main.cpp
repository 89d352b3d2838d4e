// Copyright 2026 The CSCA Authors. All Rights Reserved.
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

// csca: ingest, train, evaluate, predict and analyze from the command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csca/analysis.hpp"
#include "csca/csv.hpp"
#include "csca/dataset.hpp"
#include "csca/error.hpp"
#include "csca/evaluation.hpp"
#include "csca/log.hpp"
#include "csca/model.hpp"
#include "csca/pipeline.hpp"
#include "csca/training.hpp"

namespace fs = std::filesystem;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backbone;
  std::optional<int> ablation;
  std::optional<std::string> weights;
  std::optional<int> max_epochs;
  std::optional<double> learning_rate;
  std::optional<int> batch_size;

  void add_to(CLI::App* cmd, bool training) {
    cmd->add_option("--config", config_path, "JSON run configuration; every field is required")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Random seed");
    if (!training) return;
    cmd->add_option("--backbone", backbone, "Encoder backbone")->check(CLI::IsMember({"toy", "vit-l-14"}));
    cmd->add_option("--ablation", ablation, "Ablation row 1..5")->check(CLI::Range(1, 5));
    cmd->add_option("--weights", weights, "Encoder weights file");
    cmd->add_option("--max-epochs", max_epochs, "Maximum number of epochs");
    cmd->add_option("--learning-rate", learning_rate, "Adam learning rate");
    cmd->add_option("--batch-size", batch_size, "Minibatch size");
  }

  // Config file (or defaults) with flags applied on top.
  csca::RunConfig resolve() const {
    csca::RunConfig config;
    if (!config_path.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(csca::csv::read_text_file(config_path));
      } catch (const nlohmann::json::exception& e) {
        throw csca::ConfigError("cannot parse config '" + config_path + "': " + e.what());
      }
      config = csca::RunConfig::from_json(j);
    }
    if (seed) config.seed = *seed;
    if (backbone) config.backbone = *backbone;
    if (ablation) config.ablation = csca::ablation_configs()[*ablation - 1].ablation;
    if (weights) config.weights_path = *weights;
    if (max_epochs) config.max_epochs = *max_epochs;
    if (learning_rate) config.learning_rate = *learning_rate;
    if (batch_size) config.batch_size = *batch_size;
    config.validate();
    return config;
  }
};

std::string fingerprint_line(const std::string& fingerprint) { return "# fingerprint=" + fingerprint + "\n"; }

std::string parent_dir(const std::string& file) {
  const fs::path parent = fs::absolute(file).parent_path();
  return parent.string();
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string manifest;
  std::string annotations;
  std::string out;
  bool assign_splits = false;
};

int run_ingest(const IngestArgs& args, const ConfigFlags& flags) {
  const csca::RunConfig config = flags.resolve();
  csca::DirectoryLock lock(parent_dir(args.out));
  csca::IngestResult result = csca::ingest(args.manifest, args.annotations, csca::cache_dir_from_env());
  if (args.assign_splits) {
    result.records = csca::assign_primary_splits(result.records, config.seed);
    result.records = csca::normalize_ratings(result.records, csca::Split::kTrain);
  }
  csca::save_store(args.out, result.records, config.fingerprint());
  csca::log::info("wrote " + std::to_string(result.records.size()) + " records to " + args.out);
  return 0;
}

struct TrainArgs {
  std::string store;
  std::string out;
};

int run_train(const TrainArgs& args, const ConfigFlags& flags) {
  const csca::RunConfig config = flags.resolve();
  csca::DirectoryLock lock(args.out);
  const std::string fingerprint = config.fingerprint();
  const auto records = csca::load_store(args.store);
  const csca::TrainedRun run = csca::train_on_records(records, config, csca::make_bundle(config), csca::cache_dir_from_env());
  const csca::TrainResult& result = run.result;
  const csca::Checkpoint& checkpoint = run.checkpoint;

  const fs::path out(args.out);
  csca::save_checkpoint((out / "checkpoint.bin").string(), checkpoint);
  csca::csv::write_text_file((out / "history.csv").string(),
                             fingerprint_line(fingerprint) + csca::format_history(result.history));
  nlohmann::json config_json = config.to_json();
  csca::csv::write_text_file((out / "config.json").string(), config_json.dump(2) + "\n");
  csca::log::info("best epoch " + std::to_string(result.best_epoch) + " of " +
                  std::to_string(result.history.size()) + (result.stopped_early ? " (early stop)" : "") +
                  ", val total " + csca::csv::format_double(result.best_val_metric));
  return 0;
}

struct EvalArgs {
  std::string checkpoint;
  std::string store;
  std::vector<std::string> subsets;
  std::string out;
  std::string weights;
};

csca::RunConfig checkpoint_config(const csca::Checkpoint& checkpoint, const std::string& weights) {
  csca::RunConfig config = checkpoint.config;
  if (!weights.empty()) config.weights_path = weights;
  return config;
}

int run_eval(const EvalArgs& args) {
  const csca::Checkpoint checkpoint = csca::load_checkpoint(args.checkpoint);
  const csca::RunConfig config = checkpoint_config(checkpoint, args.weights);
  csca::DirectoryLock lock(args.out);
  const auto records = csca::load_store(args.store);
  std::vector<csca::Subset> subsets;
  const bool explicit_subsets = !args.subsets.empty();
  if (explicit_subsets) {
    for (const auto& s : args.subsets) subsets.push_back(csca::parse_subset(s));
  } else {
    subsets = {csca::Subset::kPrimaryTest, csca::Subset::kRg1, csca::Subset::kRg2, csca::Subset::kFg};
  }
  const csca::EvalReport report = csca::evaluate_subsets(checkpoint, records, csca::make_bundle(config), subsets,
                                                         !explicit_subsets, csca::cache_dir_from_env());

  const fs::path out(args.out);
  csca::csv::write_text_file((out / "eval_report.txt").string(), report.format_table());
  csca::csv::write_text_file((out / "eval_report.json").string(), report.to_json().dump(2) + "\n");
  for (const auto& e : report.entries) {
    csca::log::info(std::string(to_string(e.subset)) + ": SRCC " + csca::csv::format_double(e.srcc) + " PLCC " +
                    csca::csv::format_double(e.plcc) + " n=" + std::to_string(e.n));
  }
  return 0;
}

struct PredictArgs {
  std::string checkpoint;
  std::vector<std::string> images;
  std::string weights;
};

int run_predict(const PredictArgs& args) {
  const csca::Checkpoint checkpoint = csca::load_checkpoint(args.checkpoint);
  const csca::RunConfig config = checkpoint_config(checkpoint, args.weights);
  const csca::CscaModel model = csca::restore_model(checkpoint, csca::make_bundle(config));

  std::string out = fingerprint_line(config.fingerprint());
  std::vector<std::string> header = {"image", "score"};
  for (auto phrase : csca::kLevelPhrases) header.push_back("p_" + std::string(phrase));
  for (auto label : csca::kAllContentLabels) header.push_back("z_" + std::string(to_string(label)));
  header.push_back("ink_intensity");
  out += csca::csv::join(header) + "\n";
  int failures = 0;
  for (const auto& image : args.images) {
    try {
      const csca::Prediction p = csca::predict(image, checkpoint.stats, model);
      std::vector<std::string> row = {image, csca::csv::format_double(p.score)};
      for (double v : p.level_probs) row.push_back(csca::csv::format_double(v));
      for (double v : p.content_probs) row.push_back(csca::csv::format_double(v));
      row.push_back(csca::csv::format_double(p.ink_intensity));
      out += csca::csv::join(row) + "\n";
    } catch (const csca::Error& e) {
      csca::log::error(image + ": " + e.what());
      ++failures;
    }
  }
  std::fwrite(out.data(), 1, out.size(), stdout);
  return failures ? 1 : 0;
}

struct AnalyzeArgs {
  std::string store;
  std::vector<std::string> subsets;
  std::string out;
  int bins = 5;
};

int run_analyze(const AnalyzeArgs& args) {
  std::string fingerprint;
  const auto records = csca::load_store(args.store, &fingerprint);
  csca::DirectoryLock lock(args.out);
  std::vector<csca::DrawingRecord> selected;
  const bool all = args.subsets.size() == 1 && args.subsets[0] == "all";
  if (all) {
    selected = records;
  } else {
    const std::vector<std::string> names = args.subsets.empty() ? std::vector<std::string>{"primary_test"} : args.subsets;
    for (const auto& name : names) {
      const auto part = csca::filter_split(records, csca::split_of(csca::parse_subset(name)));
      selected.insert(selected.end(), part.begin(), part.end());
    }
  }
  if (selected.empty()) throw csca::DegenerateInputError("no records to analyze in the selected subsets");

  const auto points = csca::analysis_points(selected);
  const auto table = csca::style_rating_correlation(std::span<const csca::AnalysisPoint>(points));
  const auto cells = csca::binned_rating_means(std::span<const csca::AnalysisPoint>(points), args.bins);
  nlohmann::json plot = csca::plot_spec(points, cells);
  plot["fingerprint"] = fingerprint;

  const fs::path out(args.out);
  csca::csv::write_text_file((out / "ink_rating_srcc.csv").string(), fingerprint_line(fingerprint) + table.format_csv());
  csca::csv::write_text_file((out / "ink_rating_bins.csv").string(),
                             fingerprint_line(fingerprint) + csca::format_bins_csv(cells));
  csca::csv::write_text_file((out / "plot_spec.json").string(), plot.dump(2) + "\n");
  if (table.combined.srcc) {
    csca::log::info("combined SRCC " + csca::csv::format_double(*table.combined.srcc) + " over " +
                    std::to_string(table.combined.n) + " drawings");
  }
  return 0;
}

struct SyntheticArgs {
  std::string out;
  csca::SyntheticSpec spec;
};

int run_make_synthetic(const SyntheticArgs& args) {
  const csca::SyntheticPaths paths = csca::write_synthetic_dataset(args.out, args.spec);
  csca::log::info("wrote " + paths.manifest + " and " + paths.annotations);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Creativity scoring of drawings with content and style conditioned prompt tuning"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Log per-epoch progress");
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  ConfigFlags flags;

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Load, label, normalize and cache a dataset into a record store");
  ingest->add_option("manifest", ingest_args.manifest, "Manifest CSV (id,image_path,rating_raw,split)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("annotations", ingest_args.annotations, "Content label CSV (id,content_label)");
  ingest->add_option("--out", ingest_args.out, "Record store file to write")->required();
  ingest->add_flag("--assign-splits", ingest_args.assign_splits,
                   "Reassign train/val/test 70/10/20 with the seed");
  flags.add_to(ingest, false);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train the scoring head and write a checkpoint");
  train->add_option("store", train_args.store, "Record store from ingest")->required()->check(CLI::ExistingFile);
  train->add_option("--out", train_args.out, "Output directory")->required();
  flags.add_to(train, true);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Report SRCC/PLCC on evaluation subsets");
  eval->add_option("checkpoint", eval_args.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("store", eval_args.store, "Record store")->required()->check(CLI::ExistingFile);
  eval->add_option("--subsets", eval_args.subsets, "primary_test, rg1, rg2, fg")->delimiter(',');
  eval->add_option("--out", eval_args.out, "Output directory")->required();
  eval->add_option("--weights", eval_args.weights, "Encoder weights file");

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "Score drawings");
  predict->add_option("checkpoint", predict_args.checkpoint, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("images", predict_args.images, "PNG or JPEG files")->required();
  predict->add_option("--weights", predict_args.weights, "Encoder weights file");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Ink intensity vs rating correlations and binned means");
  analyze->add_option("store", analyze_args.store, "Record store")->required()->check(CLI::ExistingFile);
  analyze->add_option("--subsets", analyze_args.subsets, "Subsets to analyze (default primary_test, or all)")
      ->delimiter(',');
  analyze->add_option("--bins", analyze_args.bins, "Number of ink bins")->check(CLI::Range(2, 1000));
  analyze->add_option("--out", analyze_args.out, "Output directory")->required();

  SyntheticArgs synthetic_args;
  auto* synthetic = app.add_subcommand("make-synthetic", "Write a synthetic dataset whose rating is the ink fraction");
  synthetic->add_option("out", synthetic_args.out, "Output directory")->required();
  synthetic->add_option("--n-train", synthetic_args.spec.n_train)->check(CLI::Range(2, 100000));
  synthetic->add_option("--n-val", synthetic_args.spec.n_val)->check(CLI::Range(1, 100000));
  synthetic->add_option("--n-test", synthetic_args.spec.n_test)->check(CLI::Range(0, 100000));
  synthetic->add_option("--image-size", synthetic_args.spec.image_size)->check(CLI::Range(8, 4096));
  synthetic->add_option("--seed", synthetic_args.spec.seed);

  auto* config = app.add_subcommand("config", "Print the resolved run configuration as JSON");
  flags.add_to(config, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (verbose) csca::log::set_level(csca::log::Level::kDebug);
  if (quiet) csca::log::set_level(csca::log::Level::kWarning);

  try {
    if (*ingest) return run_ingest(ingest_args, flags);
    if (*train) return run_train(train_args, flags);
    if (*eval) return run_eval(eval_args);
    if (*predict) return run_predict(predict_args);
    if (*analyze) return run_analyze(analyze_args);
    if (*synthetic) return run_make_synthetic(synthetic_args);
    if (*config) {
      std::cout << flags.resolve().to_json().dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    csca::log::error(e.what());
    return 1;
  }
  return 1;
}
