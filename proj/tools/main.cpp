// dhira: bot-likelihood scoring for Arabic timeline corpora.
//
// Subcommands: synth, ingest, topics, features, train, predict, evaluate,
// report. Exit codes: 0 ok, 2 usage, 3 data, 4 model contract, 5 alignment.

#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dhira/pipeline.hpp"

namespace {

using dhira::pipeline::RunConfig;

void add_common_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--seed", config.seed, "Master seed; all randomness derives from it");
  cmd->add_option("--stopwords", config.stopwords_path, "Stopword list (one word per line)");
  cmd->add_option("--lexicon", config.lexicon_path, "Sentiment lexicon TSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dhira: score social-media accounts on a 0-5 bot-likelihood scale"};
  app.require_subcommand(1);

  RunConfig config;
  std::function<int()> action;

  CLI::App* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  synth->add_option("--bots", config.bots, "Number of bot accounts");
  synth->add_option("--humans", config.humans, "Number of human accounts");
  synth->add_option("--tweets", config.tweets, "Tweets per account (default 200)");
  synth->add_option("--out", config.out_path, "Output directory")->required();
  synth->add_option("--seed", config.seed, "Master seed");
  synth->callback([&]() {
    action = [&]() { return dhira::pipeline::cmd_synth(config, std::cout, std::cerr); };
  });

  CLI::App* ingest = app.add_subcommand("ingest", "Validate a JSONL corpus");
  ingest->add_option("--corpus", config.corpus_path, "accounts.jsonl")->required();
  ingest->add_option("--labels", config.labels_path, "labels.csv to attach");
  ingest->add_option("--out", config.out_path, "Write a canonical JSONL copy here");
  ingest->callback([&]() {
    action = [&]() { return dhira::pipeline::cmd_ingest(config, std::cout, std::cerr); };
  });

  CLI::App* topics = app.add_subcommand("topics", "Fit the LDA topic model");
  topics->add_option("--corpus", config.corpus_path, "accounts.jsonl")->required();
  topics->add_option("--out", config.out_path, "Topic model output file")->required();
  add_common_flags(topics, config);
  topics->callback([&]() {
    action = [&]() { return dhira::pipeline::cmd_topics(config, std::cout, std::cerr); };
  });

  CLI::App* feats = app.add_subcommand("features", "Export the 35-feature matrix as CSV");
  feats->add_option("--corpus", config.corpus_path, "accounts.jsonl")->required();
  feats->add_option("--topics", config.topics_path, "Fitted topic model (else fit on the fly)");
  feats->add_option("--out", config.out_path, "features.csv output")->required();
  add_common_flags(feats, config);
  feats->callback([&]() {
    action = [&]() { return dhira::pipeline::cmd_features(config, std::cout, std::cerr); };
  });

  CLI::App* train = app.add_subcommand("train", "Train the random-forest regressor");
  train->add_option("--corpus", config.corpus_path, "accounts.jsonl")->required();
  train->add_option("--labels", config.labels_path, "labels.csv")->required();
  train->add_option("--model", config.model_path, "model.json output")->required();
  train->add_option("--features", config.feature_set,
                    "Cumulative families: content | +tweet | +topic | +account");
  train->add_option("--grid", config.grid_path, "Hyperparameter grid file");
  train->add_option("--folds", config.folds, "Cross-validation folds (default 10)");
  train->add_option("--split", config.split, "Train fraction for the outer split (default 0.7)");
  add_common_flags(train, config);
  train->callback([&]() {
    action = [&]() { return dhira::pipeline::cmd_train(config, std::cout, std::cerr); };
  });

  CLI::App* predict = app.add_subcommand("predict", "Score accounts with a trained model");
  predict->add_option("--corpus", config.corpus_path, "accounts.jsonl")->required();
  predict->add_option("--model", config.model_path, "model.json")->required();
  predict->add_option("--topics", config.topics_path, "Topic model (default <model>.topics)");
  predict->add_option("--out", config.out_path, "scores.csv output")->required();
  predict->add_flag("--verify", config.verify, "Check bias + contributions = score per row");
  add_common_flags(predict, config);
  predict->callback([&]() {
    action = [&]() { return dhira::pipeline::cmd_predict(config, std::cout, std::cerr); };
  });

  CLI::App* evaluate = app.add_subcommand("evaluate", "Rank metrics for two score sets");
  evaluate->add_option("--labels", config.labels_path, "labels.csv (truth)")->required();
  evaluate->add_option("--scores", config.scores_path, "scores.csv from predict");
  evaluate->add_option("--botometer", config.botometer_path, "botometer.csv");
  evaluate->callback([&]() {
    action = [&]() { return dhira::pipeline::cmd_evaluate(config, std::cout, std::cerr); };
  });

  CLI::App* report = app.add_subcommand("report", "Population analyses over scored accounts");
  report->add_option("--corpus", config.corpus_path, "accounts.jsonl")->required();
  report->add_option("--labels", config.labels_path, "labels.csv");
  report->add_option("--botometer", config.botometer_path, "botometer.csv");
  report->add_option("--model", config.model_path, "model.json for unscored accounts");
  report->add_option("--topics", config.topics_path, "Topic model (default <model>.topics)");
  report->add_option("--threshold", config.threshold, "Bot threshold (default 2.5)");
  report->add_option("--islamic-apps", config.islamic_apps_path, "Islamic app label list");
  report->add_option("--hate-counts", config.hate_counts_path,
                     "CSV account_id,hateful_tweets for the attribution block");
  report->add_option("--topic-labels", config.topic_labels_path, "index = name display labels");
  report->add_option("--out", config.out_path, "Report output directory")->required();
  add_common_flags(report, config);
  report->callback([&]() {
    action = [&]() { return dhira::pipeline::cmd_report(config, std::cout, std::cerr); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return dhira::pipeline::kExitUsage;
  }
  return action ? action() : dhira::pipeline::kExitUsage;
}
