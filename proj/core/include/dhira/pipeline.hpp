#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dhira/analysis.hpp"
#include "dhira/artext.hpp"
#include "dhira/corpus.hpp"
#include "dhira/features.hpp"
#include "dhira/forest.hpp"
#include "dhira/stats.hpp"
#include "dhira/topics.hpp"

namespace dhira::pipeline {

// Stable exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitModelContract = 4;
inline constexpr int kExitAlignment = 5;

struct RunConfig {
  std::string corpus_path;
  std::string labels_path;
  std::string botometer_path;
  std::string lexicon_path;
  std::string stopwords_path;
  std::string islamic_apps_path;
  std::string model_path;
  std::string topics_path;  // defaults to model_path + ".topics"
  std::string grid_path;
  std::string scores_path;
  std::string hate_counts_path;
  std::string topic_labels_path;
  std::string out_path;  // output file or directory, command-dependent

  std::uint64_t seed = 42;
  double threshold = analysis::kDefaultBotThreshold;
  double split = 0.7;
  std::size_t folds = 10;
  std::string feature_set = "+account";  // content | +tweet | +topic | +account
  bool verify = false;

  // synth
  std::size_t bots = 0;
  std::size_t humans = 0;
  std::size_t tweets = corpus::kDefaultTweetWindow;
};

// Number of leading contract-order features selected by an ablation flag
// (content -> 9, +tweet -> 14, +topic -> 23, +account -> 35).
std::size_t feature_prefix(const std::string& feature_set);

int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_ingest(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_topics(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_features(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_predict(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_report(const RunConfig& config, std::ostream& out, std::ostream& err);

// Shared plumbing, exposed for tests.

// Per-account topic documents: each account's tweets normalized and
// concatenated, aligned with `accounts`.
std::vector<topics::Document> account_documents(std::span<const corpus::Account> accounts,
                                                const artext::StopwordSet& stopwords);

// Seeded stratified train/test split on binned scores (bin width 1);
// returns (train indices, test indices).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const double> scores, double train_fraction, std::uint64_t seed);

struct TrainOutcome {
  forest::GridSearchResult grid;
  forest::Forest model;
  topics::TopicModel topic_model;  // k == 0 when the ablation skips topics
  stats::EvaluationReport heldout;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

// The full train pipeline over labeled accounts (used by cmd_train and the
// acceptance suite): outer split, topic fit on the train side, features,
// grid search, final fit, held-out evaluation.
TrainOutcome train_pipeline(std::span<const corpus::Account> accounts, const RunConfig& config,
                            std::ostream& err);

}  // namespace dhira::pipeline
