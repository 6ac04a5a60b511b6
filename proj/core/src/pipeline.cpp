#include "dhira/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>

#include "dhira/errors.hpp"
#include "dhira/rng.hpp"
#include "dhira/textio.hpp"

namespace dhira::pipeline {

namespace {

namespace fs = std::filesystem;

// Seed stream indices for the pipeline stages.
constexpr std::uint64_t kSplitStream = 101;
constexpr std::uint64_t kLdaStream = 102;
constexpr std::uint64_t kGridStream = 103;
constexpr std::uint64_t kForestStream = 104;
constexpr std::uint64_t kInferStreamBase = 1u << 20;

int map_error(std::ostream& err, const Error& e) {
  err << "error: " << e.what() << '\n';
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const ModelContractError*>(&e)) return kExitModelContract;
  if (dynamic_cast<const AlignmentError*>(&e)) return kExitAlignment;
  return kExitData;  // DataError, ModelFormatError, ModelVersionError
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return map_error(err, e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

void validate_common(const RunConfig& config) {
  if (!(config.split > 0.0 && config.split < 1.0)) {
    throw UsageError("--split must be in (0,1)");
  }
  if (config.folds < 2) throw UsageError("--folds must be >= 2");
  if (config.threshold < 0.0 || config.threshold > 5.0) {
    throw UsageError("--threshold must be in [0,5]");
  }
}

artext::StopwordSet load_stopword_config(const RunConfig& config) {
  if (config.stopwords_path.empty()) return artext::default_stopwords();
  return artext::load_stopwords(config.stopwords_path);
}

features::SentimentLexicon load_lexicon_config(const RunConfig& config) {
  if (config.lexicon_path.empty()) return features::default_lexicon();
  return features::load_lexicon(config.lexicon_path);
}

analysis::SourceSet load_islamic_config(const RunConfig& config) {
  if (config.islamic_apps_path.empty()) return analysis::default_islamic_apps();
  return analysis::load_islamic_apps(config.islamic_apps_path);
}

std::string topics_path_for(const RunConfig& config) {
  if (!config.topics_path.empty()) return config.topics_path;
  if (config.model_path.empty()) throw UsageError("--model (or --topics) is required");
  return config.model_path + ".topics";
}

void report_issues(std::ostream& err, const corpus::IngestResult& ingest) {
  for (const corpus::IngestIssue& issue : ingest.issues) {
    err << "line " << issue.line << ": rejected: " << issue.message << '\n';
  }
}

std::vector<corpus::Account> load_corpus(const RunConfig& config, std::ostream& err) {
  if (config.corpus_path.empty()) throw UsageError("--corpus is required");
  corpus::IngestResult ingest = corpus::ingest_accounts(config.corpus_path);
  report_issues(err, ingest);
  return std::move(ingest.accounts);
}

// Full 35-feature matrix for the given accounts. theta rows must be aligned
// (may be empty when the feature subset stops before the topic family:
// uniform placeholders keep assemble() happy and are never read).
std::vector<features::FeatureVector> compute_features(
    std::span<const corpus::Account> accounts,
    const std::vector<std::vector<double>>& thetas,
    const features::SentimentLexicon& lexicon) {
  std::vector<features::FeatureVector> out(accounts.size());
  static const std::vector<double> uniform(7, 1.0 / 7.0);
  parallel_for(accounts.size(), [&](std::size_t i) {
    const std::vector<double>& theta = thetas.empty() ? uniform : thetas[i];
    out[i] = features::assemble(accounts[i], theta, features::sentiment(accounts[i], lexicon));
  });
  return out;
}

struct TopicSide {
  topics::TopicModel model;
  std::vector<std::vector<double>> train_theta;
};

std::vector<std::vector<double>> infer_all(const topics::TopicModel& model,
                                           std::span<const topics::Document> docs,
                                           std::uint64_t seed) {
  std::vector<std::vector<double>> thetas(docs.size());
  parallel_for(docs.size(), [&](std::size_t i) {
    thetas[i] = topics::infer_theta(model, docs[i].tokens, topics::kDefaultInferIterations,
                                    derive_seed(seed, kInferStreamBase + i));
  });
  return thetas;
}

std::map<std::string, std::int64_t> load_hate_counts(const std::string& path) {
  std::map<std::string, std::int64_t> counts;
  const std::vector<std::string> lines = split(read_file(path), '\n');
  if (lines.empty() || trim(lines.front()) != "account_id,hateful_tweets") {
    throw DataError("expected header 'account_id,hateful_tweets' in " + path);
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    const std::vector<std::string> cols = split_csv_line(line);
    if (cols.size() != 2) throw DataError("bad hate-count row at line " + std::to_string(i + 1));
    try {
      const long long v = std::stoll(cols[1]);
      if (v < 0) throw std::invalid_argument("negative");
      counts[cols[0]] = v;
    } catch (const std::exception&) {
      throw DataError("bad hateful_tweets value at line " + std::to_string(i + 1));
    }
  }
  return counts;
}

std::map<std::string, double> load_score_csv(const std::string& path,
                                             const std::string& value_column) {
  const std::vector<std::string> lines = split(read_file(path), '\n');
  if (lines.empty()) throw DataError("empty score file: " + path);
  const std::vector<std::string> header = split_csv_line(trim(lines.front()));
  if (header.size() < 2 || header[0] != "account_id") {
    throw DataError("expected 'account_id,...' header in " + path);
  }
  const auto col_it = std::find(header.begin(), header.end(), value_column);
  if (col_it == header.end()) {
    throw DataError("no '" + value_column + "' column in " + path);
  }
  const std::size_t col = static_cast<std::size_t>(col_it - header.begin());
  std::map<std::string, double> scores;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    const std::vector<std::string> cols = split_csv_line(line);
    if (cols.size() <= col) throw DataError("short row at line " + std::to_string(i + 1));
    try {
      scores[cols[0]] = std::stod(cols[col]);
    } catch (const std::exception&) {
      throw DataError("bad score at line " + std::to_string(i + 1) + " in " + path);
    }
  }
  return scores;
}

}  // namespace

std::size_t feature_prefix(const std::string& feature_set) {
  if (feature_set == "content") return 9;
  if (feature_set == "+tweet" || feature_set == "tweet") return 14;
  if (feature_set == "+topic" || feature_set == "topic") return 23;
  if (feature_set == "+account" || feature_set == "account" || feature_set == "all") return 35;
  throw UsageError("--features must be one of content, +tweet, +topic, +account");
}

std::vector<topics::Document> account_documents(std::span<const corpus::Account> accounts,
                                                const artext::StopwordSet& stopwords) {
  std::vector<topics::Document> docs(accounts.size());
  parallel_for(accounts.size(), [&](std::size_t i) {
    topics::Document& doc = docs[i];
    doc.id = accounts[i].profile.id;
    for (const corpus::Tweet& tweet : accounts[i].tweets) {
      std::vector<std::string> tokens = artext::normalize_for_topics(tweet.text, stopwords);
      doc.tokens.insert(doc.tokens.end(), std::make_move_iterator(tokens.begin()),
                        std::make_move_iterator(tokens.end()));
    }
  });
  return docs;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const double> scores, double train_fraction, std::uint64_t seed) {
  const std::size_t n = scores.size();
  std::vector<std::vector<std::size_t>> bins(5);
  for (std::size_t i = 0; i < n; ++i) {
    bins[std::min<std::size_t>(4, static_cast<std::size_t>(std::floor(scores[i])))].push_back(i);
  }
  const std::size_t target =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<std::size_t> bin_sizes;
  for (const auto& bin : bins) bin_sizes.push_back(bin.size());
  const std::vector<std::size_t> quotas = corpus::proportional_allocation(bin_sizes, target);

  std::vector<std::size_t> train, test;
  Rng rng(seed);
  for (std::size_t b = 0; b < bins.size(); ++b) {
    rng.shuffle(bins[b]);
    for (std::size_t i = 0; i < bins[b].size(); ++i) {
      (i < quotas[b] ? train : test).push_back(bins[b][i]);
    }
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

TrainOutcome train_pipeline(std::span<const corpus::Account> accounts, const RunConfig& config,
                            std::ostream& err) {
  const std::size_t n_features = feature_prefix(config.feature_set);
  const bool need_topics = n_features > 14;

  std::vector<const corpus::Account*> labeled;
  for (const corpus::Account& a : accounts) {
    if (!a.true_score) continue;
    if (a.tweets.empty()) {
      err << "skipping " << a.profile.id << ": empty timeline\n";
      continue;
    }
    labeled.push_back(&a);
  }
  if (labeled.size() < config.folds) {
    throw DataError("need at least " + std::to_string(config.folds) + " labeled accounts, have " +
                    std::to_string(labeled.size()));
  }

  std::vector<double> scores;
  scores.reserve(labeled.size());
  for (const corpus::Account* a : labeled) scores.push_back(*a->true_score);
  const auto [train_idx, test_idx] =
      stratified_split(scores, config.split, derive_seed(config.seed, kSplitStream));

  std::vector<corpus::Account> train_accounts, test_accounts;
  for (std::size_t i : train_idx) train_accounts.push_back(*labeled[i]);
  for (std::size_t i : test_idx) test_accounts.push_back(*labeled[i]);

  const artext::StopwordSet stopwords = load_stopword_config(config);
  const features::SentimentLexicon lexicon = load_lexicon_config(config);

  TrainOutcome outcome;
  outcome.n_train = train_accounts.size();
  outcome.n_test = test_accounts.size();

  std::vector<std::vector<double>> train_theta, test_theta;
  if (need_topics) {
    const std::vector<topics::Document> train_docs = account_documents(train_accounts, stopwords);
    topics::Vocabulary vocab = topics::build_vocabulary(train_docs);
    topics::FitOptions fit;
    fit.seed = derive_seed(config.seed, kLdaStream);
    outcome.topic_model = topics::fit_lda(train_docs, std::move(vocab), fit);
    train_theta = outcome.topic_model.theta;
    const std::vector<topics::Document> test_docs = account_documents(test_accounts, stopwords);
    test_theta = infer_all(outcome.topic_model, test_docs, config.seed);
  } else {
    outcome.topic_model.k = 0;  // ablation stops before the topic family
  }

  const std::vector<features::FeatureVector> train_vecs =
      compute_features(train_accounts, train_theta, lexicon);
  const std::vector<features::FeatureVector> test_vecs =
      compute_features(test_accounts, test_theta, lexicon);

  std::vector<std::string> names;
  for (std::size_t f = 0; f < n_features; ++f) {
    names.emplace_back(features::feature_names()[f]);
  }
  forest::Dataset train_data;
  train_data.cols = n_features;
  for (std::size_t i = 0; i < train_vecs.size(); ++i) {
    train_data.add_row({train_vecs[i].values.data(), n_features}, *train_accounts[i].true_score);
  }

  const std::vector<forest::Hyperparams> grid =
      config.grid_path.empty() ? forest::default_grid()
                               : forest::parse_grid(read_file(config.grid_path));
  outcome.grid = forest::grid_search(train_data, grid, config.folds,
                                     derive_seed(config.seed, kGridStream));
  outcome.model = forest::fit_forest(train_data, outcome.grid.best,
                                     derive_seed(config.seed, kForestStream), names);

  std::vector<stats::ScorePair> pairs;
  for (std::size_t i = 0; i < test_vecs.size(); ++i) {
    const double predicted =
        forest::predict(outcome.model, {test_vecs[i].values.data(), n_features});
    pairs.push_back({*test_accounts[i].true_score, predicted});
  }
  outcome.heldout = stats::evaluate(pairs);
  return outcome;
}

int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    if (config.bots == 0 && config.humans == 0) {
      throw UsageError("synth needs --bots and/or --humans");
    }
    if (config.out_path.empty()) throw UsageError("--out directory is required");
    corpus::SynthConfig synth;
    synth.seed = config.seed;
    synth.n_bots = config.bots;
    synth.n_humans = config.humans;
    synth.tweets_per_account = config.tweets;
    std::vector<corpus::Account> accounts = corpus::generate_synthetic(synth);

    std::error_code ec;
    fs::create_directories(config.out_path, ec);
    if (ec || !fs::is_directory(config.out_path)) {
      throw DataError("cannot create output directory: " + config.out_path);
    }

    std::string labels = "account_id,true_score\n";
    std::vector<corpus::Account> stripped = accounts;
    for (corpus::Account& a : stripped) {
      labels += a.profile.id + ',' + format_double(*a.true_score) + '\n';
      a.true_score.reset();  // scores travel in labels.csv
    }
    const std::string corpus_file = (fs::path(config.out_path) / "accounts.jsonl").string();
    const std::string labels_file = (fs::path(config.out_path) / "labels.csv").string();
    corpus::write_accounts_jsonl(corpus_file, stripped);
    write_file(labels_file, labels);
    out << "seed: " << config.seed << '\n';
    out << "accounts: " << accounts.size() << " (" << config.bots << " bots, " << config.humans
        << " humans)\n";
    out << "corpus: " << corpus_file << '\n';
    out << "labels: " << labels_file << '\n';
    return kExitOk;
  });
}

int cmd_ingest(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    if (config.corpus_path.empty()) throw UsageError("--corpus is required");
    corpus::IngestResult ingest = corpus::ingest_accounts(config.corpus_path);
    report_issues(err, ingest);
    if (!config.labels_path.empty()) {
      const corpus::LabelReport report =
          corpus::attach_labels(ingest.accounts, config.labels_path);
      for (const corpus::IngestIssue& row : report.rejected_rows) {
        err << "labels line " << row.line << ": rejected: " << row.message << '\n';
      }
      for (const std::string& id : report.unmatched_ids) {
        err << "labels: unmatched account_id " << id << '\n';
      }
      out << "labels applied: " << report.applied << '\n';
    }
    out << "accounts: " << ingest.accounts.size() << '\n';
    out << "rejected: " << ingest.issues.size() << '\n';
    if (!config.out_path.empty()) {
      corpus::write_accounts_jsonl(config.out_path, ingest.accounts);
      out << "canonical copy: " << config.out_path << '\n';
    }
    return kExitOk;
  });
}

int cmd_topics(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    if (config.out_path.empty()) throw UsageError("--out model file is required");
    const std::vector<corpus::Account> accounts = load_corpus(config, err);
    const artext::StopwordSet stopwords = load_stopword_config(config);
    const std::vector<topics::Document> docs = account_documents(accounts, stopwords);
    topics::Vocabulary vocab = topics::build_vocabulary(docs);
    topics::FitOptions fit;
    fit.seed = derive_seed(config.seed, kLdaStream);
    const topics::TopicModel model = topics::fit_lda(docs, std::move(vocab), fit);
    topics::save_topic_model(config.out_path, model);
    out << "seed: " << config.seed << '\n';
    out << "documents: " << docs.size() << ", vocabulary: " << model.vocab.size() << '\n';
    for (std::size_t k = 0; k < model.k; ++k) {
      std::vector<std::size_t> order(model.vocab.size());
      for (std::size_t w = 0; w < order.size(); ++w) order[w] = w;
      std::partial_sort(order.begin(), order.begin() + std::min<std::size_t>(5, order.size()),
                        order.end(), [&](std::size_t a, std::size_t b) {
                          return model.phi[k][a] > model.phi[k][b];
                        });
      out << "topic_" << k + 1 << ":";
      for (std::size_t j = 0; j < std::min<std::size_t>(5, order.size()); ++j) {
        out << ' ' << model.vocab.words[order[j]];
      }
      out << '\n';
    }
    out << "model: " << config.out_path << '\n';
    return kExitOk;
  });
}

int cmd_features(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    if (config.out_path.empty()) throw UsageError("--out csv file is required");
    std::vector<corpus::Account> accounts = load_corpus(config, err);
    const artext::StopwordSet stopwords = load_stopword_config(config);
    const features::SentimentLexicon lexicon = load_lexicon_config(config);

    std::vector<corpus::Account> usable;
    for (corpus::Account& a : accounts) {
      if (a.tweets.empty()) {
        err << "skipping " << a.profile.id << ": empty timeline\n";
      } else {
        usable.push_back(std::move(a));
      }
    }
    if (usable.empty()) throw DataError("no accounts with tweets");

    const std::vector<topics::Document> docs = account_documents(usable, stopwords);
    topics::TopicModel model;
    if (!config.topics_path.empty()) {
      model = topics::load_topic_model(config.topics_path);
    } else {
      err << "no --topics model given; fitting LDA on this corpus\n";
      topics::Vocabulary vocab = topics::build_vocabulary(docs);
      topics::FitOptions fit;
      fit.seed = derive_seed(config.seed, kLdaStream);
      model = topics::fit_lda(docs, std::move(vocab), fit);
    }
    const std::vector<std::vector<double>> thetas = infer_all(model, docs, config.seed);

    const std::vector<features::FeatureVector> vecs = compute_features(usable, thetas, lexicon);
    std::vector<features::AccountFeatures> rows;
    rows.reserve(usable.size());
    for (std::size_t i = 0; i < usable.size(); ++i) {
      rows.push_back({usable[i].profile.id, vecs[i]});
    }
    features::write_features_csv(config.out_path, rows);
    out << "seed: " << config.seed << '\n';
    out << "features: " << rows.size() << " rows -> " << config.out_path << '\n';
    return kExitOk;
  });
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    validate_common(config);
    if (config.model_path.empty()) throw UsageError("--model output path is required");
    if (config.labels_path.empty() && config.corpus_path.empty()) {
      throw UsageError("--corpus and --labels are required");
    }
    std::vector<corpus::Account> accounts = load_corpus(config, err);
    if (!config.labels_path.empty()) {
      const corpus::LabelReport report = corpus::attach_labels(accounts, config.labels_path);
      for (const corpus::IngestIssue& row : report.rejected_rows) {
        err << "labels line " << row.line << ": rejected: " << row.message << '\n';
      }
    }

    const TrainOutcome outcome = train_pipeline(accounts, config, err);
    forest::save_model(config.model_path, outcome.model);
    if (outcome.topic_model.k > 0) {
      topics::save_topic_model(topics_path_for(config), outcome.topic_model);
    }

    const forest::Hyperparams& best = outcome.grid.best;
    out << "seed: " << config.seed << '\n';
    out << "labeled: " << outcome.n_train + outcome.n_test << " (train " << outcome.n_train
        << ", test " << outcome.n_test << ")\n";
    out << "grid: " << outcome.grid.candidates.size() << " candidates, best n_trees=" << best.n_trees
        << " max_depth=" << best.max_depth << " min_samples_leaf=" << best.min_samples_leaf
        << " max_features=" << best.max_features << '\n';
    double best_rho = 0.0;
    for (std::size_t c = 0; c < outcome.grid.candidates.size(); ++c) {
      if (outcome.grid.candidates[c] == best) {
        best_rho = outcome.grid.mean_rho[c];
        break;
      }
    }
    out << "cv rho: " << format_double(best_rho) << '\n';
    out << "heldout rho=" << format_double(outcome.heldout.rho)
        << " tau_b=" << format_double(outcome.heldout.tau_b)
        << " mae=" << format_double(outcome.heldout.mae) << " n=" << outcome.heldout.n << '\n';
    out << "model: " << config.model_path;
    if (outcome.topic_model.k > 0) out << " (+ " << topics_path_for(config) << ")";
    out << '\n';
    return kExitOk;
  });
}

namespace {

// The model's feature names must be exactly a cumulative-family prefix of
// the contract order; anything else is a contract break.
std::size_t checked_prefix(const forest::Forest& model) {
  const std::size_t m = model.feature_names.size();
  if (m != 9 && m != 14 && m != 23 && m != 35) {
    throw ModelContractError("model selects " + std::to_string(m) +
                             " features; expected a family prefix (9/14/23/35)");
  }
  for (std::size_t f = 0; f < m; ++f) {
    if (model.feature_names[f] != features::feature_names()[f]) {
      throw ModelContractError("model feature order mismatch at index " + std::to_string(f) +
                               ": '" + model.feature_names[f] + "' vs '" +
                               std::string(features::feature_names()[f]) + "'");
    }
  }
  return m;
}

}  // namespace

int cmd_predict(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    validate_common(config);
    if (config.model_path.empty()) throw UsageError("--model is required");
    if (config.out_path.empty()) throw UsageError("--out scores file is required");
    const forest::Forest model = forest::load_model(config.model_path);
    const std::size_t n_features = checked_prefix(model);
    const bool need_topics = n_features > 14;

    std::vector<corpus::Account> accounts = load_corpus(config, err);
    std::vector<corpus::Account> usable;
    for (corpus::Account& a : accounts) {
      if (a.tweets.empty()) {
        err << "skipping " << a.profile.id << ": empty timeline\n";
      } else {
        usable.push_back(std::move(a));
      }
    }
    if (usable.empty()) throw DataError("no accounts with tweets");

    const artext::StopwordSet stopwords = load_stopword_config(config);
    const features::SentimentLexicon lexicon = load_lexicon_config(config);
    std::vector<std::vector<double>> thetas;
    if (need_topics) {
      const topics::TopicModel topic_model = topics::load_topic_model(topics_path_for(config));
      const std::vector<topics::Document> docs = account_documents(usable, stopwords);
      thetas = infer_all(topic_model, docs, config.seed);
    }
    const std::vector<features::FeatureVector> vecs = compute_features(usable, thetas, lexicon);

    forest::Dataset data;
    data.cols = n_features;
    for (const features::FeatureVector& v : vecs) {
      data.add_row({v.values.data(), n_features}, 0.0);
    }
    std::vector<std::string> names;
    for (std::size_t f = 0; f < n_features; ++f) names.emplace_back(features::feature_names()[f]);
    const std::vector<double> predictions = forest::predict_checked(model, data, names);

    std::string csv = "account_id,predicted_score,bias,top3_contributing_features\n";
    std::size_t verify_failures = 0;
    for (std::size_t i = 0; i < usable.size(); ++i) {
      const forest::ContributionBreakdown breakdown = forest::contributions(model, data.row(i));
      if (config.verify) {
        double total = breakdown.bias;
        for (double c : breakdown.contributions) total += c;
        if (std::abs(total - predictions[i]) > 1e-9) {
          err << "verify failed for " << usable[i].profile.id << ": |bias+sum-pred| = "
              << format_double(std::abs(total - predictions[i])) << '\n';
          ++verify_failures;
        }
      }
      std::vector<std::size_t> order(breakdown.contributions.size());
      for (std::size_t f = 0; f < order.size(); ++f) order[f] = f;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(breakdown.contributions[a]);
        const double mb = std::abs(breakdown.contributions[b]);
        if (ma != mb) return ma > mb;
        return a < b;
      });
      std::string top3;
      for (std::size_t j = 0; j < std::min<std::size_t>(3, order.size()); ++j) {
        if (j) top3 += ';';
        const double c = breakdown.contributions[order[j]];
        top3 += model.feature_names[order[j]] + ':' + (c >= 0 ? "+" : "") + format_double(c);
      }
      csv += usable[i].profile.id + ',' + format_double(predictions[i]) + ',' +
             format_double(breakdown.bias) + ',' + top3 + '\n';
    }
    write_file(config.out_path, csv);
    out << "seed: " << config.seed << '\n';
    out << "scored " << usable.size() << " accounts -> " << config.out_path << '\n';
    if (verify_failures > 0) {
      err << "verify: " << verify_failures << " rows failed the decomposition identity\n";
      return 1;
    }
    if (config.verify) out << "verify: decomposition identity holds for all rows\n";
    return kExitOk;
  });
}

int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    if (config.labels_path.empty()) throw UsageError("--labels is required");
    if (config.scores_path.empty() && config.botometer_path.empty()) {
      throw UsageError("--scores or --botometer is required");
    }
    const std::map<std::string, double> truth =
        load_score_csv(config.labels_path, "true_score");
    const std::map<std::string, double> predicted =
        config.scores_path.empty()
            ? load_score_csv(config.botometer_path, "botometer_score")
            : load_score_csv(config.scores_path, "predicted_score");

    std::vector<stats::ScorePair> pairs;
    for (const auto& [id, t] : truth) {
      const auto it = predicted.find(id);
      if (it != predicted.end()) pairs.push_back({t, it->second});
    }
    if (pairs.empty()) {
      throw AlignmentError("no account ids shared between the two score sets");
    }
    const stats::EvaluationReport report = stats::evaluate(pairs);
    out << report.to_csv_line() << '\n';
    out << report.to_text_block();
    return kExitOk;
  });
}

int cmd_report(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    validate_common(config);
    if (config.out_path.empty()) throw UsageError("--out directory is required");
    std::vector<corpus::Account> accounts = load_corpus(config, err);
    if (!config.labels_path.empty()) {
      corpus::attach_labels(accounts, config.labels_path);
    }
    if (!config.botometer_path.empty()) {
      corpus::attach_botometer(accounts, config.botometer_path);
    }
    std::vector<corpus::Account> usable;
    for (corpus::Account& a : accounts) {
      if (a.tweets.empty()) {
        err << "skipping " << a.profile.id << ": empty timeline\n";
      } else {
        usable.push_back(std::move(a));
      }
    }
    if (usable.empty()) throw DataError("no accounts with tweets");

    const artext::StopwordSet stopwords = load_stopword_config(config);
    const features::SentimentLexicon lexicon = load_lexicon_config(config);

    std::optional<forest::Forest> model;
    std::optional<topics::TopicModel> topic_model;
    if (!config.model_path.empty()) {
      model = forest::load_model(config.model_path);
      checked_prefix(*model);
      if (model->feature_names.size() > 14) {
        topic_model = topics::load_topic_model(topics_path_for(config));
      }
    }

    std::vector<std::vector<double>> thetas;
    if (topic_model) {
      const std::vector<topics::Document> docs = account_documents(usable, stopwords);
      thetas = infer_all(*topic_model, docs, config.seed);
    }

    std::vector<double> predictions;
    if (model) {
      const std::vector<features::FeatureVector> vecs =
          compute_features(usable, thetas, lexicon);
      forest::Dataset data;
      data.cols = model->feature_names.size();
      for (const features::FeatureVector& v : vecs) {
        data.add_row({v.values.data(), data.cols}, 0.0);
      }
      predictions = forest::predict(*model, data);
    }

    std::vector<analysis::ReportRow> rows;
    for (std::size_t i = 0; i < usable.size(); ++i) {
      analysis::ReportRow row;
      row.account = &usable[i];
      row.predicted = model ? std::optional<double>(predictions[i]) : std::nullopt;
      if (usable[i].true_score) {
        row.score = *usable[i].true_score;
      } else if (row.predicted) {
        row.score = *row.predicted;
      } else {
        throw DataError("account " + usable[i].profile.id +
                        " has neither a true score nor a model prediction");
      }
      if (!thetas.empty()) row.theta = thetas[i];
      rows.push_back(std::move(row));
    }

    analysis::ReportOptions options;
    options.threshold = config.threshold;
    const analysis::SourceSet islamic = load_islamic_config(config);
    options.islamic_apps = &islamic;
    if (!config.hate_counts_path.empty()) {
      options.hate_counts = load_hate_counts(config.hate_counts_path);
    }
    if (!config.topic_labels_path.empty()) {
      options.topic_labels = topics::load_topic_labels(config.topic_labels_path, 7);
    }
    analysis::emit_report(rows, options, config.out_path);
    out << "seed: " << config.seed << '\n';
    out << "report: " << rows.size() << " accounts -> " << config.out_path << '\n';
    return kExitOk;
  });
}

}  // namespace dhira::pipeline
