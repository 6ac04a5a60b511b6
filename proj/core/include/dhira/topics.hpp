#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dhira::topics {

struct Document {
  std::string id;
  std::vector<std::string> tokens;
};

struct Vocabulary {
  std::vector<std::string> words;  // most frequent first, ties lexicographic
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::size_t> df;  // account-document frequency, aligned with words

  bool empty() const { return words.empty(); }
  std::size_t size() const { return words.size(); }
};

inline constexpr std::size_t kMinDocumentFrequency = 10;
inline constexpr std::size_t kMaxVocabulary = 10000;
inline constexpr std::size_t kMinCorpusDocuments = 20;

// Applies min-df 10 accounts, max-df 50% of accounts, then keeps the top-10K
// words by corpus frequency. Requires at least 20 documents.
Vocabulary build_vocabulary(std::span<const Document> docs);

struct TopicModel {
  std::size_t k = 7;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  Vocabulary vocab;
  std::vector<std::vector<double>> phi;    // k rows of |V| word probabilities
  std::vector<std::string> doc_ids;        // training documents
  std::vector<std::vector<double>> theta;  // per training document, k probabilities
};

struct FitOptions {
  std::size_t k = 7;
  double alpha = 0.0;  // <= 0 means the 50/k default
  double beta = 0.01;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  // Invoked after every Gibbs sweep with the per-topic token counts
  // (test hook for the conservation invariant).
  std::function<void(std::size_t iteration, std::span<const std::int64_t> topic_counts)>
      iteration_hook;
};

// Collapsed Gibbs sampling with symmetric priors; phi and theta come from the
// final-iteration counts with prior smoothing. Out-of-vocabulary tokens are
// dropped. Deterministic under seed (training is single-threaded: the
// sampler mutates shared counts).
TopicModel fit_lda(std::span<const Document> docs, Vocabulary vocab, const FitOptions& options);

inline constexpr std::size_t kDefaultInferIterations = 200;

// Fold-in Gibbs sampling holding phi fixed. A document that is empty after
// vocabulary restriction gets the uniform distribution.
std::vector<double> infer_theta(const TopicModel& model, std::span<const std::string> tokens,
                                std::size_t iterations = kDefaultInferIterations,
                                std::uint64_t seed = 0);

// 1-based index of the highest-probability topic; ties break to the lowest
// index.
std::size_t dominant_topic(std::span<const double> theta);

// Structured text persistence: vocabulary, phi, hyperparameters, seed.
void save_topic_model(const std::string& path, const TopicModel& model);
TopicModel load_topic_model(const std::string& path);

// topic-labels file: `index = display name` lines, '#' comments.
std::vector<std::string> load_topic_labels(const std::string& path, std::size_t k);

}  // namespace dhira::topics
