#include "dhira/topics.hpp"

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "dhira/errors.hpp"
#include "dhira/rng.hpp"
#include "dhira/textio.hpp"

using namespace dhira;
using topics::Document;

namespace {

// Two disjoint 10-word vocabularies; 40 documents drawn from one group each.
struct TwoGroupCorpus {
  std::vector<Document> docs;
  std::vector<std::string> group_a;
  std::vector<std::string> group_b;
};

TwoGroupCorpus two_group_corpus(std::uint64_t seed) {
  TwoGroupCorpus c;
  for (int i = 0; i < 10; ++i) {
    c.group_a.push_back("alpha" + std::to_string(i));
    c.group_b.push_back("beta" + std::to_string(i));
  }
  Rng rng(seed);
  for (int d = 0; d < 40; ++d) {
    Document doc;
    doc.id = "doc" + std::to_string(d);
    const auto& group = d % 2 == 0 ? c.group_a : c.group_b;
    for (int t = 0; t < 60; ++t) doc.tokens.push_back(group[rng.below(group.size())]);
    c.docs.push_back(std::move(doc));
  }
  return c;
}

// Brute-force co-occurrence check: words from different groups never share a
// document, words within a group do. Validates the synthetic construction
// the separation assertion relies on.
bool groups_are_cooccurrence_separated(const TwoGroupCorpus& c) {
  std::set<std::pair<std::string, std::string>> cooccur;
  for (const Document& doc : c.docs) {
    for (const std::string& u : doc.tokens) {
      for (const std::string& v : doc.tokens) cooccur.insert({u, v});
    }
  }
  for (const std::string& a : c.group_a) {
    for (const std::string& b : c.group_b) {
      if (cooccur.contains({a, b}) || cooccur.contains({b, a})) return false;
    }
  }
  return true;
}

double group_mass(const topics::TopicModel& model, std::size_t k,
                  const std::vector<std::string>& group) {
  double mass = 0.0;
  for (const std::string& w : group) {
    const auto it = model.vocab.index.find(w);
    if (it != model.vocab.index.end()) mass += model.phi[k][it->second];
  }
  return mass;
}

std::vector<Document> uniform_docs(std::size_t n, const std::vector<std::string>& words,
                                   std::size_t len, std::uint64_t seed) {
  std::vector<Document> docs;
  Rng rng(seed);
  for (std::size_t d = 0; d < n; ++d) {
    Document doc;
    doc.id = "d" + std::to_string(d);
    for (std::size_t t = 0; t < len; ++t) doc.tokens.push_back(words[rng.below(words.size())]);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace

TEST_CASE("vocabulary filters: min-df, max-df, cap") {
  std::vector<Document> docs;
  // 100 docs; "rare" in 9 docs, "mid" in 30, "common" in 51.
  for (int d = 0; d < 100; ++d) {
    Document doc;
    doc.id = "d" + std::to_string(d);
    if (d < 9) doc.tokens.push_back("rare");
    if (d < 30) doc.tokens.push_back("mid");
    if (d < 51) doc.tokens.push_back("common");
    doc.tokens.push_back("filler" + std::to_string(d % 25));  // df 4 each
    docs.push_back(std::move(doc));
  }
  const topics::Vocabulary vocab = topics::build_vocabulary(docs);
  CHECK(!vocab.index.contains("rare"));     // below min-df 10
  CHECK(!vocab.index.contains("common"));   // above 50% of documents
  CHECK(vocab.index.contains("mid"));
  REQUIRE(vocab.index.size() == 1);
  CHECK(vocab.df[vocab.index.at("mid")] == 30);
}

TEST_CASE("vocabulary keeps the 10K most frequent with lexicographic ties") {
  // 10,050 distinct words, each in exactly 20 of 40 docs; frequency varies.
  std::vector<Document> docs(40);
  for (std::size_t d = 0; d < docs.size(); ++d) docs[d].id = "d" + std::to_string(d);
  for (int w = 0; w < 10050; ++w) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%05d", w);
    // Lower-numbered words are more frequent; the last 50 lose the cap race.
    const int copies = w < 10000 ? 2 : 1;
    for (int d = 0; d < 20; ++d) {
      for (int c = 0; c < copies; ++c) docs[d].tokens.push_back(buf);
    }
  }
  const topics::Vocabulary vocab = topics::build_vocabulary(docs);
  CHECK(vocab.size() == 10000);
  CHECK(vocab.index.contains("w00000"));
  CHECK(!vocab.index.contains("w10049"));  // least frequent dropped
}

TEST_CASE("vocabulary preconditions") {
  std::vector<Document> few(5);
  CHECK_THROWS_AS(topics::build_vocabulary(few), DataError);
  CHECK_THROWS_AS(topics::build_vocabulary(std::vector<Document>{}), DataError);
}

TEST_CASE("two disjoint word groups separate into distinct topics") {
  const TwoGroupCorpus corpus = two_group_corpus(1234);
  REQUIRE(groups_are_cooccurrence_separated(corpus));

  topics::Vocabulary vocab = topics::build_vocabulary(corpus.docs);
  REQUIRE(vocab.size() == 20);

  topics::FitOptions options;
  options.k = 2;
  options.iterations = 300;
  options.seed = 9;
  const topics::TopicModel model = topics::fit_lda(corpus.docs, std::move(vocab), options);

  const double a0 = group_mass(model, 0, corpus.group_a);
  const double a1 = group_mass(model, 1, corpus.group_a);
  const std::size_t topic_a = a0 >= a1 ? 0 : 1;
  const std::size_t topic_b = 1 - topic_a;
  CHECK(group_mass(model, topic_a, corpus.group_a) >= 0.9);
  CHECK(group_mass(model, topic_b, corpus.group_b) >= 0.9);
}

TEST_CASE("single document, k=1: theta is (1.0)") {
  std::vector<std::string> words = {"aaa", "bbb", "ccc"};
  std::vector<Document> docs = uniform_docs(1, words, 30, 5);
  topics::Vocabulary vocab;
  for (std::size_t i = 0; i < words.size(); ++i) {
    vocab.words.push_back(words[i]);
    vocab.df.push_back(1);
    vocab.index.emplace(words[i], static_cast<std::uint32_t>(i));
  }
  topics::FitOptions options;
  options.k = 1;
  options.iterations = 10;
  const topics::TopicModel model = topics::fit_lda(docs, vocab, options);
  REQUIRE(model.theta.size() == 1);
  CHECK(model.theta[0][0] == doctest::Approx(1.0));
}

TEST_CASE("fit is deterministic under seed") {
  const TwoGroupCorpus corpus = two_group_corpus(77);
  topics::FitOptions options;
  options.k = 3;
  options.iterations = 50;
  options.seed = 21;
  const auto m1 = topics::fit_lda(corpus.docs, topics::build_vocabulary(corpus.docs), options);
  const auto m2 = topics::fit_lda(corpus.docs, topics::build_vocabulary(corpus.docs), options);
  CHECK(m1.phi == m2.phi);
  CHECK(m1.theta == m2.theta);
  options.seed = 22;
  const auto m3 = topics::fit_lda(corpus.docs, topics::build_vocabulary(corpus.docs), options);
  CHECK(m1.phi != m3.phi);
}

TEST_CASE("gibbs sweeps conserve the corpus token count") {
  const TwoGroupCorpus corpus = two_group_corpus(31);
  std::size_t corpus_tokens = 0;
  for (const Document& d : corpus.docs) corpus_tokens += d.tokens.size();

  topics::FitOptions options;
  options.k = 4;
  options.iterations = 40;
  options.seed = 3;
  std::size_t hooks = 0;
  options.iteration_hook = [&](std::size_t, std::span<const std::int64_t> counts) {
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    CHECK(static_cast<std::size_t>(total) == corpus_tokens);
    ++hooks;
  };
  topics::fit_lda(corpus.docs, topics::build_vocabulary(corpus.docs), options);
  CHECK(hooks == 40);
}

TEST_CASE("phi rows and theta vectors are probability distributions") {
  const TwoGroupCorpus corpus = two_group_corpus(8);
  topics::FitOptions options;
  options.k = 5;
  options.iterations = 30;
  options.seed = 12;
  const auto model = topics::fit_lda(corpus.docs, topics::build_vocabulary(corpus.docs), options);
  for (const auto& row : model.phi) {
    double sum = 0.0;
    for (double p : row) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
  }
  for (const auto& th : model.theta) {
    double sum = 0.0;
    for (double p : th) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
  }
}

TEST_CASE("fit_lda error paths") {
  const TwoGroupCorpus corpus = two_group_corpus(2);
  topics::Vocabulary empty;
  topics::FitOptions options;
  CHECK_THROWS_AS(topics::fit_lda(corpus.docs, empty, options), DataError);

  // Vocabulary that matches nothing in the docs.
  topics::Vocabulary unrelated;
  unrelated.words = {"zzz"};
  unrelated.df = {1};
  unrelated.index.emplace("zzz", 0);
  CHECK_THROWS_AS(topics::fit_lda(corpus.docs, unrelated, options), DataError);
}

TEST_CASE("infer_theta: empty doc fallback, normalization, train-doc agreement") {
  const TwoGroupCorpus corpus = two_group_corpus(64);
  topics::FitOptions options;
  options.k = 2;
  options.iterations = 300;
  options.seed = 17;
  const auto model = topics::fit_lda(corpus.docs, topics::build_vocabulary(corpus.docs), options);

  const std::vector<std::string> empty_doc;
  const auto uniform = topics::infer_theta(model, empty_doc, 50, 1);
  for (double p : uniform) CHECK(p == doctest::Approx(1.0 / 2.0));

  // Fold-in on a training document lands near its training theta
  // (total variation <= 0.15 averaged over 10 seeds).
  double total_tv = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inferred = topics::infer_theta(model, corpus.docs[0].tokens, 200, seed);
    double sum = 0.0;
    double tv = 0.0;
    for (std::size_t k = 0; k < inferred.size(); ++k) {
      sum += inferred[k];
      tv += std::abs(inferred[k] - model.theta[0][k]);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
    total_tv += tv / 2.0;
  }
  CHECK(total_tv / 10.0 <= 0.15);
}

TEST_CASE("dominant_topic: argmax with lowest-index ties, 1-based") {
  const std::vector<double> a = {0.1, 0.6, 0.05, 0.05, 0.05, 0.05, 0.1};
  CHECK(topics::dominant_topic(a) == 2);
  const std::vector<double> uniform(7, 1.0 / 7.0);
  CHECK(topics::dominant_topic(uniform) == 1);
  const std::vector<double> last = {0, 0, 0, 0, 0, 0, 1};
  CHECK(topics::dominant_topic(last) == 7);
  const std::vector<double> bad = {0.5, 0.1};
  CHECK_THROWS_AS(topics::dominant_topic(bad), DataError);
}

TEST_CASE("topic model text persistence round-trips") {
  const TwoGroupCorpus corpus = two_group_corpus(99);
  topics::FitOptions options;
  options.k = 2;
  options.iterations = 40;
  options.seed = 5;
  const auto model = topics::fit_lda(corpus.docs, topics::build_vocabulary(corpus.docs), options);
  topics::save_topic_model("test_topics.model", model);
  const auto loaded = topics::load_topic_model("test_topics.model");
  CHECK(loaded.k == model.k);
  CHECK(loaded.alpha == model.alpha);
  CHECK(loaded.beta == model.beta);
  CHECK(loaded.seed == model.seed);
  CHECK(loaded.vocab.words == model.vocab.words);
  CHECK(loaded.phi == model.phi);  // shortest round-trip floats are bit-exact

  // Inference through the loaded model is identical.
  const auto t1 = topics::infer_theta(model, corpus.docs[3].tokens, 50, 3);
  const auto t2 = topics::infer_theta(loaded, corpus.docs[3].tokens, 50, 3);
  CHECK(t1 == t2);

  dhira::write_file("test_topics_trunc.model", "dhira-topics v1\nk 2\n");
  CHECK_THROWS_AS(topics::load_topic_model("test_topics_trunc.model"), ModelFormatError);
  dhira::write_file("test_topics_ver.model", "dhira-topics v9\n");
  CHECK_THROWS_AS(topics::load_topic_model("test_topics_ver.model"), ModelVersionError);
  dhira::write_file("test_topics_junk.model", "hello\n");
  CHECK_THROWS_AS(topics::load_topic_model("test_topics_junk.model"), ModelFormatError);
}

TEST_CASE("topic label files") {
  dhira::write_file("test_labels.toml", "# labels\n1 = \"Sports\"\n3 = Politics\n");
  const auto labels = topics::load_topic_labels("test_labels.toml", 7);
  CHECK(labels[0] == "Sports");
  CHECK(labels[1] == "topic_2");
  CHECK(labels[2] == "Politics");
}
