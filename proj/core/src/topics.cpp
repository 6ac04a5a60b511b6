#include "dhira/topics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "dhira/errors.hpp"
#include "dhira/rng.hpp"
#include "dhira/textio.hpp"

namespace dhira::topics {

namespace {

struct EncodedCorpus {
  std::vector<std::vector<std::uint32_t>> docs;  // in-vocabulary token ids
  std::size_t total_tokens = 0;
};

EncodedCorpus encode(std::span<const Document> docs, const Vocabulary& vocab) {
  EncodedCorpus out;
  out.docs.reserve(docs.size());
  for (const Document& doc : docs) {
    std::vector<std::uint32_t> ids;
    ids.reserve(doc.tokens.size());
    for (const std::string& tok : doc.tokens) {
      const auto it = vocab.index.find(tok);
      if (it != vocab.index.end()) ids.push_back(it->second);
    }
    out.total_tokens += ids.size();
    out.docs.push_back(std::move(ids));
  }
  return out;
}

}  // namespace

Vocabulary build_vocabulary(std::span<const Document> docs) {
  if (docs.empty()) throw DataError("empty corpus");
  if (docs.size() < kMinCorpusDocuments) {
    throw DataError("vocabulary requires at least " + std::to_string(kMinCorpusDocuments) +
                    " documents, got " + std::to_string(docs.size()));
  }
  // std::map keeps word iteration deterministic.
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // word -> (df, freq)
  for (const Document& doc : docs) {
    std::map<std::string, std::size_t> local;
    for (const std::string& tok : doc.tokens) local[tok] += 1;
    for (const auto& [word, freq] : local) {
      auto& entry = counts[word];
      entry.first += 1;
      entry.second += freq;
    }
  }

  struct Candidate {
    std::string word;
    std::size_t df;
    std::size_t freq;
  };
  std::vector<Candidate> survivors;
  for (const auto& [word, c] : counts) {
    if (c.first < kMinDocumentFrequency) continue;
    if (2 * c.first > docs.size()) continue;  // strictly more than 50% of accounts
    survivors.push_back({word, c.first, c.second});
  }
  std::sort(survivors.begin(), survivors.end(), [](const Candidate& x, const Candidate& y) {
    if (x.freq != y.freq) return x.freq > y.freq;
    return x.word < y.word;
  });
  if (survivors.size() > kMaxVocabulary) survivors.resize(kMaxVocabulary);

  Vocabulary vocab;
  vocab.words.reserve(survivors.size());
  vocab.df.reserve(survivors.size());
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    vocab.index.emplace(survivors[i].word, static_cast<std::uint32_t>(i));
    vocab.words.push_back(std::move(survivors[i].word));
    vocab.df.push_back(survivors[i].df);
  }
  return vocab;
}

TopicModel fit_lda(std::span<const Document> docs, Vocabulary vocab, const FitOptions& options) {
  if (vocab.empty()) throw DataError("empty vocabulary");
  if (options.k == 0) throw DataError("k must be positive");

  const std::size_t K = options.k;
  const std::size_t V = vocab.size();
  const double alpha = options.alpha > 0.0 ? options.alpha : 50.0 / static_cast<double>(K);
  const double beta = options.beta;
  const double v_beta = static_cast<double>(V) * beta;

  const EncodedCorpus corpus = encode(docs, vocab);
  if (corpus.total_tokens == 0) {
    throw DataError("all documents empty after vocabulary restriction");
  }
  const std::size_t D = corpus.docs.size();

  std::vector<std::int32_t> n_dk(D * K, 0);
  std::vector<std::int32_t> n_wk(V * K, 0);
  std::vector<std::int64_t> n_k(K, 0);
  std::vector<std::vector<std::uint8_t>> z(D);
  static_assert(sizeof(std::uint8_t) == 1);
  if (K > 255) throw DataError("k too large");

  Rng rng(options.seed);
  for (std::size_t d = 0; d < D; ++d) {
    z[d].resize(corpus.docs[d].size());
    for (std::size_t i = 0; i < corpus.docs[d].size(); ++i) {
      const std::uint32_t w = corpus.docs[d][i];
      const std::size_t topic = rng.below(K);
      z[d][i] = static_cast<std::uint8_t>(topic);
      ++n_dk[d * K + topic];
      ++n_wk[static_cast<std::size_t>(w) * K + topic];
      ++n_k[topic];
    }
  }

  // Incremental per-topic denominators keep the inner loop division-free.
  std::vector<double> inv_nk(K);
  const auto refresh_inv = [&](std::size_t k) {
    inv_nk[k] = 1.0 / (static_cast<double>(n_k[k]) + v_beta);
  };
  for (std::size_t k = 0; k < K; ++k) refresh_inv(k);

  std::vector<double> weights(K);
  for (std::size_t iter = 0; iter < options.iterations; ++iter) {
    for (std::size_t d = 0; d < D; ++d) {
      std::int32_t* doc_counts = &n_dk[d * K];
      const std::vector<std::uint32_t>& ids = corpus.docs[d];
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::uint32_t w = ids[i];
        std::int32_t* word_counts = &n_wk[static_cast<std::size_t>(w) * K];
        const std::size_t old_topic = z[d][i];
        --doc_counts[old_topic];
        --word_counts[old_topic];
        --n_k[old_topic];
        refresh_inv(old_topic);

        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          total += (static_cast<double>(doc_counts[k]) + alpha) *
                   (static_cast<double>(word_counts[k]) + beta) * inv_nk[k];
          weights[k] = total;
        }
        const double u = rng.uniform01() * total;
        std::size_t new_topic = 0;
        while (new_topic + 1 < K && weights[new_topic] < u) ++new_topic;

        z[d][i] = static_cast<std::uint8_t>(new_topic);
        ++doc_counts[new_topic];
        ++word_counts[new_topic];
        ++n_k[new_topic];
        refresh_inv(new_topic);
      }
    }
    if (options.iteration_hook) options.iteration_hook(iter + 1, n_k);
  }

  TopicModel model;
  model.k = K;
  model.alpha = alpha;
  model.beta = beta;
  model.iterations = options.iterations;
  model.seed = options.seed;
  model.vocab = std::move(vocab);
  model.phi.assign(K, std::vector<double>(V, 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    const double denom = static_cast<double>(n_k[k]) + v_beta;
    for (std::size_t w = 0; w < V; ++w) {
      model.phi[k][w] = (static_cast<double>(n_wk[w * K + k]) + beta) / denom;
    }
  }
  model.doc_ids.reserve(D);
  model.theta.reserve(D);
  for (std::size_t d = 0; d < D; ++d) {
    model.doc_ids.push_back(docs[d].id);
    std::vector<double> th(K);
    const double denom =
        static_cast<double>(corpus.docs[d].size()) + static_cast<double>(K) * alpha;
    for (std::size_t k = 0; k < K; ++k) {
      th[k] = (static_cast<double>(n_dk[d * K + k]) + alpha) / denom;
    }
    model.theta.push_back(std::move(th));
  }
  return model;
}

std::vector<double> infer_theta(const TopicModel& model, std::span<const std::string> tokens,
                                std::size_t iterations, std::uint64_t seed) {
  const std::size_t K = model.k;
  std::vector<std::uint32_t> ids;
  for (const std::string& tok : tokens) {
    const auto it = model.vocab.index.find(tok);
    if (it != model.vocab.index.end()) ids.push_back(it->second);
  }
  if (ids.empty()) {
    return std::vector<double>(K, 1.0 / static_cast<double>(K));
  }

  Rng rng(seed);
  std::vector<std::int32_t> m_k(K, 0);
  std::vector<std::size_t> z(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    z[i] = rng.below(K);
    ++m_k[z[i]];
  }
  std::vector<double> weights(K);
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::uint32_t w = ids[i];
      --m_k[z[i]];
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        total += (static_cast<double>(m_k[k]) + model.alpha) * model.phi[k][w];
        weights[k] = total;
      }
      const double u = rng.uniform01() * total;
      std::size_t new_topic = 0;
      while (new_topic + 1 < K && weights[new_topic] < u) ++new_topic;
      z[i] = new_topic;
      ++m_k[new_topic];
    }
  }
  std::vector<double> theta(K);
  const double denom =
      static_cast<double>(ids.size()) + static_cast<double>(K) * model.alpha;
  for (std::size_t k = 0; k < K; ++k) {
    theta[k] = (static_cast<double>(m_k[k]) + model.alpha) / denom;
  }
  return theta;
}

std::size_t dominant_topic(std::span<const double> theta) {
  if (theta.empty()) throw DataError("empty topic distribution");
  double sum = 0.0;
  for (double t : theta) {
    if (t < 0.0 || !std::isfinite(t)) throw DataError("invalid topic distribution");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw DataError("topic distribution does not sum to 1");
  std::size_t best = 0;
  for (std::size_t i = 1; i < theta.size(); ++i) {
    if (theta[i] > theta[best]) best = i;
  }
  return best + 1;  // topics are reported 1-based (topic_1..topic_k)
}

namespace {
constexpr std::string_view kModelTag = "dhira-topics v1";
}

void save_topic_model(const std::string& path, const TopicModel& model) {
  std::string out;
  out += kModelTag;
  out += '\n';
  out += "k " + std::to_string(model.k) + '\n';
  out += "alpha " + format_double(model.alpha) + '\n';
  out += "beta " + format_double(model.beta) + '\n';
  out += "iterations " + std::to_string(model.iterations) + '\n';
  out += "seed " + std::to_string(model.seed) + '\n';
  out += "vocab " + std::to_string(model.vocab.size()) + '\n';
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    out += model.vocab.words[i] + '\t' + std::to_string(model.vocab.df[i]) + '\n';
  }
  out += "phi\n";
  for (const std::vector<double>& row : model.phi) {
    for (std::size_t w = 0; w < row.size(); ++w) {
      if (w) out += ' ';
      out += format_double(row[w]);
    }
    out += '\n';
  }
  write_file(path, out);
}

TopicModel load_topic_model(const std::string& path) {
  const std::string content = read_file(path);
  std::vector<std::string> lines = split(content, '\n');
  std::size_t at = 0;
  const auto next_line = [&]() -> std::string_view {
    if (at >= lines.size()) throw ModelFormatError("truncated topic model file: " + path);
    return lines[at++];
  };
  const std::string_view tag = next_line();
  if (tag != kModelTag) {
    if (tag.starts_with("dhira-topics")) {
      throw ModelVersionError("unsupported topic model version: '" + std::string(tag) + "'");
    }
    throw ModelFormatError("not a topic model file: " + path);
  }
  const auto field = [&](std::string_view key) -> std::string {
    const std::string_view line = next_line();
    if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != ' ') {
      throw ModelFormatError("expected '" + std::string(key) + "' line in " + path);
    }
    return std::string(line.substr(key.size() + 1));
  };

  TopicModel model;
  try {
    model.k = std::stoul(field("k"));
    model.alpha = std::stod(field("alpha"));
    model.beta = std::stod(field("beta"));
    model.iterations = std::stoul(field("iterations"));
    model.seed = std::stoull(field("seed"));
    const std::size_t v = std::stoul(field("vocab"));
    model.vocab.words.reserve(v);
    for (std::size_t i = 0; i < v; ++i) {
      const std::string_view line = next_line();
      const std::size_t tab = line.find('\t');
      if (tab == std::string_view::npos) throw ModelFormatError("bad vocab line in " + path);
      std::string word(line.substr(0, tab));
      model.vocab.df.push_back(std::stoul(std::string(line.substr(tab + 1))));
      model.vocab.index.emplace(word, static_cast<std::uint32_t>(i));
      model.vocab.words.push_back(std::move(word));
    }
    if (next_line() != "phi") throw ModelFormatError("expected 'phi' section in " + path);
    for (std::size_t k = 0; k < model.k; ++k) {
      const std::string_view line = next_line();
      std::vector<double> row;
      row.reserve(v);
      const char* p = line.data();
      const char* end = line.data() + line.size();
      while (p < end) {
        double value = 0.0;
        const auto res = std::from_chars(p, end, value);
        if (res.ec != std::errc{}) throw ModelFormatError("bad phi value in " + path);
        row.push_back(value);
        p = res.ptr;
        while (p < end && *p == ' ') ++p;
      }
      if (row.size() != v) throw ModelFormatError("phi row length mismatch in " + path);
      model.phi.push_back(std::move(row));
    }
  } catch (const std::invalid_argument&) {
    throw ModelFormatError("unparseable number in " + path);
  } catch (const std::out_of_range&) {
    throw ModelFormatError("number out of range in " + path);
  }
  return model;
}

std::vector<std::string> load_topic_labels(const std::string& path, std::size_t k) {
  std::vector<std::string> labels(k);
  for (std::size_t i = 0; i < k; ++i) labels[i] = "topic_" + std::to_string(i + 1);
  const std::string content = read_file(path);
  for (const std::string& raw : split(content, '\n')) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    std::size_t idx = 0;
    const auto res = std::from_chars(key.data(), key.data() + key.size(), idx);
    if (res.ec != std::errc{} || idx < 1 || idx > k) continue;
    labels[idx - 1] = std::string(value);
  }
  return labels;
}

}  // namespace dhira::topics
