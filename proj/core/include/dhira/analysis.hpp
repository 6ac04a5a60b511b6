#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "dhira/corpus.hpp"

namespace dhira::analysis {

inline constexpr double kDefaultBotThreshold = 2.5;

// An account with its governing score: the true score when present,
// otherwise the model prediction.
struct Scored {
  const corpus::Account* account = nullptr;
  double score = 0.0;
};

struct BotHumanSplit {
  std::vector<Scored> bots;    // score > threshold
  std::vector<Scored> humans;  // score <= threshold
};

BotHumanSplit partition(std::span<const Scored> accounts,
                        double threshold = kDefaultBotThreshold);

struct AttributionSummary {
  std::int64_t n_bots = 0;
  std::int64_t n_humans = 0;
  std::int64_t bot_tweets = 0;
  std::int64_t human_tweets = 0;
  double per_bot_rate = 0.0;
  double per_human_rate = 0.0;
  double bot_share = 0.0;
  double human_share = 0.0;
  double ratio = 0.0;  // human_tweets per bot tweet, exact real

  // "1:k" with k rounded to the nearest integer ("0:1" / "1:0" at the edges).
  std::string ratio_display() const;
};

// Pure arithmetic over hateful-tweet counts. Throws DataError when the total
// tweet count is zero or any count is negative.
AttributionSummary attribute_hate(std::int64_t n_bots, std::int64_t bot_tweets,
                                  std::int64_t n_humans, std::int64_t human_tweets);

enum class SourceCategory { official, islamic_supplication, third_party };
std::string to_string(SourceCategory c);

// Islamic-supplication app labels, stored case-folded for matching.
using SourceSet = std::unordered_set<std::string>;

SourceSet load_islamic_apps(const std::string& path);
const SourceSet& default_islamic_apps();

// Case-insensitive exact match against the five official Twitter clients,
// then the islamic app list; everything else is third_party.
SourceCategory categorize_source(std::string_view label, const SourceSet& islamic_apps);

// Modal source label over the window, categorized; modal ties go to the most
// recently used label. Throws DataError on an empty timeline.
SourceCategory dominant_source(const corpus::Account& account, const SourceSet& islamic_apps);

enum class NetworkKind { retweet, mention };

struct InteractionNetwork {
  NetworkKind kind = NetworkKind::retweet;
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;  // directed, deduplicated
  std::size_t singleton_count = 0;  // nodes with no incident edge
};

InteractionNetwork build_network(std::span<const corpus::Account* const> accounts,
                                 NetworkKind kind);

struct ReportRow {
  const corpus::Account* account = nullptr;
  double score = 0.0;                // governing score
  std::optional<double> predicted;   // model prediction, when one was made
  std::vector<double> theta;         // 7 topic probabilities; empty = unknown
};

struct ReportOptions {
  double threshold = kDefaultBotThreshold;
  const SourceSet* islamic_apps = nullptr;  // nullptr = default list
  // Hateful-tweet counts per account id; when absent the attribution block
  // falls back to timeline tweet volumes and says so.
  std::optional<std::map<std::string, std::int64_t>> hate_counts;
  std::vector<std::string> topic_labels;  // optional display names, size 7
};

// Writes histogram.csv, pairs.csv, topics_by_class.csv, sources_by_class.csv,
// network_summary.csv and attribution.txt into out_dir. Values are rounded
// to 4 decimals at serialization only; reruns are byte-identical.
void emit_report(std::span<const ReportRow> rows, const ReportOptions& options,
                 const std::string& out_dir);

}  // namespace dhira::analysis
