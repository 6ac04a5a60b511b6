#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dhira/corpus.hpp"

namespace dhira::features {

inline constexpr std::size_t kFeatureCount = 35;

// Contract order; persisted with trained models.
std::span<const std::string_view> feature_names();

// Index of a feature name in contract order; throws DataError if unknown.
std::size_t feature_index(std::string_view name);

// Cumulative families in ablation order: content (9), +tweet (5),
// +topic&sentiment (9), +account (12).
enum class FeatureFamily { content, tweet, topic_sentiment, account };

struct FamilySpan {
  std::size_t offset;
  std::size_t count;
};
FamilySpan family_span(FeatureFamily family);

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  double at_name(std::string_view name) const { return values[feature_index(name)]; }
};

struct SentimentLexicon {
  std::unordered_map<std::string, double> polarity;  // letter-normalized word -> [-1,1]
  std::unordered_set<std::string> subjective;
  std::unordered_set<std::string> negators;

  bool empty() const { return polarity.empty() && subjective.empty(); }
};

// lexicon.tsv: word<TAB>polarity<TAB>subjective(0|1)<TAB>negator(0|1).
SentimentLexicon load_lexicon(const std::string& path);
const SentimentLexicon& default_lexicon();

// Content features over the tweet window: avg_word_len, avg_tweet_len,
// avg_punctuations, avg_emojis, avg_numerics, avg_hashtags, avg_mentions,
// avg_links, avg_repetition. Throws DataError on an empty timeline.
std::array<double, 9> content_features(const corpus::Account& account);

// original/reply/retweet proportions plus got_retweeted / got_favorited
// (retweet-kind tweets excluded from the two sums: their counts accrue to
// the original author).
std::array<double, 5> tweet_features(const corpus::Account& account);

// (polarity, subjectivity). A token's polarity flips sign when the
// immediately preceding word token is a negator. Empty lexicon gives zeros.
std::array<double, 2> sentiment(const corpus::Account& account, const SentimentLexicon& lexicon);

// statuses_count, followers_count, friends_count, favorite_count,
// account_age (floor(days/30.44)), empty_description, empty_location,
// empty_URL, default_profile, default_image, verified, geo_enabled.
std::array<double, 12> account_features(const corpus::Account& account);

// Fixed-order 35-feature assembly. topic_dist must have 7 entries summing to
// 1 +/- 1e-6.
FeatureVector assemble(const corpus::Account& account, std::span<const double> topic_dist,
                       std::array<double, 2> sent);

struct AccountFeatures {
  std::string account_id;
  FeatureVector vec;
};

// features.csv: header `account_id,<35 names in contract order>`.
void write_features_csv(const std::string& path, std::span<const AccountFeatures> rows);

}  // namespace dhira::features
