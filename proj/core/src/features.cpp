#include "dhira/features.hpp"

#include <algorithm>
#include <cmath>

#include "dhira/artext.hpp"
#include "dhira/errors.hpp"
#include "dhira/textio.hpp"

namespace dhira::features {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "avg_word_len",    "avg_tweet_len",     "avg_punctuations", "avg_emojis",
    "avg_numerics",    "avg_hashtags",      "avg_mentions",     "avg_links",
    "avg_repetition",  "original_proportion", "reply_proportion", "retweet_proportion",
    "got_retweeted",   "got_favorited",     "polarity",         "subjectivity",
    "topic_1",         "topic_2",           "topic_3",          "topic_4",
    "topic_5",         "topic_6",           "topic_7",          "statuses_count",
    "followers_count", "friends_count",     "favorite_count",   "account_age",
    "empty_description", "empty_location",  "empty_URL",        "default_profile",
    "default_image",   "verified",          "geo_enabled"};

constexpr double kMeanMonthDays = 30.44;

std::size_t codepoint_length(std::string_view utf8) {
  return artext::decode_utf8(utf8).size();
}

bool blank(const std::optional<std::string>& s) {
  if (!s) return true;
  return trim(*s).empty();
}

void require_timeline(const corpus::Account& account) {
  if (account.tweets.empty()) {
    throw DataError("account " + account.profile.id + " has an empty timeline");
  }
}

}  // namespace

std::span<const std::string_view> feature_names() { return kNames; }

std::size_t feature_index(std::string_view name) {
  const auto it = std::find(kNames.begin(), kNames.end(), name);
  if (it == kNames.end()) throw DataError("unknown feature name: " + std::string(name));
  return static_cast<std::size_t>(it - kNames.begin());
}

FamilySpan family_span(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::content: return {0, 9};
    case FeatureFamily::tweet: return {9, 5};
    case FeatureFamily::topic_sentiment: return {14, 9};
    case FeatureFamily::account: return {23, 12};
  }
  return {0, 0};
}

std::array<double, 9> content_features(const corpus::Account& account) {
  require_timeline(account);
  const double n = static_cast<double>(account.tweets.size());
  double word_len_sum = 0.0, word_count = 0.0;
  double tweet_len = 0.0, punct = 0.0, emoji = 0.0, numeric = 0.0;
  double hashtags = 0.0, mentions = 0.0, links = 0.0, repetition = 0.0;

  for (const corpus::Tweet& tweet : account.tweets) {
    tweet_len += static_cast<double>(codepoint_length(tweet.text));
    for (const artext::Token& tok : artext::tokenize(tweet.text)) {
      switch (tok.cls) {
        case artext::TokenClass::arabic_word:
        case artext::TokenClass::latin_word:
          word_len_sum += static_cast<double>(codepoint_length(tok.surface));
          word_count += 1.0;
          break;
        case artext::TokenClass::punctuation: punct += 1.0; break;
        case artext::TokenClass::emoji: emoji += 1.0; break;
        case artext::TokenClass::numeric: numeric += 1.0; break;
        case artext::TokenClass::hashtag: hashtags += 1.0; break;
        case artext::TokenClass::mention: mentions += 1.0; break;
        case artext::TokenClass::url: links += 1.0; break;
        case artext::TokenClass::other: break;
      }
    }
    repetition += static_cast<double>(artext::count_elongations(tweet.text));
  }
  return {word_count > 0.0 ? word_len_sum / word_count : 0.0,
          tweet_len / n,
          punct / n,
          emoji / n,
          numeric / n,
          hashtags / n,
          mentions / n,
          links / n,
          repetition / n};
}

std::array<double, 5> tweet_features(const corpus::Account& account) {
  require_timeline(account);
  const double n = static_cast<double>(account.tweets.size());
  double original = 0.0, reply = 0.0, retweet = 0.0;
  double got_retweeted = 0.0, got_favorited = 0.0;
  for (const corpus::Tweet& tweet : account.tweets) {
    switch (tweet.kind) {
      case corpus::TweetKind::original: original += 1.0; break;
      case corpus::TweetKind::reply: reply += 1.0; break;
      case corpus::TweetKind::retweet: retweet += 1.0; break;
    }
    if (tweet.kind != corpus::TweetKind::retweet) {
      got_retweeted += static_cast<double>(tweet.retweet_count);
      got_favorited += static_cast<double>(tweet.favorite_count);
    }
  }
  return {original / n, reply / n, retweet / n, got_retweeted, got_favorited};
}

std::array<double, 2> sentiment(const corpus::Account& account, const SentimentLexicon& lexicon) {
  require_timeline(account);
  if (lexicon.empty()) return {0.0, 0.0};

  double polarity_sum = 0.0;
  double subjectivity_sum = 0.0;
  for (const corpus::Tweet& tweet : account.tweets) {
    std::vector<std::string> words;
    for (const artext::Token& tok : artext::tokenize(tweet.text)) {
      if (tok.cls == artext::TokenClass::arabic_word ||
          tok.cls == artext::TokenClass::latin_word) {
        words.push_back(artext::normalize_word(tok.surface));
      }
    }
    double tweet_polarity = 0.0;
    double matched = 0.0;
    double subjective_hits = 0.0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto it = lexicon.polarity.find(words[i]);
      if (it != lexicon.polarity.end()) {
        const bool negated = i > 0 && lexicon.negators.contains(words[i - 1]);
        tweet_polarity += negated ? -it->second : it->second;
        matched += 1.0;
      }
      if (lexicon.subjective.contains(words[i])) subjective_hits += 1.0;
    }
    if (matched > 0.0) polarity_sum += tweet_polarity / matched;
    if (!words.empty()) subjectivity_sum += subjective_hits / static_cast<double>(words.size());
  }
  const double n = static_cast<double>(account.tweets.size());
  return {polarity_sum / n, subjectivity_sum / n};
}

std::array<double, 12> account_features(const corpus::Account& account) {
  const corpus::AccountProfile& p = account.profile;
  if (p.created_at > account.collection_date) {
    throw DataError("account " + p.id + " created after collection date");
  }
  const double days =
      static_cast<double>(account.collection_date - p.created_at) / 86400.0;
  const double age_months = std::floor(days / kMeanMonthDays);
  return {static_cast<double>(p.statuses_count),
          static_cast<double>(p.followers_count),
          static_cast<double>(p.friends_count),
          static_cast<double>(p.favourites_total),
          age_months,
          blank(p.description) ? 1.0 : 0.0,
          blank(p.location) ? 1.0 : 0.0,
          blank(p.url) ? 1.0 : 0.0,
          p.default_profile ? 1.0 : 0.0,
          p.default_image ? 1.0 : 0.0,
          p.verified ? 1.0 : 0.0,
          p.geo_enabled ? 1.0 : 0.0};
}

FeatureVector assemble(const corpus::Account& account, std::span<const double> topic_dist,
                       std::array<double, 2> sent) {
  if (topic_dist.size() != 7) {
    throw DataError("topic distribution must have 7 entries, got " +
                    std::to_string(topic_dist.size()));
  }
  double topic_sum = 0.0;
  for (double t : topic_dist) topic_sum += t;
  if (std::abs(topic_sum - 1.0) > 1e-6) {
    throw DataError("topic distribution sums to " + format_double(topic_sum) + ", expected 1");
  }

  const std::array<double, 9> content = content_features(account);
  const std::array<double, 5> tweet = tweet_features(account);
  const std::array<double, 12> acct = account_features(account);

  FeatureVector v;
  std::size_t k = 0;
  for (double x : content) v[k++] = x;
  for (double x : tweet) v[k++] = x;
  v[k++] = sent[0];
  v[k++] = sent[1];
  for (double x : topic_dist) v[k++] = x;
  for (double x : acct) v[k++] = x;
  return v;
}

void write_features_csv(const std::string& path, std::span<const AccountFeatures> rows) {
  std::string out = "account_id";
  for (std::string_view name : kNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (const AccountFeatures& row : rows) {
    out += row.account_id;
    for (double v : row.vec.values) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace dhira::features
