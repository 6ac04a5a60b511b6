#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dhira::corpus {

enum class TweetKind { original, reply, retweet };

std::string to_string(TweetKind kind);
TweetKind tweet_kind_from_string(std::string_view s);

struct Tweet {
  std::string id;
  std::string text;
  TweetKind kind = TweetKind::original;
  std::int64_t created_at = 0;  // UTC epoch seconds
  std::string source_label;
  std::int64_t retweet_count = 0;
  std::int64_t favorite_count = 0;
  std::vector<std::string> mentioned_ids;
  std::optional<std::string> retweeted_author_id;  // present iff kind == retweet
  std::vector<std::string> hashtags;  // stored without the leading '#'
  std::vector<std::string> urls;

  bool operator==(const Tweet&) const = default;
};

struct AccountProfile {
  std::string id;
  std::int64_t statuses_count = 0;
  std::int64_t followers_count = 0;
  std::int64_t friends_count = 0;
  std::int64_t favourites_total = 0;
  std::int64_t created_at = 0;
  std::optional<std::string> description;
  std::optional<std::string> location;
  std::optional<std::string> url;
  bool default_profile = false;
  bool default_image = false;
  bool verified = false;
  bool geo_enabled = false;

  bool operator==(const AccountProfile&) const = default;
};

struct Account {
  AccountProfile profile;
  std::vector<Tweet> tweets;  // sorted newest-first
  std::int64_t collection_date = 0;
  std::optional<double> true_score;       // in [0,5]
  std::optional<double> botometer_score;  // in [0,5]
  std::optional<std::string> archetype;   // synthetic corpora only

  bool operator==(const Account&) const = default;
};

struct Stratum {
  double lower = 0.0;
  double upper = 0.0;  // half-open [lower, upper); the last stratum includes 5
  std::vector<std::string> members;
};

struct IngestIssue {
  std::size_t line = 0;  // 1-based; 0 when not line-scoped
  std::string message;
};

struct IngestResult {
  std::vector<Account> accounts;  // sorted by account id
  std::vector<IngestIssue> issues;
};

constexpr std::size_t kDefaultTweetWindow = 200;

// One account per line in the accounts.jsonl schema. Malformed or
// invariant-violating records are rejected and reported with line numbers;
// valid records are kept. Timelines are sorted newest-first and truncated to
// the max_tweets most recent tweets. Throws DataError only when the file
// itself is unreadable.
IngestResult ingest_accounts(const std::string& path,
                             std::size_t max_tweets = kDefaultTweetWindow);
IngestResult ingest_accounts_text(std::string_view jsonl,
                                  std::size_t max_tweets = kDefaultTweetWindow);

std::string to_jsonl_line(const Account& account);
void write_accounts_jsonl(const std::string& path, std::span<const Account> accounts);

// Rebuilds hashtags/urls/mentioned_ids from the tweet text (token classes).
void extract_entities(Tweet& tweet);

struct LabelReport {
  std::size_t applied = 0;
  std::vector<std::string> unmatched_ids;
  std::vector<IngestIssue> rejected_rows;
};

// labels.csv: header `account_id,true_score`. Scores outside [0,5] and
// duplicate ids are rejected row-by-row; rows whose id matches no account are
// reported as unmatched.
LabelReport attach_labels(std::vector<Account>& accounts, const std::string& labels_path);

// botometer.csv: header `account_id,botometer_score`, same validation.
LabelReport attach_botometer(std::vector<Account>& accounts, const std::string& path);

// Finite-population-corrected sample size: n = n0 / (1 + (n0-1)/N) with
// n0 = z^2 * 0.25 / margin^2, z the two-sided standard-normal quantile for
// the given confidence. Returns the ceiling.
std::int64_t required_sample_size(std::int64_t population, double confidence, double margin);

// Largest-remainder (Hamilton) apportionment of `total` across strata
// proportional to their sizes. Remainder ties go to the lower index.
std::vector<std::size_t> proportional_allocation(std::span<const std::size_t> stratum_sizes,
                                                 std::size_t total);

enum class ScoreField { true_score, botometer };

// Proportionate stratified random sampling. strata_edges must be a strictly
// ascending partition of [0,5]; selection within a stratum is uniform under
// the seed. Deterministic for fixed inputs and seed.
std::vector<Account> stratified_sample(std::span<const Account> accounts,
                                       std::span<const double> strata_edges, std::size_t total,
                                       std::uint64_t seed, ScoreField score_field);

// Stratum assignment helper shared with the sampler: index of the half-open
// interval containing `score` (the last stratum includes its upper edge).
std::size_t stratum_index(std::span<const double> strata_edges, double score);

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t n_bots = 0;
  std::size_t n_humans = 0;
  std::size_t tweets_per_account = kDefaultTweetWindow;
  // archetype name -> weight; empty means the built-in default mix.
  std::map<std::string, double> archetype_mix;
};

// Names accepted in SynthConfig::archetype_mix.
std::span<const std::string_view> bot_archetypes();
std::span<const std::string_view> human_archetypes();

// Seeded synthetic corpus. Bots get true scores in [3,5] and exhibit at
// least three rubric behaviors each (no replies, hashtag-heavy, fixed-minute
// posting, duplicated content, link-heavy, emoji-free, scramble filler);
// humans get true scores in [0,2] with replies, mixed topics and emoji use.
// Each account carries its archetype tag. Byte-identical under equal seeds.
std::vector<Account> generate_synthetic(const SynthConfig& config);

}  // namespace dhira::corpus
