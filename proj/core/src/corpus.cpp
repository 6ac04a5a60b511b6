#include "dhira/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dhira/artext.hpp"
#include "dhira/errors.hpp"
#include "dhira/rng.hpp"
#include "dhira/stats.hpp"
#include "dhira/textio.hpp"
#include "dhira/timeutil.hpp"

namespace dhira::corpus {

using json = nlohmann::ordered_json;

std::string to_string(TweetKind kind) {
  switch (kind) {
    case TweetKind::original: return "original";
    case TweetKind::reply: return "reply";
    case TweetKind::retweet: return "retweet";
  }
  return "original";
}

TweetKind tweet_kind_from_string(std::string_view s) {
  if (s == "original") return TweetKind::original;
  if (s == "reply") return TweetKind::reply;
  if (s == "retweet") return TweetKind::retweet;
  throw DataError("unknown tweet kind: '" + std::string(s) + "'");
}

namespace {

std::int64_t require_count(const json& obj, const char* field) {
  if (!obj.contains(field)) throw DataError(std::string("missing field: ") + field);
  const json& v = obj.at(field);
  if (!v.is_number_integer()) throw DataError(std::string("field is not an integer: ") + field);
  const std::int64_t n = v.get<std::int64_t>();
  if (n < 0) throw DataError(std::string("negative count: ") + field);
  return n;
}

std::string require_string(const json& obj, const char* field) {
  if (!obj.contains(field) || !obj.at(field).is_string()) {
    throw DataError(std::string("missing or non-string field: ") + field);
  }
  return obj.at(field).get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* field) {
  if (!obj.contains(field) || obj.at(field).is_null()) return std::nullopt;
  if (!obj.at(field).is_string()) {
    throw DataError(std::string("field is not a string: ") + field);
  }
  return obj.at(field).get<std::string>();
}

bool require_bool(const json& obj, const char* field) {
  if (!obj.contains(field) || !obj.at(field).is_boolean()) {
    throw DataError(std::string("missing or non-boolean field: ") + field);
  }
  return obj.at(field).get<bool>();
}

std::optional<double> optional_score(const json& obj, const char* field) {
  if (!obj.contains(field) || obj.at(field).is_null()) return std::nullopt;
  if (!obj.at(field).is_number()) throw DataError(std::string("field is not a number: ") + field);
  const double s = obj.at(field).get<double>();
  if (s < 0.0 || s > 5.0) throw DataError(std::string("score outside [0,5]: ") + field);
  return s;
}

std::vector<std::string> string_list(const json& obj, const char* field) {
  std::vector<std::string> out;
  for (const json& v : obj.at(field)) {
    if (!v.is_string()) throw DataError(std::string("list element is not a string: ") + field);
    out.push_back(v.get<std::string>());
  }
  return out;
}

Tweet parse_tweet(const json& obj) {
  Tweet t;
  t.id = require_string(obj, "id");
  t.text = require_string(obj, "text");
  t.kind = tweet_kind_from_string(require_string(obj, "kind"));
  t.created_at = parse_iso8601(require_string(obj, "created_at"));
  t.source_label = require_string(obj, "source_label");
  t.retweet_count = require_count(obj, "retweet_count");
  t.favorite_count = require_count(obj, "favorite_count");
  t.retweeted_author_id = optional_string(obj, "retweeted_author_id");
  if ((t.kind == TweetKind::retweet) != t.retweeted_author_id.has_value()) {
    throw DataError("retweeted_author_id present iff kind=retweet (tweet " + t.id + ")");
  }

  // Explicit entity lists take precedence; otherwise extract from the text.
  const bool need_hashtags = !obj.contains("hashtags");
  const bool need_urls = !obj.contains("urls");
  const bool need_mentions = !obj.contains("mentioned_ids");
  if (!need_hashtags) t.hashtags = string_list(obj, "hashtags");
  if (!need_urls) t.urls = string_list(obj, "urls");
  if (!need_mentions) t.mentioned_ids = string_list(obj, "mentioned_ids");
  if (need_hashtags || need_urls || need_mentions) {
    for (const artext::Token& tok : artext::tokenize(t.text)) {
      if (need_hashtags && tok.cls == artext::TokenClass::hashtag) {
        t.hashtags.push_back(tok.surface.substr(1));
      } else if (need_urls && tok.cls == artext::TokenClass::url) {
        t.urls.push_back(tok.surface);
      } else if (need_mentions && tok.cls == artext::TokenClass::mention) {
        t.mentioned_ids.push_back(tok.surface.substr(1));
      }
    }
  }
  return t;
}

Account parse_account(const json& obj, std::size_t max_tweets) {
  if (!obj.contains("profile") || !obj.at("profile").is_object()) {
    throw DataError("missing field: profile");
  }
  const json& p = obj.at("profile");
  Account a;
  a.profile.id = require_string(p, "id");
  a.profile.statuses_count = require_count(p, "statuses_count");
  a.profile.followers_count = require_count(p, "followers_count");
  a.profile.friends_count = require_count(p, "friends_count");
  a.profile.favourites_total = require_count(p, "favourites_total");
  a.profile.created_at = parse_iso8601(require_string(p, "created_at"));
  a.profile.description = optional_string(p, "description");
  a.profile.location = optional_string(p, "location");
  a.profile.url = optional_string(p, "url");
  a.profile.default_profile = require_bool(p, "default_profile");
  a.profile.default_image = require_bool(p, "default_image");
  a.profile.verified = require_bool(p, "verified");
  a.profile.geo_enabled = require_bool(p, "geo_enabled");

  a.collection_date = parse_iso8601(require_string(obj, "collection_date"));
  if (a.profile.created_at > a.collection_date) {
    throw DataError("created_at after collection_date (account " + a.profile.id + ")");
  }
  a.true_score = optional_score(obj, "true_score");
  a.botometer_score = optional_score(obj, "botometer_score");
  a.archetype = optional_string(obj, "archetype");

  if (!obj.contains("tweets") || !obj.at("tweets").is_array()) {
    throw DataError("missing field: tweets");
  }
  for (const json& tj : obj.at("tweets")) a.tweets.push_back(parse_tweet(tj));

  // Newest first, tie-broken by id for a canonical order, then windowed.
  std::stable_sort(a.tweets.begin(), a.tweets.end(), [](const Tweet& x, const Tweet& y) {
    if (x.created_at != y.created_at) return x.created_at > y.created_at;
    return x.id < y.id;
  });
  if (a.tweets.size() > max_tweets) a.tweets.resize(max_tweets);
  return a;
}

json tweet_to_json(const Tweet& t) {
  json obj;
  obj["id"] = t.id;
  obj["text"] = t.text;
  obj["kind"] = to_string(t.kind);
  obj["created_at"] = format_iso8601(t.created_at);
  obj["source_label"] = t.source_label;
  obj["retweet_count"] = t.retweet_count;
  obj["favorite_count"] = t.favorite_count;
  obj["mentioned_ids"] = t.mentioned_ids;
  if (t.retweeted_author_id) obj["retweeted_author_id"] = *t.retweeted_author_id;
  obj["hashtags"] = t.hashtags;
  obj["urls"] = t.urls;
  return obj;
}

}  // namespace

IngestResult ingest_accounts_text(std::string_view jsonl, std::size_t max_tweets) {
  IngestResult result;
  std::set<std::string> seen_ids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= jsonl.size()) {
    std::size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = trim(jsonl.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) {
      if (start > jsonl.size()) break;
      continue;
    }
    const json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
      result.issues.push_back({line_no, "invalid JSON"});
      continue;
    }
    try {
      Account account = parse_account(obj, max_tweets);
      if (!seen_ids.insert(account.profile.id).second) {
        result.issues.push_back({line_no, "duplicate account id: " + account.profile.id});
        continue;
      }
      result.accounts.push_back(std::move(account));
    } catch (const Error& e) {
      result.issues.push_back({line_no, e.what()});
    }
  }
  std::sort(result.accounts.begin(), result.accounts.end(),
            [](const Account& x, const Account& y) { return x.profile.id < y.profile.id; });
  return result;
}

IngestResult ingest_accounts(const std::string& path, std::size_t max_tweets) {
  return ingest_accounts_text(read_file(path), max_tweets);
}

void extract_entities(Tweet& tweet) {
  tweet.hashtags.clear();
  tweet.urls.clear();
  tweet.mentioned_ids.clear();
  for (const artext::Token& tok : artext::tokenize(tweet.text)) {
    switch (tok.cls) {
      case artext::TokenClass::hashtag: tweet.hashtags.push_back(tok.surface.substr(1)); break;
      case artext::TokenClass::url: tweet.urls.push_back(tok.surface); break;
      case artext::TokenClass::mention: tweet.mentioned_ids.push_back(tok.surface.substr(1)); break;
      default: break;
    }
  }
}

std::string to_jsonl_line(const Account& a) {
  json obj;
  json profile;
  profile["id"] = a.profile.id;
  profile["statuses_count"] = a.profile.statuses_count;
  profile["followers_count"] = a.profile.followers_count;
  profile["friends_count"] = a.profile.friends_count;
  profile["favourites_total"] = a.profile.favourites_total;
  profile["created_at"] = format_iso8601(a.profile.created_at);
  if (a.profile.description) profile["description"] = *a.profile.description;
  if (a.profile.location) profile["location"] = *a.profile.location;
  if (a.profile.url) profile["url"] = *a.profile.url;
  profile["default_profile"] = a.profile.default_profile;
  profile["default_image"] = a.profile.default_image;
  profile["verified"] = a.profile.verified;
  profile["geo_enabled"] = a.profile.geo_enabled;
  obj["profile"] = std::move(profile);
  obj["collection_date"] = format_iso8601(a.collection_date);
  if (a.true_score) obj["true_score"] = *a.true_score;
  if (a.botometer_score) obj["botometer_score"] = *a.botometer_score;
  if (a.archetype) obj["archetype"] = *a.archetype;
  json tweets = json::array();
  for (const Tweet& t : a.tweets) tweets.push_back(tweet_to_json(t));
  obj["tweets"] = std::move(tweets);
  return obj.dump();
}

void write_accounts_jsonl(const std::string& path, std::span<const Account> accounts) {
  std::string out;
  for (const Account& a : accounts) {
    out += to_jsonl_line(a);
    out += '\n';
  }
  write_file(path, out);
}

namespace {

LabelReport attach_scores(std::vector<Account>& accounts, const std::string& path,
                          const char* expected_header, ScoreField field) {
  const std::string content = read_file(path);
  LabelReport report;
  std::vector<std::string> lines = split(content, '\n');
  if (lines.empty() || std::string(trim(lines.front())) != expected_header) {
    throw DataError("expected header '" + std::string(expected_header) + "' in " + path);
  }
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    const std::size_t line_no = i + 1;
    const std::vector<std::string> cols = split_csv_line(line);
    if (cols.size() != 2) {
      report.rejected_rows.push_back({line_no, "expected 2 columns"});
      continue;
    }
    double score = 0.0;
    try {
      std::size_t used = 0;
      score = std::stod(cols[1], &used);
      if (used != cols[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      report.rejected_rows.push_back({line_no, "unparseable score: '" + cols[1] + "'"});
      continue;
    }
    if (score < 0.0 || score > 5.0) {
      report.rejected_rows.push_back({line_no, "score outside [0,5]: " + cols[1]});
      continue;
    }
    if (!seen.insert(cols[0]).second) {
      report.rejected_rows.push_back({line_no, "duplicate account_id: " + cols[0]});
      continue;
    }
    auto it = std::find_if(accounts.begin(), accounts.end(),
                           [&](const Account& a) { return a.profile.id == cols[0]; });
    if (it == accounts.end()) {
      report.unmatched_ids.push_back(cols[0]);
      continue;
    }
    if (field == ScoreField::true_score) {
      it->true_score = score;
    } else {
      it->botometer_score = score;
    }
    ++report.applied;
  }
  return report;
}

}  // namespace

LabelReport attach_labels(std::vector<Account>& accounts, const std::string& labels_path) {
  return attach_scores(accounts, labels_path, "account_id,true_score", ScoreField::true_score);
}

LabelReport attach_botometer(std::vector<Account>& accounts, const std::string& path) {
  return attach_scores(accounts, path, "account_id,botometer_score", ScoreField::botometer);
}

std::int64_t required_sample_size(std::int64_t population, double confidence, double margin) {
  if (population < 1) throw DataError("population must be positive");
  if (!(confidence > 0.0 && confidence < 1.0)) throw DataError("confidence must be in (0,1)");
  if (!(margin > 0.0 && margin < 1.0)) throw DataError("margin must be in (0,1)");
  const double z = stats::probit(0.5 + confidence / 2.0);
  const double n0 = z * z * 0.25 / (margin * margin);
  const double n = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(population));
  return static_cast<std::int64_t>(std::ceil(n));
}

std::vector<std::size_t> proportional_allocation(std::span<const std::size_t> stratum_sizes,
                                                 std::size_t total) {
  const std::size_t k = stratum_sizes.size();
  std::size_t population = 0;
  for (std::size_t s : stratum_sizes) population += s;
  if (population == 0) throw DataError("empty population");
  if (total > population) throw DataError("requested sample larger than population");

  // Exact integer quotas: floor(size*total/N) plus largest remainders.
  std::vector<std::size_t> counts(k, 0);
  std::vector<std::pair<std::uint64_t, std::size_t>> remainders;  // (remainder, index)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t numer =
        static_cast<std::uint64_t>(stratum_sizes[i]) * static_cast<std::uint64_t>(total);
    counts[i] = static_cast<std::size_t>(numer / population);
    assigned += counts[i];
    remainders.emplace_back(numer % population, i);
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  for (std::size_t j = 0; assigned < total; ++j, ++assigned) {
    counts[remainders[j].second] += 1;
  }
  return counts;
}

std::size_t stratum_index(std::span<const double> strata_edges, double score) {
  for (std::size_t i = 0; i + 1 < strata_edges.size(); ++i) {
    const bool last = i + 2 == strata_edges.size();
    if (score >= strata_edges[i] && (score < strata_edges[i + 1] || (last && score <= strata_edges[i + 1]))) {
      return i;
    }
  }
  throw DataError("score outside strata: " + format_double(score));
}

std::vector<Account> stratified_sample(std::span<const Account> accounts,
                                       std::span<const double> strata_edges, std::size_t total,
                                       std::uint64_t seed, ScoreField score_field) {
  if (strata_edges.size() < 2 || strata_edges.front() != 0.0 || strata_edges.back() != 5.0) {
    throw DataError("strata_edges must partition [0,5]");
  }
  for (std::size_t i = 0; i + 1 < strata_edges.size(); ++i) {
    if (!(strata_edges[i] < strata_edges[i + 1])) {
      throw DataError("strata_edges must be strictly ascending");
    }
  }

  const std::size_t n_strata = strata_edges.size() - 1;
  std::vector<std::vector<std::size_t>> members(n_strata);

  // Canonical order within strata: sort by account id so the draw depends
  // only on the account set, not on caller ordering.
  std::vector<std::size_t> order(accounts.size());
  for (std::size_t i = 0; i < accounts.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return accounts[x].profile.id < accounts[y].profile.id;
  });
  for (std::size_t idx : order) {
    const Account& a = accounts[idx];
    const std::optional<double>& score =
        score_field == ScoreField::true_score ? a.true_score : a.botometer_score;
    if (!score) {
      throw DataError("account " + a.profile.id + " lacks the requested score");
    }
    members[stratum_index(strata_edges, *score)].push_back(idx);
  }

  std::vector<std::size_t> sizes(n_strata);
  for (std::size_t i = 0; i < n_strata; ++i) sizes[i] = members[i].size();
  const std::vector<std::size_t> counts = proportional_allocation(sizes, total);

  std::vector<Account> sample;
  sample.reserve(total);
  for (std::size_t s = 0; s < n_strata; ++s) {
    if (counts[s] == 0) continue;
    Rng rng(derive_seed(seed, s));
    for (std::size_t pick : rng.sample_without_replacement(members[s].size(), counts[s])) {
      sample.push_back(accounts[members[s][pick]]);
    }
  }
  std::sort(sample.begin(), sample.end(),
            [](const Account& x, const Account& y) { return x.profile.id < y.profile.id; });
  return sample;
}

}  // namespace dhira::corpus
