#include "dhira/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <doctest.h>

#include "dhira/artext.hpp"
#include "dhira/errors.hpp"
#include "dhira/textio.hpp"
#include "dhira/timeutil.hpp"

using namespace dhira;
using corpus::Account;
using corpus::Tweet;
using corpus::TweetKind;

namespace {

Account make_account(const std::string& id, std::size_t n_tweets) {
  Account a;
  a.profile.id = id;
  a.profile.statuses_count = 1000;
  a.profile.followers_count = 50;
  a.profile.friends_count = 40;
  a.profile.favourites_total = 10;
  a.profile.created_at = parse_iso8601("2015-01-01T00:00:00Z");
  a.profile.description = "وصف قصير";
  a.collection_date = parse_iso8601("2017-11-15T00:00:00Z");
  for (std::size_t i = 0; i < n_tweets; ++i) {
    Tweet t;
    t.id = id + "_t" + std::to_string(i);
    t.text = "مرحبا بالعالم " + std::to_string(i);
    t.kind = TweetKind::original;
    t.created_at = a.collection_date - 3600 * static_cast<std::int64_t>(i + 1);
    t.source_label = "Twitter Lite";
    corpus::extract_entities(t);
    a.tweets.push_back(std::move(t));
  }
  return a;
}

double reply_proportion(const Account& a) {
  double replies = 0;
  for (const Tweet& t : a.tweets) {
    if (t.kind == TweetKind::reply) replies += 1;
  }
  return replies / static_cast<double>(a.tweets.size());
}

}  // namespace

TEST_CASE("iso8601 parsing and formatting") {
  CHECK(format_iso8601(parse_iso8601("2017-11-01T10:20:30Z")) == "2017-11-01T10:20:30Z");
  CHECK(parse_iso8601("2017-11-01") == parse_iso8601("2017-11-01T00:00:00Z"));
  CHECK(parse_iso8601("2017-11-01T02:00:00+02:00") == parse_iso8601("2017-11-01T00:00:00Z"));
  CHECK(parse_iso8601("2017-11-01T00:00:00.123Z") == parse_iso8601("2017-11-01T00:00:00Z"));
  CHECK_THROWS_AS(parse_iso8601("not a date"), DataError);
  CHECK_THROWS_AS(parse_iso8601("2017-13-01T00:00:00Z"), DataError);
  CHECK_THROWS_AS(parse_iso8601("2017-02-30T00:00:00Z"), DataError);
}

TEST_CASE("ingest truncates timelines to the window") {
  const Account a = make_account("acct1", 250);
  const auto result = corpus::ingest_accounts_text(corpus::to_jsonl_line(a) + "\n");
  REQUIRE(result.accounts.size() == 1);
  CHECK(result.issues.empty());
  CHECK(result.accounts[0].tweets.size() == 200);
  // Newest 200 kept, sorted newest-first.
  CHECK(result.accounts[0].tweets.front().created_at >
        result.accounts[0].tweets.back().created_at);
}

TEST_CASE("ingest rejects invariant violations and reports the field") {
  Account good = make_account("acct_ok", 3);
  std::string bad_line = corpus::to_jsonl_line(make_account("acct_bad", 1));
  const std::string needle = "\"followers_count\":50";
  const auto pos = bad_line.find(needle);
  REQUIRE(pos != std::string::npos);
  bad_line.replace(pos, needle.size(), "\"followers_count\":-1");

  const auto result =
      corpus::ingest_accounts_text(corpus::to_jsonl_line(good) + "\n" + bad_line + "\n");
  CHECK(result.accounts.size() == 1);
  REQUIRE(result.issues.size() == 1);
  CHECK(result.issues[0].line == 2);
  CHECK(result.issues[0].message.find("followers_count") != std::string::npos);
}

TEST_CASE("ingest of an empty file is empty with zero errors") {
  const auto result = corpus::ingest_accounts_text("");
  CHECK(result.accounts.empty());
  CHECK(result.issues.empty());
}

TEST_CASE("ingest rejects malformed JSON and score violations but keeps going") {
  Account a = make_account("acct1", 1);
  a.true_score = 4.5;
  std::string with_bad_score = corpus::to_jsonl_line(a);
  const auto pos = with_bad_score.find("\"true_score\":4.5");
  REQUIRE(pos != std::string::npos);
  with_bad_score.replace(pos, 16, "\"true_score\":7.0");

  const std::string text = "{ not json\n" + with_bad_score + "\n" +
                           corpus::to_jsonl_line(make_account("acct2", 1)) + "\n";
  const auto result = corpus::ingest_accounts_text(text);
  CHECK(result.accounts.size() == 1);
  CHECK(result.accounts[0].profile.id == "acct2");
  REQUIRE(result.issues.size() == 2);
  CHECK(result.issues[0].line == 1);
  CHECK(result.issues[1].line == 2);
  CHECK(result.issues[1].message.find("true_score") != std::string::npos);
}

TEST_CASE("retweet kind and retweeted_author_id imply each other") {
  Account a = make_account("acct1", 1);
  a.tweets[0].kind = TweetKind::retweet;  // no retweeted_author_id set
  const auto result = corpus::ingest_accounts_text(corpus::to_jsonl_line(a) + "\n");
  CHECK(result.accounts.empty());
  REQUIRE(result.issues.size() == 1);
  CHECK(result.issues[0].message.find("retweeted_author_id") != std::string::npos);
}

TEST_CASE("entity lists are extracted from text when absent") {
  std::string line = corpus::to_jsonl_line(make_account("acct1", 0));
  const std::string tweets_needle = "\"tweets\":[]";
  const auto pos = line.find(tweets_needle);
  REQUIRE(pos != std::string::npos);
  line.replace(pos, tweets_needle.size(),
               "\"tweets\":[{\"id\":\"t1\",\"text\":\"مرحبا @user #وسم https://t.co/x\","
               "\"kind\":\"original\",\"created_at\":\"2017-11-01T00:00:00Z\","
               "\"source_label\":\"Twitter Lite\",\"retweet_count\":0,\"favorite_count\":0}]");
  const auto result = corpus::ingest_accounts_text(line + "\n");
  REQUIRE(result.accounts.size() == 1);
  const Tweet& t = result.accounts[0].tweets[0];
  CHECK(t.hashtags == std::vector<std::string>{"وسم"});
  CHECK(t.urls == std::vector<std::string>{"https://t.co/x"});
  CHECK(t.mentioned_ids == std::vector<std::string>{"user"});
}

TEST_CASE("ingest-serialize-ingest is a fixed point") {
  corpus::SynthConfig config;
  config.seed = 77;
  config.n_bots = 6;
  config.n_humans = 10;
  config.tweets_per_account = 25;
  const std::vector<Account> accounts = corpus::generate_synthetic(config);

  std::string jsonl;
  for (const Account& a : accounts) jsonl += corpus::to_jsonl_line(a) + "\n";
  const auto once = corpus::ingest_accounts_text(jsonl);
  REQUIRE(once.issues.empty());
  REQUIRE(once.accounts.size() == accounts.size());

  std::string again;
  for (const Account& a : once.accounts) again += corpus::to_jsonl_line(a) + "\n";
  const auto twice = corpus::ingest_accounts_text(again);
  CHECK(twice.accounts == once.accounts);
}

TEST_CASE("attach_labels applies, reports unmatched, rejects bad rows") {
  std::vector<Account> accounts = {make_account("acct1", 1), make_account("acct2", 1)};
  const std::string path = "test_labels.csv";
  write_file(path,
             "account_id,true_score\n"
             "acct1,4.0\n"
             "acctX,2.0\n"
             "acct2,7.0\n"
             "acct1,1.0\n");
  const auto report = corpus::attach_labels(accounts, path);
  CHECK(report.applied == 1);
  REQUIRE(accounts[0].true_score.has_value());
  CHECK(*accounts[0].true_score == 4.0);
  CHECK(!accounts[1].true_score.has_value());
  CHECK(report.unmatched_ids == std::vector<std::string>{"acctX"});
  REQUIRE(report.rejected_rows.size() == 2);
  CHECK(report.rejected_rows[0].message.find("[0,5]") != std::string::npos);
  CHECK(report.rejected_rows[1].message.find("duplicate") != std::string::npos);

  CHECK_THROWS_AS(corpus::attach_labels(accounts, "missing_file.csv"), DataError);
  write_file(path, "wrong,header\n");
  CHECK_THROWS_AS(corpus::attach_labels(accounts, path), DataError);
}

TEST_CASE("required_sample_size reproduces the pinned values") {
  CHECK(corpus::required_sample_size(1750, 0.95, 0.04) == 448);
  CHECK(corpus::required_sample_size(1000000000, 0.95, 0.04) == 601);
  CHECK(corpus::required_sample_size(100, 0.95, 0.5) == 4);
}

TEST_CASE("required_sample_size monotonicity") {
  std::int64_t prev = 0;
  for (std::int64_t population : {50, 100, 450, 1750, 10000, 1000000}) {
    const std::int64_t n = corpus::required_sample_size(population, 0.95, 0.04);
    CHECK(n >= prev);
    prev = n;
  }
  std::int64_t prev_margin = 1000000;
  for (double margin : {0.01, 0.02, 0.04, 0.1, 0.25}) {
    const std::int64_t n = corpus::required_sample_size(1750, 0.95, margin);
    CHECK(n <= prev_margin);
    prev_margin = n;
  }
}

TEST_CASE("largest-remainder allocation reproduces the paper stratum counts") {
  const std::vector<std::size_t> sizes = {929, 371, 183, 124, 143};
  const auto counts = corpus::proportional_allocation(sizes, 450);
  CHECK(counts == std::vector<std::size_t>{239, 95, 47, 32, 37});

  // Counts sum exactly and differ from exact proportionality by < 1.
  std::size_t total = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    total += counts[i];
    const double exact = 450.0 * static_cast<double>(sizes[i]) / 1750.0;
    CHECK(std::abs(static_cast<double>(counts[i]) - exact) < 1.0);
  }
  CHECK(total == 450);
}

TEST_CASE("stratified_sample draws proportionally and deterministically") {
  const std::vector<std::size_t> sizes = {929, 371, 183, 124, 143};
  std::vector<Account> accounts;
  std::size_t serial = 0;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    for (std::size_t i = 0; i < sizes[s]; ++i) {
      Account a = make_account("a" + std::to_string(serial++), 0);
      a.true_score = static_cast<double>(s) + 0.5;
      accounts.push_back(std::move(a));
    }
  }
  const std::vector<double> edges = {0, 1, 2, 3, 4, 5};
  const auto sample =
      corpus::stratified_sample(accounts, edges, 450, 99, corpus::ScoreField::true_score);
  REQUIRE(sample.size() == 450);
  std::vector<std::size_t> per_stratum(5, 0);
  for (const Account& a : sample) {
    ++per_stratum[corpus::stratum_index(edges, *a.true_score)];
  }
  CHECK(per_stratum == std::vector<std::size_t>{239, 95, 47, 32, 37});

  const auto sample2 =
      corpus::stratified_sample(accounts, edges, 450, 99, corpus::ScoreField::true_score);
  CHECK(sample == sample2);

  // No duplicates within the draw.
  std::set<std::string> ids;
  for (const Account& a : sample) ids.insert(a.profile.id);
  CHECK(ids.size() == sample.size());

  CHECK_THROWS_AS(
      corpus::stratified_sample(accounts, edges, accounts.size() + 1, 1,
                                corpus::ScoreField::true_score),
      DataError);
}

TEST_CASE("stratified_sample: one stratum takes everything requested") {
  std::vector<Account> accounts;
  for (int i = 0; i < 30; ++i) {
    Account a = make_account("a" + std::to_string(i), 0);
    a.true_score = 0.5;
    accounts.push_back(std::move(a));
  }
  const std::vector<double> edges = {0, 5};
  const auto sample =
      corpus::stratified_sample(accounts, edges, 10, 7, corpus::ScoreField::true_score);
  CHECK(sample.size() == 10);
}

TEST_CASE("stratum_index covers the closed top edge") {
  const std::vector<double> edges = {0, 1, 2, 3, 4, 5};
  CHECK(corpus::stratum_index(edges, 0.0) == 0);
  CHECK(corpus::stratum_index(edges, 0.999) == 0);
  CHECK(corpus::stratum_index(edges, 1.0) == 1);
  CHECK(corpus::stratum_index(edges, 5.0) == 4);
}

TEST_CASE("synthetic corpora: counts, scores, archetype tags") {
  corpus::SynthConfig config;
  config.seed = 7;
  config.n_bots = 50;
  config.n_humans = 250;
  config.tweets_per_account = 20;
  const auto accounts = corpus::generate_synthetic(config);
  REQUIRE(accounts.size() == 300);
  std::size_t bots = 0;
  for (const Account& a : accounts) {
    REQUIRE(a.true_score.has_value());
    REQUIRE(a.archetype.has_value());
    if (a.archetype->starts_with("bot/")) {
      ++bots;
      CHECK(*a.true_score >= 3.0);
      CHECK(*a.true_score <= 5.0);
      CHECK(reply_proportion(a) == 0.0);
    } else {
      CHECK(*a.true_score >= 0.0);
      CHECK(*a.true_score <= 2.0);
      CHECK(reply_proportion(a) >= 0.2);
    }
  }
  CHECK(bots == 50);
}

TEST_CASE("synthetic corpora are byte-identical under equal seeds") {
  corpus::SynthConfig config;
  config.seed = 7;
  config.n_bots = 5;
  config.n_humans = 5;
  config.tweets_per_account = 30;
  const auto a = corpus::generate_synthetic(config);
  const auto b = corpus::generate_synthetic(config);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(corpus::to_jsonl_line(a[i]) == corpus::to_jsonl_line(b[i]));
  }
  config.seed = 8;
  const auto c = corpus::generate_synthetic(config);
  CHECK(corpus::to_jsonl_line(a[0]) != corpus::to_jsonl_line(c[0]));
}

TEST_CASE("bot archetypes exhibit their rubric behaviors") {
  corpus::SynthConfig config;
  config.seed = 31;
  config.n_bots = 8;
  config.n_humans = 0;
  config.tweets_per_account = 40;

  config.archetype_mix = {{"hashtag_spammer", 1.0}};
  for (const Account& a : corpus::generate_synthetic(config)) {
    CHECK(*a.archetype == "bot/hashtag_spammer");
    CHECK(reply_proportion(a) == 0.0);
    std::size_t with_hashtag = 0;
    std::set<std::int64_t> minutes;
    for (const Tweet& t : a.tweets) {
      if (!t.hashtags.empty() || t.kind == TweetKind::retweet) ++with_hashtag;
      minutes.insert((t.created_at / 60) % 60);
      CHECK(t.created_at % 60 == 0);
    }
    CHECK(with_hashtag == a.tweets.size());
    CHECK(minutes.size() == 1);  // clockwork posting
  }

  config.archetype_mix = {{"url_promoter", 1.0}};
  for (const Account& a : corpus::generate_synthetic(config)) {
    std::size_t with_url = 0;
    for (const Tweet& t : a.tweets) with_url += t.urls.empty() ? 0 : 1;
    CHECK(static_cast<double>(with_url) > 0.5 * static_cast<double>(a.tweets.size()));
  }

  // Duplicated content across distinct promoter accounts.
  config.n_bots = 10;
  const auto promoters = corpus::generate_synthetic(config);
  std::set<std::string> texts;
  std::size_t total_originals = 0;
  for (const Account& a : promoters) {
    for (const Tweet& t : a.tweets) {
      if (t.kind == TweetKind::original) {
        texts.insert(t.text);
        ++total_originals;
      }
    }
  }
  CHECK(texts.size() < total_originals / 2);

  config.archetype_mix = {{"scramble_filler", 1.0}};
  config.n_bots = 4;
  for (const Account& a : corpus::generate_synthetic(config)) {
    std::size_t numeric_tokens = 0;
    for (const Tweet& t : a.tweets) {
      for (const artext::Token& tok : artext::tokenize(t.text)) {
        if (tok.cls == artext::TokenClass::numeric) ++numeric_tokens;
      }
    }
    CHECK(numeric_tokens > a.tweets.size());  // scramble filler is digit-heavy
  }
}

TEST_CASE("humans use emoji and varied topics") {
  corpus::SynthConfig config;
  config.seed = 5;
  config.n_bots = 0;
  config.n_humans = 20;
  config.tweets_per_account = 50;
  std::size_t with_emoji = 0;
  for (const Account& a : corpus::generate_synthetic(config)) {
    std::size_t emoji = 0;
    for (const Tweet& t : a.tweets) {
      for (const artext::Token& tok : artext::tokenize(t.text)) {
        if (tok.cls == artext::TokenClass::emoji) ++emoji;
      }
    }
    if (emoji > 0) ++with_emoji;
  }
  CHECK(with_emoji == 20);
}

TEST_CASE("synth config validation") {
  corpus::SynthConfig config;
  config.seed = 1;
  config.n_bots = 1;
  config.tweets_per_account = 0;
  CHECK_THROWS_AS(corpus::generate_synthetic(config), DataError);
  config.tweets_per_account = 5;
  config.archetype_mix = {{"hashtag_spammer", -1.0}};
  CHECK_THROWS_AS(corpus::generate_synthetic(config), DataError);
  config.archetype_mix = {{"hashtag_spammer", 0.0}};
  CHECK_THROWS_AS(corpus::generate_synthetic(config), DataError);
}
