#include "dhira/features.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "dhira/corpus.hpp"
#include "dhira/errors.hpp"
#include "dhira/rng.hpp"
#include "dhira/textio.hpp"
#include "dhira/timeutil.hpp"

using namespace dhira;
using corpus::Account;
using corpus::Tweet;
using corpus::TweetKind;

namespace {

Account shell(const std::string& id = "acct") {
  Account a;
  a.profile.id = id;
  a.profile.created_at = parse_iso8601("2016-11-01T00:00:00Z");
  a.collection_date = parse_iso8601("2017-11-01T00:00:00Z");
  return a;
}

Tweet tweet(const std::string& text, TweetKind kind = TweetKind::original) {
  static int serial = 0;
  Tweet t;
  t.id = "t" + std::to_string(serial++);
  t.text = text;
  t.kind = kind;
  t.created_at = parse_iso8601("2017-10-01T00:00:00Z") - serial;
  t.source_label = "Twitter Lite";
  if (kind == TweetKind::retweet) t.retweeted_author_id = "someone";
  corpus::extract_entities(t);
  return t;
}

const std::vector<double> kUniform7(7, 1.0 / 7.0);

}  // namespace

TEST_CASE("feature name table is the 35-name contract") {
  REQUIRE(features::feature_names().size() == features::kFeatureCount);
  CHECK(features::feature_names()[0] == "avg_word_len");
  CHECK(features::feature_names()[9] == "original_proportion");
  CHECK(features::feature_names()[14] == "polarity");
  CHECK(features::feature_names()[16] == "topic_1");
  CHECK(features::feature_names()[23] == "statuses_count");
  CHECK(features::feature_names()[34] == "geo_enabled");
  CHECK(features::feature_index("empty_URL") == 30);
  CHECK_THROWS_AS(features::feature_index("nope"), DataError);
}

TEST_CASE("content features: averages per tweet") {
  Account a = shell();
  a.tweets = {tweet("كلمة #tag1 #tag2"), tweet("كلمة #tag3")};
  const auto c = features::content_features(a);
  CHECK(c[5] == doctest::Approx(1.5));  // avg_hashtags
  CHECK(c[3] == 0.0);                   // avg_emojis

  Account b = shell();
  b.tweets = {tweet("ab cd")};
  const auto cb = features::content_features(b);
  CHECK(cb[0] == doctest::Approx(2.0));  // avg_word_len
  CHECK(cb[1] == doctest::Approx(5.0));  // avg_tweet_len in characters

  Account c2 = shell();
  c2.tweets = {tweet("جمييييل 😀 123 , @user https://t.co/x")};
  const auto cc = features::content_features(c2);
  CHECK(cc[2] == doctest::Approx(1.0));  // punctuation
  CHECK(cc[3] == doctest::Approx(1.0));  // emoji
  CHECK(cc[4] == doctest::Approx(1.0));  // numerics
  CHECK(cc[6] == doctest::Approx(1.0));  // mentions
  CHECK(cc[7] == doctest::Approx(1.0));  // links
  CHECK(cc[8] == doctest::Approx(1.0));  // elongations

  Account empty = shell();
  CHECK_THROWS_AS(features::content_features(empty), DataError);
}

TEST_CASE("tweet features: proportions and engagement sums") {
  Account a = shell();
  a.tweets = {tweet("a"), tweet("b"), tweet("c", TweetKind::reply),
              tweet("d", TweetKind::retweet)};
  const auto t = features::tweet_features(a);
  CHECK(t[0] == doctest::Approx(0.5));
  CHECK(t[1] == doctest::Approx(0.25));
  CHECK(t[2] == doctest::Approx(0.25));

  Account rt = shell();
  rt.tweets = {tweet("x", TweetKind::retweet), tweet("y", TweetKind::retweet)};
  rt.tweets[0].retweet_count = 100;  // accrues to the original author
  const auto trt = features::tweet_features(rt);
  CHECK(trt[2] == doctest::Approx(1.0));
  CHECK(trt[3] == 0.0);

  Account orig = shell();
  orig.tweets = {tweet("x"), tweet("y")};
  orig.tweets[0].retweet_count = 3;
  orig.tweets[1].retweet_count = 5;
  orig.tweets[0].favorite_count = 2;
  const auto to = features::tweet_features(orig);
  CHECK(to[3] == doctest::Approx(8.0));
  CHECK(to[4] == doctest::Approx(2.0));
}

TEST_CASE("proportions sum to one for random timelines") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    Account a = shell();
    const std::size_t n = 1 + rng.below(60);
    for (std::size_t i = 0; i < n; ++i) {
      const auto kind = static_cast<TweetKind>(rng.below(3));
      a.tweets.push_back(tweet("نص", kind));
    }
    const auto t = features::tweet_features(a);
    CHECK(std::abs(t[0] + t[1] + t[2] - 1.0) <= 1e-12);
  }
}

TEST_CASE("sentiment: matches, negation, empty lexicon") {
  const auto& lex = features::default_lexicon();

  Account none = shell();
  none.tweets = {tweet("كرسي طاولة")};  // no lexicon words
  const auto s0 = features::sentiment(none, lex);
  CHECK(s0[0] == 0.0);
  CHECK(s0[1] == 0.0);

  Account pos = shell();
  pos.tweets = {tweet("جميل")};
  const auto s1 = features::sentiment(pos, lex);
  CHECK(s1[0] == doctest::Approx(0.8));
  CHECK(s1[1] == doctest::Approx(1.0));

  Account neg = shell();
  neg.tweets = {tweet("ليس جميل")};
  const auto s2 = features::sentiment(neg, lex);
  CHECK(s2[0] == doctest::Approx(-0.8));

  features::SentimentLexicon empty;
  const auto s3 = features::sentiment(pos, empty);
  CHECK(s3[0] == 0.0);
  CHECK(s3[1] == 0.0);
}

TEST_CASE("account features: age, empties, flags") {
  Account a = shell();
  a.tweets = {tweet("x")};
  a.profile.statuses_count = 123;
  a.profile.followers_count = 45;
  a.profile.friends_count = 6;
  a.profile.favourites_total = 78;
  a.profile.verified = true;
  const auto f = features::account_features(a);
  CHECK(f[0] == 123.0);
  CHECK(f[1] == 45.0);
  CHECK(f[2] == 6.0);
  CHECK(f[3] == 78.0);
  CHECK(f[4] == 11.0);  // floor(365 / 30.44)
  CHECK(f[5] == 1.0);   // description absent
  CHECK(f[6] == 1.0);
  CHECK(f[7] == 1.0);
  CHECK(f[10] == 1.0);  // verified

  a.profile.description = "   ";
  CHECK(features::account_features(a)[5] == 1.0);  // blank counts as empty
  a.profile.description = "نبذة";
  CHECK(features::account_features(a)[5] == 0.0);

  a.profile.created_at = a.collection_date + 1;
  CHECK_THROWS_AS(features::account_features(a), DataError);
}

TEST_CASE("assemble: order, topic splice, validation") {
  Account a = shell();
  a.tweets = {tweet("كلمة")};
  const std::vector<double> topic = {1, 0, 0, 0, 0, 0, 0};
  const auto v = features::assemble(a, topic, {0.25, 0.5});
  CHECK(v.values.size() == 35);
  CHECK(v.at_name("topic_1") == 1.0);
  CHECK(v.at_name("topic_2") == 0.0);
  CHECK(v.at_name("polarity") == 0.25);
  CHECK(v.at_name("subjectivity") == 0.5);
  CHECK(v.at_name("original_proportion") == 1.0);

  const std::vector<double> bad_sum = {0.5, 0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(features::assemble(a, bad_sum, {0, 0}), DataError);
  const std::vector<double> short_dist = {1, 0, 0};
  CHECK_THROWS_AS(features::assemble(a, short_dist, {0, 0}), DataError);
}

TEST_CASE("feature extraction is invariant to tweet order on a full window") {
  corpus::SynthConfig config;
  config.seed = 17;
  config.n_bots = 2;
  config.n_humans = 2;
  config.tweets_per_account = 200;
  const auto accounts = corpus::generate_synthetic(config);
  Rng rng(3);
  for (const Account& original : accounts) {
    Account shuffled = original;
    rng.shuffle(shuffled.tweets);
    // Re-canonicalize through the ingestion sort.
    const auto round =
        corpus::ingest_accounts_text(corpus::to_jsonl_line(shuffled) + "\n");
    REQUIRE(round.accounts.size() == 1);
    const auto v1 = features::assemble(original, kUniform7,
                                       features::sentiment(original, features::default_lexicon()));
    const auto v2 =
        features::assemble(round.accounts[0], kUniform7,
                           features::sentiment(round.accounts[0], features::default_lexicon()));
    for (std::size_t i = 0; i < features::kFeatureCount; ++i) {
      CHECK(v1.values[i] == v2.values[i]);
    }
  }
}

TEST_CASE("every feature is finite on synthetic fuzz accounts") {
  corpus::SynthConfig config;
  config.seed = 23;
  config.n_bots = 30;
  config.n_humans = 70;
  config.tweets_per_account = 15;
  for (const Account& a : corpus::generate_synthetic(config)) {
    const auto v = features::assemble(
        a, kUniform7, features::sentiment(a, features::default_lexicon()));
    for (double x : v.values) {
      CHECK(std::isfinite(x));
    }
    CHECK(std::abs(v.at_name("original_proportion") + v.at_name("reply_proportion") +
                   v.at_name("retweet_proportion") - 1.0) <= 1e-12);
  }
}

TEST_CASE("lexicon file loading validates rows") {
  const std::string path = "test_lexicon.tsv";
  write_file(path, "# word\tpolarity\tsubjective\tnegator\nجميل\t0.9\t1\t0\nليس\t0\t0\t1\n");
  const auto lex = features::load_lexicon(path);
  CHECK(lex.polarity.contains("جميل"));
  CHECK(lex.negators.contains("ليس"));
  write_file(path, "جميل\t2.5\t1\t0\n");
  CHECK_THROWS_AS(features::load_lexicon(path), DataError);
  write_file(path, "جميل\t0.5\n");
  CHECK_THROWS_AS(features::load_lexicon(path), DataError);
}

TEST_CASE("features csv export carries the contract header") {
  Account a = shell("acct9");
  a.tweets = {tweet("كلمة")};
  const auto v =
      features::assemble(a, kUniform7, features::sentiment(a, features::default_lexicon()));
  const std::string path = "test_features.csv";
  features::write_features_csv(path, std::vector<features::AccountFeatures>{{"acct9", v}});
  const std::string content = read_file(path);
  CHECK(content.starts_with("account_id,avg_word_len,"));
  CHECK(content.find(",geo_enabled\n") != std::string::npos);
  CHECK(content.find("acct9,") != std::string::npos);
}
