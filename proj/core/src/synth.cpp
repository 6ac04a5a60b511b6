#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

#include "dhira/corpus.hpp"
#include "dhira/errors.hpp"
#include "dhira/rng.hpp"
#include "dhira/timeutil.hpp"

namespace dhira::corpus {

namespace {

// Topic word groups. Every entry is >=3 Arabic letters after normalization
// and absent from the default stopword list, so the topic pipeline keeps it.
constexpr std::string_view kSports[] = {
    "الهلال", "النصر", "الاتحاد", "الاهلي", "مباراة", "هدف", "دوري", "كرة", "لاعب",
    "مدرب", "ملعب", "بطولة", "جمهور", "حارس", "تسجيل", "مهاجم", "تمريرة", "خطة"};
constexpr std::string_view kVideos[] = {
    "فيديو", "مقطع", "قناة", "مشاهدة", "جديد", "حلقة", "برنامج", "لقطة", "مترجم",
    "ترفيه", "مضحك", "مشهور", "منشور", "متابعة", "اعجبني", "تسجيلة"};
constexpr std::string_view kHouthi[] = {
    "الحوثي", "اليمن", "قطر", "الامارات", "الشرعية", "التحالف", "صنعاء", "عدن",
    "مليشيا", "صاروخ", "جبهة", "معركة", "حدود", "عاصفة", "قوات", "تحرير"};
constexpr std::string_view kBooks[] = {
    "كتاب", "تصميم", "قراءة", "رواية", "مكتبة", "معرض", "طباعة", "غلاف", "مؤلف",
    "نشر", "ثقافة", "ادب", "قصيدة", "شعر", "حكمة", "اقتباس"};
constexpr std::string_view kSupplication[] = {
    "سبحان", "اللهم", "الحمد", "استغفر", "العظيم", "وبحمده", "صلوا", "وسلم",
    "النبي", "محمد", "الجنة", "دعاء", "اجر", "ذكر", "تسبيح", "رحمة", "مغفرة", "بركة"};
constexpr std::string_view kJerusalem[] = {
    "القدس", "فلسطين", "اسرائيل", "اليهود", "الاحتلال", "المسجد", "الاقصى",
    "مقاومة", "غزة", "الضفة", "قضية", "تطبيع", "عدوان", "حصار"};
constexpr std::string_view kDaily[] = {
    "قهوة", "صباح", "مساء", "عمل", "دوام", "طريق", "مطر", "عائلة", "اصدقاء",
    "طعام", "مطعم", "سفر", "اجازة", "صورة", "حياة", "ناس", "يوم", "مدينة"};

struct Group {
  std::span<const std::string_view> words;
};
constexpr std::array<Group, 7> kGroups = {{{kSports},
                                            {kVideos},
                                            {kHouthi},
                                            {kBooks},
                                            {kSupplication},
                                            {kJerusalem},
                                            {kDaily}}};
constexpr std::size_t kSupplicationGroup = 4;

constexpr std::string_view kEmojis[] = {"😀", "😂", "❤️", "🔥", "👍", "🙏", "😭", "🎉", "😍", "🤣"};
constexpr std::string_view kHumanPunct[] = {"!", "؟", ".", "!!", "؟!"};
constexpr std::string_view kOfficialSources[] = {
    "Twitter Web Client", "Twitter Lite", "Twitter for IPhone", "Twitter for Android",
    "Twitter for Windows"};
constexpr std::string_view kIslamicSources[] = {"تطبيق الأذكار", "أدعية المسلم", "آيات قرآنية"};
constexpr std::string_view kThirdPartySources[] = {"IFTTT", "Alameednews.com", "AutoPost Pro",
                                                   "Tweetbot", "Instagram", "Facebook"};
constexpr std::string_view kLocations[] = {"الرياض", "جدة", "مكة", "الدمام", "القاهرة", "عمان"};

constexpr std::string_view kBotArchetypes[] = {"hashtag_spammer", "url_promoter",
                                               "scramble_filler", "supplication_clock",
                                               "retweet_amplifier"};
constexpr double kBotWeights[] = {0.25, 0.25, 0.20, 0.20, 0.10};
constexpr std::string_view kHumanArchetypes[] = {"conversationalist", "casual", "app_supplicant"};
constexpr double kHumanWeights[] = {0.45, 0.45, 0.10};

const std::vector<std::string_view> kBotArchetypeVec(std::begin(kBotArchetypes),
                                                     std::end(kBotArchetypes));
const std::vector<std::string_view> kHumanArchetypeVec(std::begin(kHumanArchetypes),
                                                       std::end(kHumanArchetypes));

double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::string pad5(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05zu", n);
  return buf;
}

std::string scramble_token(Rng& rng) {
  static constexpr std::string_view letters = "abcdefghjkmnpqrstuvwxyz";
  static constexpr std::string_view digits = "23456789";
  std::string out;
  const std::size_t len = static_cast<std::size_t>(rng.range(3, 6));
  for (std::size_t i = 0; i < len; ++i) {
    out += rng.chance(0.5) ? letters[rng.below(letters.size())] : digits[rng.below(digits.size())];
  }
  return out;
}

std::string short_url(Rng& rng) {
  static constexpr std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::string out = "https://t.co/";
  for (int i = 0; i < 8; ++i) out += alphabet[rng.below(alphabet.size())];
  return out;
}

std::string words_sentence(Rng& rng, const Group& group, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out += ' ';
    out += group.words[rng.below(group.words.size())];
  }
  return out;
}

std::string elongate_word(Rng& rng, std::string_view word) {
  // Repeat the final letter so the word carries a >=3 identical-letter run.
  // Arabic letters here are 2-byte UTF-8 sequences.
  if (word.size() < 2) return std::string(word);
  const std::string last(word.substr(word.size() - 2));
  std::string out(word);
  const int extra = static_cast<int>(rng.range(2, 4));
  for (int i = 0; i < extra; ++i) out += last;
  return out;
}

// Sample an integer with the given non-negative mean: floor plus a Bernoulli
// on the fractional part.
std::int64_t count_with_mean(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  const double fl = std::floor(mean);
  return static_cast<std::int64_t>(fl) + (rng.chance(mean - fl) ? 1 : 0);
}

std::size_t pick_weighted(Rng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double x = rng.uniform01() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    x -= weights[i];
    if (x < 0.0) return i;
  }
  return weights.size() - 1;
}

struct ArchetypeMix {
  std::vector<std::size_t> indices;
  std::vector<double> weights;
};

ArchetypeMix resolve_mix(const std::map<std::string, double>& requested,
                         std::span<const std::string_view> names,
                         std::span<const double> default_weights) {
  ArchetypeMix mix;
  for (const auto& [name, weight] : requested) {
    if (weight < 0.0) throw DataError("archetype weight must be >= 0: " + name);
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) continue;  // entry belongs to the other class
    if (weight == 0.0) continue;
    mix.indices.push_back(static_cast<std::size_t>(it - names.begin()));
    mix.weights.push_back(weight);
  }
  if (mix.indices.empty()) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      mix.indices.push_back(i);
      mix.weights.push_back(default_weights[i]);
    }
  }
  return mix;
}

// Shared template pools realize the "same content posted by several
// accounts" rubric row: all accounts of an archetype draw from one pool.
std::vector<std::string> build_pool(std::uint64_t seed, std::uint64_t stream, std::size_t size,
                                    bool with_url, const Group& group) {
  Rng rng(derive_seed(seed, stream));
  std::vector<std::string> pool;
  pool.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    std::string text = words_sentence(rng, group, static_cast<std::size_t>(rng.range(4, 8)));
    if (with_url) text += ' ' + short_url(rng);
    pool.push_back(std::move(text));
  }
  return pool;
}

struct KindPlan {
  std::vector<TweetKind> kinds;  // one per tweet slot
};

KindPlan plan_kinds(Rng& rng, std::size_t n, double reply_frac, double retweet_frac) {
  KindPlan plan;
  std::size_t replies = static_cast<std::size_t>(std::llround(reply_frac * static_cast<double>(n)));
  std::size_t retweets =
      static_cast<std::size_t>(std::llround(retweet_frac * static_cast<double>(n)));
  if (replies + retweets > n) retweets = n - replies;
  plan.kinds.assign(n, TweetKind::original);
  for (std::size_t i = 0; i < replies; ++i) plan.kinds[i] = TweetKind::reply;
  for (std::size_t i = replies; i < replies + retweets; ++i) plan.kinds[i] = TweetKind::retweet;
  rng.shuffle(plan.kinds);
  return plan;
}

const std::int64_t kCollectionDate = parse_iso8601("2017-11-15T00:00:00Z");

Account make_bot(std::size_t ordinal, std::uint64_t seed, std::size_t archetype,
                 std::size_t n_tweets, const std::vector<std::string>& url_pool,
                 const std::vector<std::string>& supplication_pool,
                 std::span<const std::string> bot_targets) {
  Rng rng(derive_seed(seed, ordinal));
  const double t = rng.uniform01();  // behavior intensity, drives the score

  Account a;
  a.profile.id = "bot" + pad5(ordinal + 1);
  a.archetype = "bot/" + std::string(kBotArchetypes[archetype]);
  a.true_score = round2(3.0 + 2.0 * t);
  a.collection_date = kCollectionDate;

  const std::string_view name = kBotArchetypes[archetype];
  const bool spammer = name == "hashtag_spammer";
  const bool promoter = name == "url_promoter";
  const bool scrambler = name == "scramble_filler";
  const bool supplicant = name == "supplication_clock";
  const bool amplifier = name == "retweet_amplifier";

  const std::size_t group_idx =
      supplicant ? kSupplicationGroup
                 : (rng.below(kGroups.size() - 1) + kSupplicationGroup + 1) % kGroups.size();
  const Group& group = kGroups[group_idx];

  // Profile. Recently created, huge tweet volume, follower extremes.
  const std::int64_t age_days = 30 + static_cast<std::int64_t>((1.0 - 0.8 * t) * 400.0 * rng.uniform01());
  a.profile.created_at = kCollectionDate - age_days * 86400;
  a.profile.statuses_count = 20000 + static_cast<std::int64_t>(280000.0 * t) + rng.range(0, 5000);
  a.profile.followers_count =
      rng.chance(0.5) ? rng.range(0, 30) : 30000 + static_cast<std::int64_t>(600000.0 * rng.uniform01());
  a.profile.friends_count = rng.chance(0.35) ? 0 : rng.range(800, 5000);
  a.profile.favourites_total = rng.range(0, 50);
  if (!rng.chance(0.5)) a.profile.description = words_sentence(rng, kGroups[6], 3);
  if (!rng.chance(0.7)) a.profile.location = std::string(kLocations[rng.below(std::size(kLocations))]);
  if (rng.chance(promoter ? 0.8 : 0.3)) a.profile.url = short_url(rng);
  a.profile.default_profile = rng.chance(0.4);
  a.profile.default_image = rng.chance(0.25);
  a.profile.verified = false;
  a.profile.geo_enabled = rng.chance(0.05);

  std::string source;
  if (supplicant) {
    source = kIslamicSources[rng.below(std::size(kIslamicSources))];
  } else if (promoter || scrambler) {
    source = kThirdPartySources[rng.below(2)];
  } else {
    source = kOfficialSources[rng.below(std::size(kOfficialSources))];
  }

  // Own retweet sources: a narrow, fixed set per account.
  std::vector<std::string> targets;
  const std::size_t n_targets = static_cast<std::size_t>(rng.range(2, 5));
  for (std::size_t pick : rng.sample_without_replacement(bot_targets.size(), n_targets)) {
    targets.push_back(bot_targets[pick]);
  }

  const double retweet_frac = amplifier ? 0.92 : 0.08;
  const KindPlan plan = plan_kinds(rng, n_tweets, 0.0, retweet_frac);

  // Fixed-minute clockwork posting.
  const int minute = static_cast<int>(rng.range(0, 59));
  const int interval_hours = static_cast<int>(9 - std::llround(6.0 * t));
  const double url_prob = promoter ? 0.55 + 0.45 * t : (supplicant ? 0.1 : 0.15);
  const int hashtag_base = spammer ? 1 + static_cast<int>(std::llround(2.2 * t)) : (scrambler ? 1 : 0);

  std::int64_t when = kCollectionDate - 3600;
  for (std::size_t i = 0; i < n_tweets; ++i) {
    Tweet tw;
    tw.id = a.profile.id + "_t" + pad5(i + 1);
    tw.kind = plan.kinds[i];
    when -= static_cast<std::int64_t>(std::max(1, interval_hours)) * 3600;
    tw.created_at = when - when % 3600 + minute * 60;
    tw.source_label = source;
    tw.retweet_count = rng.chance(0.9) ? 0 : rng.range(1, 3);
    tw.favorite_count = rng.chance(0.9) ? 0 : rng.range(1, 2);

    if (tw.kind == TweetKind::retweet) {
      const std::string& author = targets[rng.below(targets.size())];
      tw.retweeted_author_id = author;
      tw.text = "RT @" + author + ": " + words_sentence(rng, group, 5);
    } else if (promoter && rng.chance(0.75)) {
      tw.text = url_pool[rng.below(url_pool.size())];  // shared verbatim
    } else if (supplicant && rng.chance(0.75)) {
      tw.text = supplication_pool[rng.below(supplication_pool.size())];
    } else {
      tw.text = words_sentence(rng, group, static_cast<std::size_t>(rng.range(3, 7)));
      if (scrambler) {
        const int fillers = static_cast<int>(rng.range(2, 4 + std::llround(2.0 * t)));
        for (int f = 0; f < fillers; ++f) tw.text += ' ' + scramble_token(rng);
      }
      if (rng.chance(url_prob)) tw.text += ' ' + short_url(rng);
      for (int h = 0; h < hashtag_base; ++h) {
        tw.text += " #" + std::string(group.words[rng.below(group.words.size())]);
      }
      if (!spammer && !scrambler && rng.chance(0.1)) {
        tw.text += " #" + std::string(group.words[rng.below(group.words.size())]);
      }
    }
    extract_entities(tw);
    if (tw.kind != TweetKind::retweet) tw.retweeted_author_id.reset();
    a.tweets.push_back(std::move(tw));
  }
  if (!a.tweets.empty()) {
    const std::int64_t oldest = a.tweets.back().created_at;
    a.profile.created_at = std::min(a.profile.created_at, oldest - 30 * 86400);
  }
  return a;
}

Account make_human(std::size_t ordinal, std::uint64_t seed, std::size_t archetype,
                   std::size_t n_tweets, std::span<const std::string> human_targets) {
  Rng rng(derive_seed(seed, ordinal));
  const std::string_view name = kHumanArchetypes[archetype];
  const bool conversational = name == "conversationalist";
  const bool supplicant = name == "app_supplicant";

  double sociality = rng.uniform01();
  if (conversational) {
    sociality = 0.55 + 0.45 * sociality;
  } else if (supplicant) {
    sociality = 0.05 + 0.35 * sociality;
  } else {
    sociality = 0.20 + 0.50 * sociality;
  }

  Account a;
  a.profile.id = "hum" + pad5(ordinal + 1);
  a.archetype = "human/" + std::string(name);
  a.true_score = round2(2.0 * (1.0 - sociality));
  a.collection_date = kCollectionDate;

  const std::int64_t age_days =
      300 + static_cast<std::int64_t>(2700.0 * (0.25 + 0.75 * sociality) * rng.uniform01());
  a.profile.created_at = kCollectionDate - age_days * 86400;
  a.profile.statuses_count = 800 + static_cast<std::int64_t>(30000.0 * rng.uniform01());
  a.profile.followers_count = 50 + static_cast<std::int64_t>(7000.0 * rng.uniform01() * rng.uniform01());
  a.profile.friends_count = 100 + static_cast<std::int64_t>(200.0 + 1300.0 * sociality * rng.uniform01());
  a.profile.favourites_total = 200 + static_cast<std::int64_t>(20000.0 * sociality * rng.uniform01());
  if (!rng.chance(0.12)) a.profile.description = words_sentence(rng, kGroups[6], 4);
  if (!rng.chance(0.35)) a.profile.location = std::string(kLocations[rng.below(std::size(kLocations))]);
  if (rng.chance(0.2)) a.profile.url = short_url(rng);
  a.profile.default_profile = rng.chance(0.1);
  a.profile.default_image = rng.chance(0.05);
  a.profile.verified = rng.chance(0.02);
  a.profile.geo_enabled = rng.chance(0.35);

  std::string dominant_source;
  if (supplicant) {
    dominant_source = kIslamicSources[rng.below(std::size(kIslamicSources))];
  } else if (rng.chance(0.08)) {
    dominant_source = kThirdPartySources[rng.below(std::size(kThirdPartySources))];
  } else {
    dominant_source = kOfficialSources[rng.below(std::size(kOfficialSources))];
  }
  const std::string secondary_source(kOfficialSources[rng.below(std::size(kOfficialSources))]);

  // Varied topics: a personal mix over 3-5 groups.
  const std::size_t n_groups = static_cast<std::size_t>(rng.range(3, 5));
  std::vector<std::size_t> my_groups = rng.sample_without_replacement(kGroups.size(), n_groups);
  std::vector<double> group_weights;
  for (std::size_t g = 0; g < n_groups; ++g) group_weights.push_back(0.2 + rng.uniform01());

  std::vector<std::string> friends;
  const std::size_t n_friends = static_cast<std::size_t>(rng.range(15, 40));
  for (std::size_t pick : rng.sample_without_replacement(human_targets.size(), n_friends)) {
    friends.push_back(human_targets[pick]);
  }

  const double reply_frac = std::max(0.22, 0.22 + 0.50 * (sociality - 0.1));
  const double retweet_frac = 0.10 + 0.15 * rng.uniform01();
  const KindPlan plan = plan_kinds(rng, n_tweets, reply_frac, retweet_frac);

  const double emoji_rate = 0.4 + 1.8 * sociality;
  const double base_gap = 86400.0 * 0.3 + 86400.0 * rng.uniform01();

  std::int64_t when = kCollectionDate - 1800;
  for (std::size_t i = 0; i < n_tweets; ++i) {
    Tweet tw;
    tw.id = a.profile.id + "_t" + pad5(i + 1);
    tw.kind = plan.kinds[i];
    when -= static_cast<std::int64_t>(base_gap * (0.3 + 1.4 * rng.uniform01()));
    tw.created_at = when;
    tw.source_label = rng.chance(0.75) ? dominant_source : secondary_source;
    tw.retweet_count = count_with_mean(rng, 0.5 + 3.0 * sociality);
    tw.favorite_count = count_with_mean(rng, 1.0 + 6.0 * sociality);

    const Group& group = kGroups[my_groups[pick_weighted(rng, group_weights)]];
    std::string body = words_sentence(rng, group, static_cast<std::size_t>(rng.range(3, 7)));
    if (rng.chance(0.08)) {
      const std::size_t cut = body.find(' ');
      const std::string first = body.substr(0, cut == std::string::npos ? body.size() : cut);
      body = elongate_word(rng, first) + (cut == std::string::npos ? "" : body.substr(cut));
    }

    if (tw.kind == TweetKind::retweet) {
      const std::string& author = friends[rng.below(friends.size())];
      tw.retweeted_author_id = author;
      tw.text = "RT @" + author + ": " + body;
    } else if (tw.kind == TweetKind::reply) {
      const std::string& target = friends[rng.below(friends.size())];
      tw.mentioned_ids.push_back(target);
      tw.text = "@" + target + " " + body;
    } else {
      tw.text = body;
      if (rng.chance(0.1 + 0.3 * sociality)) {
        const std::string& target = friends[rng.below(friends.size())];
        tw.mentioned_ids.push_back(target);
        tw.text += " @" + target;
      }
    }
    const std::int64_t emojis = count_with_mean(rng, emoji_rate);
    for (std::int64_t e = 0; e < emojis && e < 4; ++e) {
      tw.text += ' ';
      tw.text += kEmojis[rng.below(std::size(kEmojis))];
    }
    if (rng.chance(0.4)) tw.text += kHumanPunct[rng.below(std::size(kHumanPunct))];
    if (rng.chance(0.12)) tw.text += " #" + std::string(group.words[rng.below(group.words.size())]);
    if (rng.chance(0.10)) tw.text += " " + std::to_string(rng.range(2, 2030));
    extract_entities(tw);
    if (tw.kind != TweetKind::retweet) tw.retweeted_author_id.reset();
    a.tweets.push_back(std::move(tw));
  }
  if (!a.tweets.empty()) {
    const std::int64_t oldest = a.tweets.back().created_at;
    a.profile.created_at = std::min(a.profile.created_at, oldest - 30 * 86400);
  }
  return a;
}

}  // namespace

std::span<const std::string_view> bot_archetypes() { return kBotArchetypeVec; }
std::span<const std::string_view> human_archetypes() { return kHumanArchetypeVec; }

std::vector<Account> generate_synthetic(const SynthConfig& config) {
  if (config.tweets_per_account == 0) throw DataError("tweets_per_account must be positive");
  double weight_sum = 0.0;
  for (const auto& [name, w] : config.archetype_mix) {
    if (w < 0.0) throw DataError("archetype weight must be >= 0: " + name);
    weight_sum += w;
  }
  if (!config.archetype_mix.empty() && weight_sum <= 0.0) {
    throw DataError("archetype_mix weights must sum to > 0");
  }

  const ArchetypeMix bot_mix = resolve_mix(config.archetype_mix, kBotArchetypes, kBotWeights);
  const ArchetypeMix human_mix =
      resolve_mix(config.archetype_mix, kHumanArchetypes, kHumanWeights);

  const std::vector<std::string> url_pool =
      build_pool(config.seed, 1u << 20, 30, true, kGroups[3]);
  const std::vector<std::string> supplication_pool =
      build_pool(config.seed, 2u << 20, 30, false, kGroups[kSupplicationGroup]);

  std::vector<std::string> bot_targets;
  for (std::size_t i = 0; i < 60; ++i) bot_targets.push_back("src" + pad5(i + 1));
  std::vector<std::string> human_targets;
  for (std::size_t i = 0; i < 800; ++i) human_targets.push_back("ext" + pad5(i + 1));

  std::vector<Account> accounts;
  accounts.reserve(config.n_bots + config.n_humans);
  Rng assign_rng(derive_seed(config.seed, 0xA551));
  for (std::size_t i = 0; i < config.n_bots; ++i) {
    const std::size_t arch = bot_mix.indices[pick_weighted(assign_rng, bot_mix.weights)];
    accounts.push_back(make_bot(i, config.seed, arch, config.tweets_per_account, url_pool,
                                supplication_pool, bot_targets));
  }
  for (std::size_t i = 0; i < config.n_humans; ++i) {
    const std::size_t arch = human_mix.indices[pick_weighted(assign_rng, human_mix.weights)];
    accounts.push_back(make_human(config.n_bots + i, config.seed, arch,
                                  config.tweets_per_account, human_targets));
  }
  return accounts;
}

}  // namespace dhira::corpus
