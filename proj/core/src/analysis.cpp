#include "dhira/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>

#include "dhira/errors.hpp"
#include "dhira/textio.hpp"
#include "dhira/topics.hpp"

namespace dhira::analysis {

namespace {

std::string fold_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c += 32;
  }
  return out;
}

constexpr std::string_view kOfficialSources[] = {
    "twitter web client", "twitter lite", "twitter for iphone", "twitter for android",
    "twitter for windows"};

constexpr std::string_view kDefaultIslamicApps[] = {
    "تطبيق الأذكار", "أدعية المسلم", "آيات قرآنية", "تطبيق الدعاء", "اذكار المسلم",
    "du3a.com", "quran app", "athkar"};

}  // namespace

BotHumanSplit partition(std::span<const Scored> accounts, double threshold) {
  BotHumanSplit split;
  for (const Scored& s : accounts) {
    if (!std::isfinite(s.score)) throw DataError("account has no usable score");
    (s.score > threshold ? split.bots : split.humans).push_back(s);
  }
  return split;
}

std::string AttributionSummary::ratio_display() const {
  if (bot_tweets == 0) return "0:1";
  if (human_tweets == 0) return "1:0";
  return "1:" + std::to_string(static_cast<long long>(std::llround(ratio)));
}

AttributionSummary attribute_hate(std::int64_t n_bots, std::int64_t bot_tweets,
                                  std::int64_t n_humans, std::int64_t human_tweets) {
  if (n_bots < 0 || n_humans < 0 || bot_tweets < 0 || human_tweets < 0) {
    throw DataError("attribution counts must be non-negative");
  }
  const std::int64_t total = bot_tweets + human_tweets;
  if (total == 0) throw DataError("zero total tweets");

  AttributionSummary s;
  s.n_bots = n_bots;
  s.n_humans = n_humans;
  s.bot_tweets = bot_tweets;
  s.human_tweets = human_tweets;
  s.per_bot_rate = n_bots > 0 ? static_cast<double>(bot_tweets) / static_cast<double>(n_bots) : 0.0;
  s.per_human_rate =
      n_humans > 0 ? static_cast<double>(human_tweets) / static_cast<double>(n_humans) : 0.0;
  s.bot_share = static_cast<double>(bot_tweets) / static_cast<double>(total);
  s.human_share = static_cast<double>(human_tweets) / static_cast<double>(total);
  s.ratio = bot_tweets > 0 ? static_cast<double>(human_tweets) / static_cast<double>(bot_tweets)
                           : 0.0;
  return s;
}

std::string to_string(SourceCategory c) {
  switch (c) {
    case SourceCategory::official: return "official";
    case SourceCategory::islamic_supplication: return "islamic_supplication";
    case SourceCategory::third_party: return "third_party";
  }
  return "third_party";
}

SourceSet load_islamic_apps(const std::string& path) {
  SourceSet set;
  for (const std::string& raw : split(read_file(path), '\n')) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    set.insert(fold_ascii(line));
  }
  return set;
}

const SourceSet& default_islamic_apps() {
  static const SourceSet set = []() {
    SourceSet s;
    for (std::string_view label : kDefaultIslamicApps) s.insert(fold_ascii(label));
    return s;
  }();
  return set;
}

SourceCategory categorize_source(std::string_view label, const SourceSet& islamic_apps) {
  const std::string folded = fold_ascii(std::string(trim(label)));
  for (std::string_view official : kOfficialSources) {
    if (folded == official) return SourceCategory::official;
  }
  if (islamic_apps.contains(folded)) return SourceCategory::islamic_supplication;
  return SourceCategory::third_party;
}

SourceCategory dominant_source(const corpus::Account& account, const SourceSet& islamic_apps) {
  if (account.tweets.empty()) {
    throw DataError("account " + account.profile.id + " has an empty timeline");
  }
  struct Use {
    std::size_t count = 0;
    std::int64_t latest = 0;
  };
  std::map<std::string, Use> uses;
  for (const corpus::Tweet& t : account.tweets) {
    Use& u = uses[t.source_label];
    u.count += 1;
    u.latest = std::max(u.latest, t.created_at);
  }
  const auto best = std::max_element(uses.begin(), uses.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count < b.second.count;
    return a.second.latest < b.second.latest;
    // remaining ties resolve to the lexicographically last label via map order
  });
  return categorize_source(best->first, islamic_apps);
}

InteractionNetwork build_network(std::span<const corpus::Account* const> accounts,
                                 NetworkKind kind) {
  InteractionNetwork net;
  net.kind = kind;
  for (const corpus::Account* account : accounts) {
    net.nodes.insert(account->profile.id);
    for (const corpus::Tweet& t : account->tweets) {
      if (kind == NetworkKind::retweet) {
        if (t.retweeted_author_id) {
          net.nodes.insert(*t.retweeted_author_id);
          net.edges.emplace(account->profile.id, *t.retweeted_author_id);
        }
      } else {
        for (const std::string& target : t.mentioned_ids) {
          net.nodes.insert(target);
          net.edges.emplace(account->profile.id, target);
        }
      }
    }
  }
  std::set<std::string> touched;
  for (const auto& [src, dst] : net.edges) {
    touched.insert(src);
    touched.insert(dst);
  }
  net.singleton_count = 0;
  for (const std::string& node : net.nodes) {
    if (!touched.contains(node)) ++net.singleton_count;
  }
  return net;
}

namespace {

std::string class_name(bool is_bot) { return is_bot ? "bot" : "human"; }

void append_network_rows(std::string& out, std::span<const corpus::Account* const> accounts,
                         bool is_bot) {
  for (NetworkKind kind : {NetworkKind::retweet, NetworkKind::mention}) {
    const InteractionNetwork net = build_network(accounts, kind);
    out += class_name(is_bot) + ',' +
           (kind == NetworkKind::retweet ? std::string("retweet") : std::string("mention")) + ',' +
           std::to_string(net.nodes.size()) + ',' + std::to_string(net.edges.size()) + ',' +
           std::to_string(net.singleton_count) + '\n';
  }
}

}  // namespace

void emit_report(std::span<const ReportRow> rows, const ReportOptions& options,
                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw DataError("cannot create report directory: " + out_dir);
  }
  const SourceSet& islamic =
      options.islamic_apps != nullptr ? *options.islamic_apps : default_islamic_apps();
  const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

  // Score histogram, bin width 1; [4,5] closes the top.
  {
    std::array<std::size_t, 5> bins{};
    for (const ReportRow& row : rows) {
      const std::size_t bin =
          std::min<std::size_t>(4, static_cast<std::size_t>(std::floor(row.score)));
      ++bins[bin];
    }
    std::string out = "bin_lower,bin_upper,count\n";
    for (std::size_t b = 0; b < bins.size(); ++b) {
      out += std::to_string(b) + ',' + std::to_string(b + 1) + ',' + std::to_string(bins[b]) + '\n';
    }
    write_file(path("histogram.csv"), out);
  }

  // Truth-vs-predicted pairs where both sides exist.
  {
    std::string out = "account_id,true_score,predicted_score\n";
    for (const ReportRow& row : rows) {
      if (row.account->true_score && row.predicted) {
        out += row.account->profile.id + ',' + format_fixed(*row.account->true_score, 4) + ',' +
               format_fixed(*row.predicted, 4) + '\n';
      }
    }
    write_file(path("pairs.csv"), out);
  }

  std::vector<const ReportRow*> bots, humans;
  for (const ReportRow& row : rows) {
    (row.score > options.threshold ? bots : humans).push_back(&row);
  }

  // Dominant-topic proportions per class.
  {
    std::string out = "class,topic,label,proportion,n\n";
    for (const bool is_bot : {true, false}) {
      const std::vector<const ReportRow*>& group = is_bot ? bots : humans;
      std::array<std::size_t, 7> counts{};
      std::size_t with_theta = 0;
      for (const ReportRow* row : group) {
        if (row->theta.size() != 7) continue;
        ++with_theta;
        ++counts[topics::dominant_topic(row->theta) - 1];
      }
      for (std::size_t t = 0; t < 7; ++t) {
        const double prop =
            with_theta > 0 ? static_cast<double>(counts[t]) / static_cast<double>(with_theta) : 0.0;
        const std::string label = options.topic_labels.size() == 7
                                      ? options.topic_labels[t]
                                      : "topic_" + std::to_string(t + 1);
        out += class_name(is_bot) + ',' + std::to_string(t + 1) + ',' + label + ',' +
               format_fixed(prop, 4) + ',' + std::to_string(with_theta) + '\n';
      }
    }
    write_file(path("topics_by_class.csv"), out);
  }

  // Dominant-source proportions per class.
  {
    std::string out = "class,category,proportion,n\n";
    for (const bool is_bot : {true, false}) {
      const std::vector<const ReportRow*>& group = is_bot ? bots : humans;
      std::map<SourceCategory, std::size_t> counts;
      std::size_t with_timeline = 0;
      for (const ReportRow* row : group) {
        if (row->account->tweets.empty()) continue;
        ++with_timeline;
        ++counts[dominant_source(*row->account, islamic)];
      }
      for (SourceCategory c : {SourceCategory::official, SourceCategory::islamic_supplication,
                               SourceCategory::third_party}) {
        const double prop = with_timeline > 0
                                ? static_cast<double>(counts[c]) / static_cast<double>(with_timeline)
                                : 0.0;
        out += class_name(is_bot) + ',' + to_string(c) + ',' + format_fixed(prop, 4) + ',' +
               std::to_string(with_timeline) + '\n';
      }
    }
    write_file(path("sources_by_class.csv"), out);
  }

  // Retweet/mention network sizes per class.
  {
    std::string out = "class,kind,nodes,edges,singletons\n";
    std::vector<const corpus::Account*> bot_accounts, human_accounts;
    for (const ReportRow* row : bots) bot_accounts.push_back(row->account);
    for (const ReportRow* row : humans) human_accounts.push_back(row->account);
    append_network_rows(out, bot_accounts, true);
    append_network_rows(out, human_accounts, false);
    write_file(path("network_summary.csv"), out);
  }

  // Attribution summary.
  {
    std::int64_t bot_count = 0, human_count = 0;
    const bool have_hate = options.hate_counts.has_value();
    const auto tally = [&](const std::vector<const ReportRow*>& group) {
      std::int64_t total = 0;
      for (const ReportRow* row : group) {
        if (have_hate) {
          const auto it = options.hate_counts->find(row->account->profile.id);
          total += it == options.hate_counts->end() ? 0 : it->second;
        } else {
          total += static_cast<std::int64_t>(row->account->tweets.size());
        }
      }
      return total;
    };
    bot_count = tally(bots);
    human_count = tally(humans);

    std::string out;
    out += "basis: " + std::string(have_hate ? "hateful-tweet counts" : "timeline tweet volume") +
           '\n';
    out += "threshold: " + format_fixed(options.threshold, 4) + '\n';
    if (bot_count + human_count == 0) {
      out += "no tweets to attribute\n";
    } else {
      const AttributionSummary s = attribute_hate(static_cast<std::int64_t>(bots.size()),
                                                  bot_count,
                                                  static_cast<std::int64_t>(humans.size()),
                                                  human_count);
      out += "bots: " + std::to_string(s.n_bots) + " accounts, " + std::to_string(s.bot_tweets) +
             " tweets (" + format_fixed(s.per_bot_rate, 4) + " per bot)\n";
      out += "humans: " + std::to_string(s.n_humans) + " accounts, " +
             std::to_string(s.human_tweets) + " tweets (" + format_fixed(s.per_human_rate, 4) +
             " per human)\n";
      out += "bot_share: " + format_fixed(s.bot_share, 4) + '\n';
      out += "human_share: " + format_fixed(s.human_share, 4) + '\n';
      out += "ratio: " + s.ratio_display() + " (exact " + format_fixed(s.ratio, 4) + ")\n";
    }
    write_file(path("attribution.txt"), out);
  }
}

}  // namespace dhira::analysis
