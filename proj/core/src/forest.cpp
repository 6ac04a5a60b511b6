#include "dhira/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "dhira/errors.hpp"
#include "dhira/rng.hpp"
#include "dhira/stats.hpp"
#include "dhira/textio.hpp"

namespace dhira::forest {

using json = nlohmann::ordered_json;

void Dataset::add_row(std::span<const double> x, double y) {
  if (cols == 0) cols = x.size();
  if (x.size() != cols) throw DataError("row width mismatch");
  values.insert(values.end(), x.begin(), x.end());
  targets.push_back(y);
}

std::size_t resolve_max_features(const std::string& spec, std::size_t n_features) {
  if (n_features == 0) throw DataError("no features");
  if (spec == "all") return n_features;
  if (spec == "sqrt") {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_features)))));
  }
  if (spec == "third") return std::max<std::size_t>(1, n_features / 3);
  std::size_t count = 0;
  try {
    count = std::stoul(spec);
  } catch (const std::exception&) {
    throw DataError("bad max_features spec: '" + spec + "'");
  }
  if (count == 0 || count > n_features) throw DataError("max_features out of range: " + spec);
  return count;
}

namespace {

struct Builder {
  const Dataset& data;
  const TreeParams& params;
  std::size_t max_features;
  Rng& rng;
  std::vector<TreeNode>& nodes;

  // indices: rows routed to the node being built (may repeat under bootstrap)
  std::int32_t build(std::vector<std::size_t>& indices, std::size_t depth) {
    const std::size_t n = indices.size();
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i : indices) {
      const double y = data.targets[i];
      sum += y;
      sum_sq += y * y;
    }
    const double mean = sum / static_cast<double>(n);
    const double sse = std::max(0.0, sum_sq - sum * sum / static_cast<double>(n));

    const std::int32_t id = static_cast<std::int32_t>(nodes.size());
    nodes.push_back({});
    nodes[id].value = mean;
    nodes[id].n = static_cast<std::int64_t>(n);
    nodes[id].impurity = sse / static_cast<double>(n);

    const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
    if (sse <= 0.0 || n < 2 * params.min_samples_leaf || depth_capped) return id;

    // Best split over a fresh random feature subset.
    double best_reduction = 0.0;
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, double>> sorted;  // (x, y)
    sorted.reserve(n);
    for (std::size_t pick : rng.sample_without_replacement(data.cols, max_features)) {
      sorted.clear();
      for (std::size_t i : indices) {
        sorted.emplace_back(data.values[i * data.cols + pick], data.targets[i]);
      }
      std::sort(sorted.begin(), sorted.end());
      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t p = 1; p < n; ++p) {
        const double y = sorted[p - 1].second;
        left_sum += y;
        left_sq += y * y;
        if (sorted[p - 1].first == sorted[p].first) continue;
        if (p < params.min_samples_leaf || n - p < params.min_samples_leaf) continue;
        const double right_sum = sum - left_sum;
        const double right_sq = sum_sq - left_sq;
        const double sse_left =
            std::max(0.0, left_sq - left_sum * left_sum / static_cast<double>(p));
        const double sse_right =
            std::max(0.0, right_sq - right_sum * right_sum / static_cast<double>(n - p));
        const double reduction = sse - sse_left - sse_right;
        if (reduction > best_reduction) {
          best_reduction = reduction;
          best_feature = static_cast<std::int32_t>(pick);
          best_threshold = (sorted[p - 1].first + sorted[p].first) / 2.0;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(n);
    right_rows.reserve(n);
    for (std::size_t i : indices) {
      if (data.values[i * data.cols + best_feature] <= best_threshold) {
        left_rows.push_back(i);
      } else {
        right_rows.push_back(i);
      }
    }
    if (left_rows.empty() || right_rows.empty()) return id;  // degenerate under float midpoints

    indices.clear();
    indices.shrink_to_fit();
    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    const std::int32_t left = build(left_rows, depth + 1);
    nodes[id].left = left;
    const std::int32_t right = build(right_rows, depth + 1);
    nodes[id].right = right;
    return id;
  }
};

Tree fit_tree_on(const Dataset& data, std::vector<std::size_t> indices, const TreeParams& params,
                 Rng& rng) {
  if (data.rows() == 0) throw DataError("empty training set");
  if (indices.size() < std::max<std::size_t>(1, 2 * params.min_samples_leaf)) {
    // Too small to split: a single leaf is still well-defined for n >= 1.
    if (indices.empty()) throw DataError("empty training sample");
  }
  Tree tree;
  const std::size_t m = resolve_max_features(params.max_features, data.cols);
  Builder builder{data, params, m, rng, tree.nodes};
  builder.build(indices, 0);
  return tree;
}

}  // namespace

double Tree::predict(std::span<const double> x) const {
  std::size_t at = 0;
  for (;;) {
    const TreeNode& node = nodes[at];
    if (node.feature < 0) return node.value;
    at = x[static_cast<std::size_t>(node.feature)] <= node.threshold
             ? static_cast<std::size_t>(node.left)
             : static_cast<std::size_t>(node.right);
  }
}

Tree fit_tree(const Dataset& data, const TreeParams& params, std::uint64_t seed) {
  if (data.rows() < std::max<std::size_t>(1, 2 * params.min_samples_leaf)) {
    throw DataError("need at least 2*min_samples_leaf rows");
  }
  Rng rng(seed);
  std::vector<std::size_t> all(data.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return fit_tree_on(data, std::move(all), params, rng);
}

Forest fit_forest(const Dataset& data, const Hyperparams& params, std::uint64_t seed,
                  std::vector<std::string> feature_names) {
  if (params.n_trees == 0) throw DataError("n_trees must be positive");
  const std::size_t n = data.rows();
  if (n == 0) throw DataError("empty training set");
  if (!feature_names.empty() && feature_names.size() != data.cols) {
    throw DataError("feature_names length does not match columns");
  }

  Forest forest;
  forest.feature_names = std::move(feature_names);
  forest.hyperparams = params;
  forest.seed = seed;
  double sum = 0.0;
  for (double y : data.targets) sum += y;
  forest.bias = sum / static_cast<double>(n);

  forest.trees.resize(params.n_trees);
  const TreeParams tree_params = params.tree_params();
  parallel_for(params.n_trees, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> sample(n);
    for (std::size_t i = 0; i < n; ++i) sample[i] = rng.below(n);
    forest.trees[t] = fit_tree_on(data, std::move(sample), tree_params, rng);
  });
  return forest;
}

double predict(const Forest& forest, std::span<const double> x) {
  if (forest.trees.empty()) throw DataError("empty forest");
  double sum = 0.0;
  for (const Tree& tree : forest.trees) sum += tree.predict(x);
  return sum / static_cast<double>(forest.trees.size());
}

std::vector<double> predict(const Forest& forest, const Dataset& data) {
  if (!forest.feature_names.empty() && data.cols != forest.feature_names.size()) {
    throw ModelContractError("feature count mismatch: model has " +
                             std::to_string(forest.feature_names.size()) + ", input has " +
                             std::to_string(data.cols));
  }
  std::vector<double> out(data.rows());
  parallel_for(data.rows(), [&](std::size_t i) { out[i] = predict(forest, data.row(i)); });
  return out;
}

std::vector<double> predict_checked(const Forest& forest, const Dataset& data,
                                    std::span<const std::string> feature_names) {
  if (feature_names.size() != forest.feature_names.size() ||
      !std::equal(feature_names.begin(), feature_names.end(), forest.feature_names.begin())) {
    throw ModelContractError("feature names do not match the model contract");
  }
  return predict(forest, data);
}

std::vector<double> importance(const Forest& forest) {
  if (forest.trees.empty()) throw DataError("empty forest");
  std::size_t cols = forest.feature_names.size();
  if (cols == 0) {
    for (const Tree& tree : forest.trees) {
      for (const TreeNode& node : tree.nodes) {
        if (node.feature >= 0) cols = std::max(cols, static_cast<std::size_t>(node.feature) + 1);
      }
    }
  }
  std::vector<double> total(cols, 0.0);
  for (const Tree& tree : forest.trees) {
    const double n_root = static_cast<double>(tree.root().n);
    for (const TreeNode& node : tree.nodes) {
      if (node.feature < 0) continue;
      const TreeNode& left = tree.nodes[static_cast<std::size_t>(node.left)];
      const TreeNode& right = tree.nodes[static_cast<std::size_t>(node.right)];
      const double weight = static_cast<double>(node.n) / n_root;
      const double decrease =
          node.impurity -
          (static_cast<double>(left.n) * left.impurity + static_cast<double>(right.n) * right.impurity) /
              static_cast<double>(node.n);
      total[static_cast<std::size_t>(node.feature)] += weight * decrease;
    }
  }
  double sum = 0.0;
  for (double& v : total) {
    v /= static_cast<double>(forest.trees.size());
    sum += v;
  }
  if (sum > 0.0) {
    for (double& v : total) v /= sum;
  }
  // All-leaf forest: importances stay zero, normalization skipped.
  return total;
}

ContributionBreakdown contributions(const Forest& forest, std::span<const double> x) {
  if (forest.trees.empty()) throw DataError("empty forest");
  const std::size_t cols =
      forest.feature_names.empty() ? x.size() : forest.feature_names.size();
  ContributionBreakdown out;
  out.contributions.assign(cols, 0.0);
  double bias_sum = 0.0;
  double pred_sum = 0.0;
  for (const Tree& tree : forest.trees) {
    bias_sum += tree.root().value;
    std::size_t at = 0;
    for (;;) {
      const TreeNode& node = tree.nodes[at];
      if (node.feature < 0) {
        pred_sum += node.value;
        break;
      }
      const std::size_t child = x[static_cast<std::size_t>(node.feature)] <= node.threshold
                                    ? static_cast<std::size_t>(node.left)
                                    : static_cast<std::size_t>(node.right);
      out.contributions[static_cast<std::size_t>(node.feature)] +=
          tree.nodes[child].value - node.value;
      at = child;
    }
  }
  const double n_trees = static_cast<double>(forest.trees.size());
  out.bias = bias_sum / n_trees;
  out.prediction = pred_sum / n_trees;
  for (double& c : out.contributions) c /= n_trees;
  return out;
}

std::vector<Hyperparams> default_grid() {
  std::vector<Hyperparams> grid;
  for (std::size_t n_trees : {100u, 200u, 400u}) {
    for (std::size_t max_depth : {8u, 16u, 0u}) {
      for (std::size_t min_leaf : {1u, 3u, 5u}) {
        for (const char* mf : {"sqrt", "third", "all"}) {
          grid.push_back({n_trees, max_depth, min_leaf, mf});
        }
      }
    }
  }
  return grid;
}

std::vector<Hyperparams> parse_grid(std::string_view text) {
  std::vector<std::size_t> n_trees{100, 200, 400};
  std::vector<std::size_t> max_depth{8, 16, 0};
  std::vector<std::size_t> min_leaf{1, 3, 5};
  std::vector<std::string> max_features{"sqrt", "third", "all"};

  for (const std::string& raw : split(text, '\n')) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw DataError("bad grid line: '" + std::string(line) + "'");
    const std::string_view key = trim(line.substr(0, eq));
    std::vector<std::string> values;
    for (const std::string& v : split(line.substr(eq + 1), ',')) {
      values.emplace_back(trim(v));
    }
    if (values.empty()) throw DataError("empty grid value list for " + std::string(key));
    const auto as_sizes = [&]() {
      std::vector<std::size_t> out;
      for (const std::string& v : values) {
        if (v == "unlimited") {
          out.push_back(0);
          continue;
        }
        try {
          out.push_back(std::stoul(v));
        } catch (const std::exception&) {
          throw DataError("bad grid value '" + v + "' for " + std::string(key));
        }
      }
      return out;
    };
    if (key == "n_trees") {
      n_trees = as_sizes();
      for (std::size_t v : n_trees) {
        if (v == 0) throw DataError("n_trees must be positive");
      }
    } else if (key == "max_depth") {
      max_depth = as_sizes();
    } else if (key == "min_samples_leaf") {
      min_leaf = as_sizes();
      for (std::size_t v : min_leaf) {
        if (v == 0) throw DataError("min_samples_leaf must be positive");
      }
    } else if (key == "max_features") {
      max_features = values;
    } else {
      throw DataError("unknown grid key: '" + std::string(key) + "'");
    }
  }
  std::vector<Hyperparams> grid;
  for (std::size_t nt : n_trees) {
    for (std::size_t md : max_depth) {
      for (std::size_t ml : min_leaf) {
        for (const std::string& mf : max_features) {
          grid.push_back({nt, md, ml, mf});
        }
      }
    }
  }
  return grid;
}

namespace {

// Ties prefer the smaller model: fewer trees, then shallower (0 = unlimited
// counts as deepest).
bool smaller_model(const Hyperparams& a, const Hyperparams& b) {
  if (a.n_trees != b.n_trees) return a.n_trees < b.n_trees;
  const std::size_t da = a.max_depth == 0 ? std::numeric_limits<std::size_t>::max() : a.max_depth;
  const std::size_t db = b.max_depth == 0 ? std::numeric_limits<std::size_t>::max() : b.max_depth;
  return da < db;
}

}  // namespace

GridSearchResult grid_search(const Dataset& data, std::span<const Hyperparams> grid,
                             std::size_t folds, std::uint64_t seed) {
  if (grid.empty()) throw DataError("empty hyperparameter grid");
  if (folds < 2) throw DataError("need at least 2 folds");
  const std::size_t n = data.rows();
  if (n < folds) throw DataError("fewer rows than folds");

  // Stratified fold assignment on score bins of width 1.
  GridSearchResult result;
  result.fold_assignment.assign(n, 0);
  {
    std::vector<std::vector<std::size_t>> bins(5);
    for (std::size_t i = 0; i < n; ++i) {
      const double y = data.targets[i];
      const std::size_t bin = std::min<std::size_t>(4, static_cast<std::size_t>(std::floor(y)));
      bins[bin].push_back(i);
    }
    Rng rng(derive_seed(seed, 0xF01D));
    std::size_t next_fold = 0;
    for (std::vector<std::size_t>& bin : bins) {
      rng.shuffle(bin);
      for (std::size_t row : bin) {
        result.fold_assignment[row] = next_fold;
        next_fold = (next_fold + 1) % folds;
      }
    }
  }

  // Per-(candidate, fold) validation rho; jobs are independent.
  std::vector<double> fold_rho(grid.size() * folds, 0.0);
  parallel_for(grid.size() * folds, [&](std::size_t job) {
    const std::size_t c = job / folds;
    const std::size_t fold = job % folds;
    Dataset train;
    train.cols = data.cols;
    std::vector<std::size_t> val_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (result.fold_assignment[i] == fold) {
        val_rows.push_back(i);
      } else {
        train.add_row(data.row(i), data.targets[i]);
      }
    }
    if (val_rows.empty() || train.rows() == 0) return;
    const Forest forest =
        fit_forest(train, grid[c], derive_seed(seed, 1 + job));
    std::vector<stats::ScorePair> pairs;
    pairs.reserve(val_rows.size());
    for (std::size_t i : val_rows) {
      pairs.push_back({data.targets[i], predict(forest, data.row(i))});
    }
    try {
      fold_rho[job] = stats::spearman_rho(pairs);
    } catch (const DataError&) {
      fold_rho[job] = 0.0;  // constant fold: no rank signal
    }
  });

  result.candidates.assign(grid.begin(), grid.end());
  result.mean_rho.resize(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    double sum = 0.0;
    for (std::size_t fold = 0; fold < folds; ++fold) sum += fold_rho[c * folds + fold];
    result.mean_rho[c] = sum / static_cast<double>(folds);
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < grid.size(); ++c) {
    if (result.mean_rho[c] > result.mean_rho[best] ||
        (result.mean_rho[c] == result.mean_rho[best] && smaller_model(grid[c], grid[best]))) {
      best = c;
    }
  }
  result.best = grid[best];
  return result;
}

namespace {
constexpr std::string_view kModelVersion = "dhira-forest/1";
}

void save_model(const std::string& path, const Forest& forest) {
  json doc;
  doc["version"] = kModelVersion;
  doc["feature_names"] = forest.feature_names;
  doc["hyperparams"] = {{"n_trees", forest.hyperparams.n_trees},
                        {"max_depth", forest.hyperparams.max_depth},
                        {"min_samples_leaf", forest.hyperparams.min_samples_leaf},
                        {"max_features", forest.hyperparams.max_features}};
  doc["bias"] = forest.bias;
  doc["seed"] = forest.seed;
  json trees = json::array();
  for (const Tree& tree : forest.trees) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes) {
      nodes.push_back({node.feature, node.threshold, node.left, node.right, node.value, node.n,
                       node.impurity});
    }
    trees.push_back(std::move(nodes));
  }
  doc["trees"] = std::move(trees);
  write_file(path, doc.dump());
}

Forest load_model(const std::string& path) {
  const std::string content = read_file(path);
  const json doc = json::parse(content, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ModelFormatError("corrupt model file: " + path);
  }
  try {
    if (!doc.contains("version") || !doc.at("version").is_string()) {
      throw ModelFormatError("missing version tag: " + path);
    }
    const std::string version = doc.at("version").get<std::string>();
    if (version != kModelVersion) {
      throw ModelVersionError("unsupported model version '" + version + "' in " + path);
    }
    Forest forest;
    forest.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const json& hp = doc.at("hyperparams");
    forest.hyperparams.n_trees = hp.at("n_trees").get<std::size_t>();
    forest.hyperparams.max_depth = hp.at("max_depth").get<std::size_t>();
    forest.hyperparams.min_samples_leaf = hp.at("min_samples_leaf").get<std::size_t>();
    forest.hyperparams.max_features = hp.at("max_features").get<std::string>();
    forest.bias = doc.at("bias").get<double>();
    forest.seed = doc.at("seed").get<std::uint64_t>();
    for (const json& tj : doc.at("trees")) {
      Tree tree;
      for (const json& nj : tj) {
        if (!nj.is_array() || nj.size() != 7) throw ModelFormatError("bad node record in " + path);
        TreeNode node;
        node.feature = nj[0].get<std::int32_t>();
        node.threshold = nj[1].get<double>();
        node.left = nj[2].get<std::int32_t>();
        node.right = nj[3].get<std::int32_t>();
        node.value = nj[4].get<double>();
        node.n = nj[5].get<std::int64_t>();
        node.impurity = nj[6].get<double>();
        tree.nodes.push_back(node);
      }
      if (tree.nodes.empty()) throw ModelFormatError("empty tree in " + path);
      forest.trees.push_back(std::move(tree));
    }
    if (forest.trees.empty()) throw ModelFormatError("no trees in " + path);
    return forest;
  } catch (const json::exception& e) {
    throw ModelFormatError("corrupt model file " + path + ": " + e.what());
  }
}

}  // namespace dhira::forest
