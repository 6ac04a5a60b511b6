#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dhira::forest {

// Row-major feature matrix with aligned regression targets in [0,5].
struct Dataset {
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<double> targets;

  std::size_t rows() const { return cols == 0 ? 0 : values.size() / cols; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  void add_row(std::span<const double> x, double y);
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;   // mean target of the training rows routed here
  std::int64_t n = 0;   // rows reaching the node
  double impurity = 0.0;  // variance of targets at the node
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  const TreeNode& root() const { return nodes.front(); }
};

struct TreeParams {
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_samples_leaf = 1;
  std::string max_features = "all";  // "sqrt" | "third" | "all" | integer
};

struct Hyperparams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;
  std::size_t min_samples_leaf = 1;
  std::string max_features = "sqrt";

  TreeParams tree_params() const { return {max_depth, min_samples_leaf, max_features}; }
  bool operator==(const Hyperparams&) const = default;
};

std::size_t resolve_max_features(const std::string& spec, std::size_t n_features);

struct Forest {
  std::vector<Tree> trees;
  std::vector<std::string> feature_names;
  double bias = 0.0;  // training-set mean target
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
};

// Greedy CART on variance reduction over a per-node random feature subset.
// No bootstrap: the tree sees every row once.
Tree fit_tree(const Dataset& data, const TreeParams& params, std::uint64_t seed);

// Bootstrap-resampled ensemble; per-tree seeds derive from the master seed
// through derive_seed(seed, tree_index), so training parallelizes without
// changing results.
Forest fit_forest(const Dataset& data, const Hyperparams& params, std::uint64_t seed,
                  std::vector<std::string> feature_names = {});

double predict(const Forest& forest, std::span<const double> x);
std::vector<double> predict(const Forest& forest, const Dataset& data);

// Checked variant: the caller's feature names must match the model's
// contract order exactly; throws ModelContractError otherwise.
std::vector<double> predict_checked(const Forest& forest, const Dataset& data,
                                    std::span<const std::string> feature_names);

// Mean-decrease-impurity importance, normalized to sum to 1. A forest with
// no splits anywhere returns all zeros.
std::vector<double> importance(const Forest& forest);

struct ContributionBreakdown {
  double bias = 0.0;  // mean of per-tree root means
  std::vector<double> contributions;
  double prediction = 0.0;
};

// Root-to-leaf decomposition: each step credits (child mean - parent mean)
// to the split feature; bias + sum(contributions) telescopes to the
// prediction.
ContributionBreakdown contributions(const Forest& forest, std::span<const double> x);

struct GridSearchResult {
  std::vector<Hyperparams> candidates;
  std::vector<double> mean_rho;  // aligned with candidates
  Hyperparams best;
  std::vector<std::size_t> fold_assignment;  // per training row
};

// Seeded stratified folds (targets binned at width 1); per-candidate mean
// validation Spearman's rho; ties prefer fewer trees, then shallower depth.
GridSearchResult grid_search(const Dataset& data, std::span<const Hyperparams> grid,
                             std::size_t folds, std::uint64_t seed);

std::vector<Hyperparams> default_grid();

// Grid file: `key=value[,value...]` lines for n_trees, max_depth (0 =
// unlimited), min_samples_leaf, max_features.
std::vector<Hyperparams> parse_grid(std::string_view text);

// model.json persistence; full-precision floats for bit-stable round trips.
void save_model(const std::string& path, const Forest& forest);
Forest load_model(const std::string& path);

}  // namespace dhira::forest
