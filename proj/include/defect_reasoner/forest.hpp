#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace defect_reasoner {

struct TreeParams {
    int max_depth = -1;          // -1: unlimited
    int min_split = 2;           // minimum samples in a node to split it
    int min_leaf = 1;            // minimum samples in each child
    int n_trees = 200;
    int feature_subset_size = 7; // features considered per split, clamped to the column count
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1; // -1: leaf
    double threshold = 0.0;
    std::int64_t n1 = 0; // samples with target 1 reaching this node
    std::int64_t n0 = 0;
    int true_child = -1;  // receives samples with value <= threshold
    int false_child = -1;
    int depth = 0;

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // root at index 0, pre-order (true child first)

    int predict(std::span<const double> row) const;
};

struct Forest {
    std::vector<DecisionTree> trees;
    TreeParams params;
    std::vector<std::string> column_names;
};

using FeatureMatrix = std::vector<std::vector<double>>;

// Grows `n_trees` CART trees on the full dataset. Diversity comes from a
// random feature subset per split and randomised equal-gain tie breaks;
// each tree's generator is seeded from (seed, tree index) so parallel and
// serial training agree. Throws ReasonerError on an empty matrix or a
// single-class target.
Forest plant_forest(const FeatureMatrix& rows,
                    const std::vector<int>& targets,
                    const TreeParams& params,
                    std::vector<std::string> column_names,
                    int jobs = 1);

struct ValidationReport {
    std::vector<std::pair<double, double>> per_tree; // (tpr, tnr)
    double learning_score = 0.0;                     // mean of (tpr + tnr) / 2
};

// Re-evaluates every tree on the data it was trained on.
ValidationReport validate_forest(const Forest& forest,
                                 const FeatureMatrix& rows,
                                 const std::vector<int>& targets);

nlohmann::json forest_to_json(const Forest& forest);
Forest forest_from_json(const nlohmann::json& doc);

} // namespace defect_reasoner
