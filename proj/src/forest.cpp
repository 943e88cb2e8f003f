#include "defect_reasoner/forest.hpp"

#include "defect_reasoner/errors.hpp"
#include "defect_reasoner/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace defect_reasoner {

int DecisionTree::predict(std::span<const double> row) const {
    int idx = 0;
    while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
        const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
        idx = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.true_child
                                                                            : node.false_child;
    }
    const TreeNode& leaf = nodes[static_cast<std::size_t>(idx)];
    return leaf.n1 > leaf.n0 ? 1 : 0;
}

namespace {

double gini(std::int64_t n1, std::int64_t n0) {
    const double total = static_cast<double>(n1 + n0);
    const double p1 = static_cast<double>(n1) / total;
    const double p0 = static_cast<double>(n0) / total;
    return 1.0 - p1 * p1 - p0 * p0;
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = -1.0;
};

struct TreeBuilder {
    const FeatureMatrix& rows;
    const std::vector<int>& targets;
    const TreeParams& params;
    std::size_t n_columns;
    std::mt19937_64 rng;
    std::vector<TreeNode> nodes;

    // Scratch: (value, target) pairs of the current node, reused across columns.
    std::vector<std::pair<double, int>> sorted;

    // Best split over one column within the node's samples; candidates are
    // midpoints between consecutive distinct values that leave at least
    // min_leaf samples on each side. Equal-gain candidates are resolved
    // uniformly at random (reservoir rule) so equally informative features
    // share the work across the ensemble.
    bool best_split_for_column(const std::vector<std::size_t>& indices, std::size_t col,
                               double parent_gini, SplitChoice& best, std::int64_t& tie_count) {
        sorted.clear();
        sorted.reserve(indices.size());
        for (std::size_t idx : indices) {
            sorted.emplace_back(rows[idx][col], targets[idx]);
        }
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        const auto n = static_cast<std::int64_t>(sorted.size());
        std::int64_t total1 = 0;
        for (const auto& [value, target] : sorted) {
            total1 += target;
        }
        const std::int64_t total0 = n - total1;

        bool found = false;
        std::int64_t left1 = 0;
        std::int64_t left0 = 0;
        for (std::int64_t i = 0; i + 1 < n; ++i) {
            left1 += sorted[static_cast<std::size_t>(i)].second;
            left0 += 1 - sorted[static_cast<std::size_t>(i)].second;
            const double lo = sorted[static_cast<std::size_t>(i)].first;
            const double hi = sorted[static_cast<std::size_t>(i) + 1].first;
            if (lo == hi) {
                continue;
            }
            const std::int64_t left_n = i + 1;
            const std::int64_t right_n = n - left_n;
            if (left_n < params.min_leaf || right_n < params.min_leaf) {
                continue;
            }
            double threshold = 0.5 * (lo + hi);
            if (threshold == hi) {
                threshold = lo; // adjacent representable values
            }
            const double weighted =
                (static_cast<double>(left_n) * gini(left1, left0) +
                 static_cast<double>(right_n) * gini(total1 - left1, total0 - left0)) /
                static_cast<double>(n);
            const double gain = parent_gini - weighted;
            found = true;
            if (gain > best.gain) {
                best = {static_cast<int>(col), threshold, gain};
                tie_count = 1;
            } else if (gain == best.gain) {
                ++tie_count;
                if (uniform_index(rng, static_cast<std::size_t>(tie_count)) == 0) {
                    best.feature = static_cast<int>(col);
                    best.threshold = threshold;
                }
            }
        }
        return found;
    }

    // Walks a fresh random feature order and evaluates splittable columns
    // until feature_subset_size of them have been seen; columns that are
    // constant within the node do not count against the budget, so an
    // impure node always finds a split if any column allows one.
    SplitChoice choose_split(const std::vector<std::size_t>& indices, std::int64_t n1,
                             std::int64_t n0) {
        std::vector<std::size_t> order(n_columns);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n_columns; i > 1; --i) {
            std::swap(order[i - 1], order[uniform_index(rng, i)]);
        }
        const std::size_t budget =
            std::min<std::size_t>(n_columns, static_cast<std::size_t>(std::max(
                                                 1, params.feature_subset_size)));
        const double parent = gini(n1, n0);
        SplitChoice best;
        std::int64_t tie_count = 0;
        std::size_t evaluated = 0;
        for (std::size_t col : order) {
            if (best_split_for_column(indices, col, parent, best, tie_count)) {
                ++evaluated;
                if (evaluated >= budget) {
                    break;
                }
            }
        }
        return best;
    }

    int build(std::vector<std::size_t>&& indices, int depth) {
        std::int64_t n1 = 0;
        for (std::size_t idx : indices) {
            n1 += targets[idx];
        }
        const std::int64_t n0 = static_cast<std::int64_t>(indices.size()) - n1;

        const int node_index = static_cast<int>(nodes.size());
        nodes.push_back(TreeNode{-1, 0.0, n1, n0, -1, -1, depth});

        const bool depth_ok = params.max_depth < 0 || depth < params.max_depth;
        if (n1 == 0 || n0 == 0 || !depth_ok ||
            static_cast<std::int64_t>(indices.size()) < params.min_split) {
            return node_index;
        }
        const SplitChoice split = choose_split(indices, n1, n0);
        if (split.feature < 0) {
            return node_index;
        }

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (std::size_t idx : indices) {
            if (rows[idx][static_cast<std::size_t>(split.feature)] <= split.threshold) {
                left.push_back(idx);
            } else {
                right.push_back(idx);
            }
        }
        indices.clear();
        indices.shrink_to_fit();

        nodes[static_cast<std::size_t>(node_index)].feature = split.feature;
        nodes[static_cast<std::size_t>(node_index)].threshold = split.threshold;
        const int true_child = build(std::move(left), depth + 1);
        nodes[static_cast<std::size_t>(node_index)].true_child = true_child;
        const int false_child = build(std::move(right), depth + 1);
        nodes[static_cast<std::size_t>(node_index)].false_child = false_child;
        return node_index;
    }
};

} // namespace

Forest plant_forest(const FeatureMatrix& rows,
                    const std::vector<int>& targets,
                    const TreeParams& params,
                    std::vector<std::string> column_names,
                    int jobs) {
    if (rows.empty()) {
        throw ReasonerError("plant_forest: empty feature matrix");
    }
    if (rows.size() != targets.size()) {
        throw ReasonerError("plant_forest: matrix and target sizes differ");
    }
    const std::size_t n_columns = rows[0].size();
    if (n_columns == 0 || n_columns != column_names.size()) {
        throw ReasonerError("plant_forest: column names do not match matrix width");
    }
    for (const auto& row : rows) {
        if (row.size() != n_columns) {
            throw ReasonerError("plant_forest: ragged feature matrix");
        }
    }
    const std::int64_t positives = std::accumulate(targets.begin(), targets.end(), std::int64_t{0});
    if (positives == 0 || positives == static_cast<std::int64_t>(targets.size())) {
        throw ReasonerError("plant_forest: target vector contains a single class");
    }
    if (params.n_trees < 1 || params.min_split < 2 || params.min_leaf < 1) {
        throw ReasonerError("plant_forest: invalid tree parameters");
    }

    Forest forest;
    forest.params = params;
    forest.column_names = std::move(column_names);
    forest.trees.resize(static_cast<std::size_t>(params.n_trees));
    parallel_for(static_cast<std::size_t>(params.n_trees), jobs, [&](std::size_t t) {
        TreeBuilder builder{rows, targets, params, n_columns,
                            std::mt19937_64{derive_seed(params.seed, t)}, {}, {}};
        std::vector<std::size_t> all(rows.size());
        std::iota(all.begin(), all.end(), 0);
        builder.build(std::move(all), 0);
        forest.trees[t].nodes = std::move(builder.nodes);
    });
    return forest;
}

ValidationReport validate_forest(const Forest& forest,
                                 const FeatureMatrix& rows,
                                 const std::vector<int>& targets) {
    if (rows.size() != targets.size()) {
        throw ReasonerError("validate_forest: matrix and target sizes differ");
    }
    for (const auto& row : rows) {
        if (row.size() != forest.column_names.size()) {
            throw ReasonerError("validate_forest: column count differs from the trained forest");
        }
    }
    ValidationReport report;
    report.per_tree.reserve(forest.trees.size());
    double score_sum = 0.0;
    for (const DecisionTree& tree : forest.trees) {
        std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const int predicted = tree.predict(rows[r]);
            if (targets[r] == 1) {
                (predicted == 1 ? tp : fn) += 1;
            } else {
                (predicted == 0 ? tn : fp) += 1;
            }
        }
        if (tp + fn == 0 || tn + fp == 0) {
            throw ReasonerError("validate_forest: target vector contains a single class");
        }
        const double tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
        const double tnr = static_cast<double>(tn) / static_cast<double>(tn + fp);
        report.per_tree.emplace_back(tpr, tnr);
        score_sum += (tpr + tnr) / 2.0;
    }
    report.learning_score = score_sum / static_cast<double>(forest.trees.size());
    return report;
}

namespace {

nlohmann::json node_to_json(const DecisionTree& tree, int index,
                            const std::vector<std::string>& columns) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
    nlohmann::json out;
    out["n1"] = node.n1;
    out["n0"] = node.n0;
    if (!node.is_leaf()) {
        out["feature"] = columns[static_cast<std::size_t>(node.feature)];
        out["threshold"] = node.threshold;
        out["true_child"] = node_to_json(tree, node.true_child, columns);
        out["false_child"] = node_to_json(tree, node.false_child, columns);
    }
    return out;
}

int node_from_json(const nlohmann::json& doc, DecisionTree& tree,
                   const std::vector<std::string>& columns, int depth) {
    TreeNode node;
    node.n1 = doc.at("n1").get<std::int64_t>();
    node.n0 = doc.at("n0").get<std::int64_t>();
    node.depth = depth;
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);
    if (doc.contains("feature")) {
        const std::string name = doc.at("feature").get<std::string>();
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) {
            throw ReasonerError("forest JSON references unknown column: " + name);
        }
        tree.nodes[static_cast<std::size_t>(index)].feature =
            static_cast<int>(it - columns.begin());
        tree.nodes[static_cast<std::size_t>(index)].threshold =
            doc.at("threshold").get<double>();
        const int true_child = node_from_json(doc.at("true_child"), tree, columns, depth + 1);
        tree.nodes[static_cast<std::size_t>(index)].true_child = true_child;
        const int false_child = node_from_json(doc.at("false_child"), tree, columns, depth + 1);
        tree.nodes[static_cast<std::size_t>(index)].false_child = false_child;
    }
    return index;
}

} // namespace

nlohmann::json forest_to_json(const Forest& forest) {
    nlohmann::json out;
    out["format_version"] = 1;
    out["params"] = {{"max_depth", forest.params.max_depth},
                     {"min_split", forest.params.min_split},
                     {"min_leaf", forest.params.min_leaf},
                     {"n_trees", forest.params.n_trees},
                     {"feature_subset_size", forest.params.feature_subset_size},
                     {"seed", forest.params.seed}};
    out["columns"] = forest.column_names;
    nlohmann::json trees = nlohmann::json::array();
    for (const DecisionTree& tree : forest.trees) {
        trees.push_back(node_to_json(tree, 0, forest.column_names));
    }
    out["trees"] = std::move(trees);
    return out;
}

Forest forest_from_json(const nlohmann::json& doc) {
    Forest forest;
    const auto& params = doc.at("params");
    forest.params.max_depth = params.at("max_depth").get<int>();
    forest.params.min_split = params.at("min_split").get<int>();
    forest.params.min_leaf = params.at("min_leaf").get<int>();
    forest.params.n_trees = params.at("n_trees").get<int>();
    forest.params.feature_subset_size = params.at("feature_subset_size").get<int>();
    forest.params.seed = params.at("seed").get<std::uint64_t>();
    forest.column_names = doc.at("columns").get<std::vector<std::string>>();
    for (const auto& tree_doc : doc.at("trees")) {
        DecisionTree tree;
        node_from_json(tree_doc, tree, forest.column_names, 0);
        forest.trees.push_back(std::move(tree));
    }
    if (static_cast<int>(forest.trees.size()) != forest.params.n_trees) {
        throw ReasonerError("forest JSON tree count disagrees with params.n_trees");
    }
    return forest;
}

} // namespace defect_reasoner
