#include "defect_reasoner/analysis.hpp"

#include "defect_reasoner/defchar.hpp"
#include "defect_reasoner/errors.hpp"

#include <algorithm>
#include <cmath>

namespace defect_reasoner {

namespace {

void climb_tree(const DecisionTree& tree, int tree_index, int node_index,
                std::vector<NodeRecord>& out) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
    if (node.is_leaf()) {
        return;
    }
    const TreeNode& tchild = tree.nodes[static_cast<std::size_t>(node.true_child)];
    const TreeNode& fchild = tree.nodes[static_cast<std::size_t>(node.false_child)];
    out.push_back({tree_index, node.feature, node.threshold, node.n1, node.n0, tchild.n1,
                   tchild.n0, fchild.n1, fchild.n0});
    climb_tree(tree, tree_index, node.true_child, out);
    climb_tree(tree, tree_index, node.false_child, out);
}

} // namespace

std::vector<NodeRecord> climb_forest(const Forest& forest) {
    std::vector<NodeRecord> records;
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
        climb_tree(forest.trees[t], static_cast<int>(t), 0, records);
    }
    return records;
}

std::string to_string(DecisionDegree deg) {
    switch (deg) {
    case DecisionDegree::empty: return "empty";
    case DecisionDegree::weak: return "weak";
    case DecisionDegree::middle: return "middle";
    case DecisionDegree::strong: return "strong";
    case DecisionDegree::full: return "full";
    }
    throw ReasonerError("unknown decision degree");
}

std::string to_string(SplitStatus sta) {
    switch (sta) {
    case SplitStatus::confirmation: return "confirmation";
    case SplitStatus::half_reduction: return "half_reduction";
    case SplitStatus::reduction: return "reduction";
    }
    throw ReasonerError("unknown split status");
}

NodeAnalysis analyse_node(const NodeRecord& record, std::int64_t total_samples) {
    if (record.n1 < 1 || record.n0 < 1) {
        throw ReasonerError("analyse_node: node is pure in the target");
    }
    if (record.tc1 + record.fc1 != record.n1 || record.tc0 + record.fc0 != record.n0) {
        throw ReasonerError("analyse_node: child counts do not add up to the node counts");
    }
    if (total_samples < record.n1 + record.n0) {
        throw ReasonerError("analyse_node: total sample count smaller than the node");
    }

    const double n1 = static_cast<double>(record.n1);
    const double n0 = static_cast<double>(record.n0);
    const double tc1 = static_cast<double>(record.tc1);
    const double tc0 = static_cast<double>(record.tc0);
    const double fc1 = static_cast<double>(record.fc1);
    const double fc0 = static_cast<double>(record.fc0);

    NodeAnalysis a;
    a.tree_index = record.tree_index;
    a.feature = record.feature;
    a.threshold = record.threshold;

    a.ds = 0.5 * (std::fabs((tc1 - fc1) / n1) + std::fabs((tc0 - fc0) / n0));
    a.ts = std::fabs(tc1 / n1 - tc0 / n0);
    const double ts_alt = std::fabs(fc1 / n1 - fc0 / n0);
    if (std::fabs(a.ts - ts_alt) > 1e-12) {
        throw ReasonerError("analyse_node: the two separation-score forms disagree");
    }
    a.u = static_cast<double>(record.n1 + record.n0) / static_cast<double>(total_samples);

    if (a.ts == 0.0) {
        a.deg = DecisionDegree::empty;
        a.b_deg = 0.0;
    } else if (a.ts < 0.25) {
        a.deg = DecisionDegree::weak;
        a.b_deg = 0.1;
    } else if (a.ts < 0.5) {
        a.deg = DecisionDegree::middle;
        a.b_deg = 0.2;
    } else if (a.ts < 1.0) {
        a.deg = DecisionDegree::strong;
        a.b_deg = 0.3;
    } else {
        a.deg = DecisionDegree::full;
        a.b_deg = 0.5;
    }

    // Condition order matters: a node emptying one class counts as a
    // confirmation even when a half-reduction condition also holds.
    if (record.tc1 == 0 || record.tc0 == 0) {
        a.sta = SplitStatus::confirmation;
        a.b_sta = 0.5;
    } else if (record.tc1 == record.fc1 || record.tc0 == record.fc0) {
        a.sta = SplitStatus::half_reduction;
        a.b_sta = 0.2;
    } else {
        a.sta = SplitStatus::reduction;
        a.b_sta = 0.0;
    }

    a.idx = a.u * ((1.0 + a.ds) * a.ts + a.b_deg + a.b_sta);
    a.dir = record.tc1 >= record.fc1;
    return a;
}

std::vector<NodeAnalysis> analyse_forest(std::span<const NodeRecord> records,
                                         std::int64_t total_samples) {
    std::vector<NodeAnalysis> analyses;
    analyses.reserve(records.size());
    for (const NodeRecord& record : records) {
        analyses.push_back(analyse_node(record, total_samples));
    }
    return analyses;
}

DefCharSummary summarise_forest(std::span<const NodeAnalysis> analyses,
                                const Forest& forest,
                                std::span<const std::pair<double, double>> scaling) {
    const std::size_t n_columns = forest.column_names.size();
    if (scaling.size() != n_columns) {
        throw ReasonerError("summarise_forest: scaling size does not match column count");
    }
    if (analyses.empty()) {
        throw ReasonerError("summarise_forest: no analysed nodes");
    }

    struct Accumulator {
        double idx_sum = 0.0;
        double weighted_lower = 0.0;
        double weighted_upper = 0.0;
        double plain_lower = 0.0;
        double plain_upper = 0.0;
        std::size_t count = 0;
        std::size_t dir_true = 0;
    };
    std::vector<Accumulator> acc(n_columns);
    for (const NodeAnalysis& a : analyses) {
        if (a.feature < 0 || static_cast<std::size_t>(a.feature) >= n_columns) {
            throw ReasonerError("summarise_forest: analysis references an unknown column");
        }
        Accumulator& slot = acc[static_cast<std::size_t>(a.feature)];
        const double lower = a.dir ? 0.0 : a.threshold;
        const double upper = a.dir ? a.threshold : 1.0;
        slot.idx_sum += a.idx;
        slot.weighted_lower += a.idx * lower;
        slot.weighted_upper += a.idx * upper;
        slot.plain_lower += lower;
        slot.plain_upper += upper;
        slot.count += 1;
        slot.dir_true += a.dir ? 1 : 0;
    }

    DefCharSummary summary;
    summary.n_trees = forest.params.n_trees;
    summary.features.resize(n_columns);
    for (std::size_t col = 0; col < n_columns; ++col) {
        FeatureSummary& f = summary.features[col];
        f.name = forest.column_names[col];
        f.column = col;
        const Accumulator& slot = acc[col];
        f.node_count = slot.count;
        if (slot.count == 0) {
            continue;
        }
        f.dis = slot.idx_sum / static_cast<double>(slot.count);
        f.duf = static_cast<double>(slot.count) / static_cast<double>(forest.params.n_trees);
        f.dos = (3.0 * f.dis + f.duf) / 4.0;

        double lower_scaled, upper_scaled;
        if (slot.idx_sum > 0.0) {
            lower_scaled = slot.weighted_lower / slot.idx_sum;
            upper_scaled = slot.weighted_upper / slot.idx_sum;
        } else {
            // All importances zero: fall back to the unweighted mean.
            lower_scaled = slot.plain_lower / static_cast<double>(slot.count);
            upper_scaled = slot.plain_upper / static_cast<double>(slot.count);
        }
        DerInterval der;
        der.lower = unscale_value(lower_scaled, scaling[col]);
        der.upper = unscale_value(upper_scaled, scaling[col]);
        der.towards_lower = slot.dir_true * 2 >= slot.count;
        f.der = der;
    }
    return summary;
}

std::vector<std::size_t> rank_by_dos(const DefCharSummary& summary) {
    std::vector<std::size_t> order(summary.features.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        order[k] = k;
    }
    std::sort(order.begin(), order.end(), [&summary](std::size_t a, std::size_t b) {
        const FeatureSummary& fa = summary.features[a];
        const FeatureSummary& fb = summary.features[b];
        if (fa.dos != fb.dos) {
            return fa.dos > fb.dos;
        }
        return fa.name < fb.name;
    });
    return order;
}

} // namespace defect_reasoner
