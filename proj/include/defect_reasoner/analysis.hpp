#pragma once

#include "defect_reasoner/forest.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace defect_reasoner {

// Raw counts of one internal node: its own class totals and how the split
// distributes them over the true child (value <= threshold) and the false
// child.
struct NodeRecord {
    int tree_index = 0;
    int feature = 0;
    double threshold = 0.0;
    std::int64_t n1 = 0, n0 = 0;
    std::int64_t tc1 = 0, tc0 = 0;
    std::int64_t fc1 = 0, fc0 = 0;
};

// Depth-first pre-order walk of every tree (true child first); leaves are
// not emitted.
std::vector<NodeRecord> climb_forest(const Forest& forest);

enum class DecisionDegree { empty, weak, middle, strong, full };
enum class SplitStatus { confirmation, half_reduction, reduction };

std::string to_string(DecisionDegree deg);
std::string to_string(SplitStatus sta);

struct NodeAnalysis {
    int tree_index = 0;
    int feature = 0;
    double threshold = 0.0;
    double ds = 0.0; // split imbalance of the two children, per class
    double ts = 0.0; // class separation achieved by the split
    double u = 0.0;  // fraction of all samples reaching the node
    DecisionDegree deg = DecisionDegree::empty;
    SplitStatus sta = SplitStatus::reduction;
    double b_deg = 0.0;
    double b_sta = 0.0;
    double idx = 0.0; // u * ((1 + ds) * ts + b_deg + b_sta)
    bool dir = true;  // true child holds at least as many target-1 samples
};

// Scores one record against the ensemble's total sample count. The record
// must come from an impure node (n1 >= 1 and n0 >= 1); the two equivalent
// formulations of the separation score are checked against each other at
// runtime.
NodeAnalysis analyse_node(const NodeRecord& record, std::int64_t total_samples);

std::vector<NodeAnalysis> analyse_forest(std::span<const NodeRecord> records,
                                         std::int64_t total_samples);

// Effective value interval of a characteristic, in raw (unscaled) units.
struct DerInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool towards_lower = true; // majority of nodes send target-1 to the <=-branch
};

struct FeatureSummary {
    std::string name;
    std::size_t column = 0; // position within the trained column set
    double dis = 0.0;       // mean node importance
    double duf = 0.0;       // nodes using the feature per tree
    double dos = 0.0;       // (3 * dis + duf) / 4
    std::optional<DerInterval> der;
    std::size_t node_count = 0;
};

struct DefCharSummary {
    std::vector<FeatureSummary> features; // one per trained column, column order
    int n_trees = 0;
};

// Groups the analysed nodes by feature and aggregates the per-feature
// scores. Each node contributes a directed interval ([0, threshold] when
// its target-1 majority sits in the <=-branch, else [threshold, 1], in
// scaled units); interval ends are combined by an importance-weighted
// mean and mapped back to raw units via `scaling`.
DefCharSummary summarise_forest(std::span<const NodeAnalysis> analyses,
                                const Forest& forest,
                                std::span<const std::pair<double, double>> scaling);

// Feature order sorted by dos descending, ties alphabetically by name.
std::vector<std::size_t> rank_by_dos(const DefCharSummary& summary);

} // namespace defect_reasoner
