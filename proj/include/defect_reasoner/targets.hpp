#pragma once

#include "defect_reasoner/dataset.hpp"
#include "defect_reasoner/geometry.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace defect_reasoner {

// Intersection-over-union of two regions on the shared pixel grid
// (pixel-centre rasterisation over the joint bounding box). Returns 0
// when the union rasterises to no pixels.
double polygon_iou(const Polygon& a, const Polygon& b);

struct MatchPair {
    std::size_t truth_index = 0;
    std::size_t pred_index = 0;
    double iou = 0.0;
};

// One-to-one assignment between true and predicted defects.
struct Matching {
    std::vector<MatchPair> pairs;
    std::vector<std::size_t> unmatched_true;
    std::vector<std::size_t> unmatched_pred;
};

// Greedy matching: candidate pairs with iou >= threshold are taken in
// descending iou order (ties: lower truth index, then lower prediction
// index); a pair is accepted only while both sides are unassigned.
Matching match_defects(const std::vector<GroundTruthDefect>& truths,
                       const std::vector<PredictedDefect>& predictions,
                       double iou_threshold);

enum class ReasoningTask { detection, classification, joint };

std::string to_string(ReasoningTask task);
ReasoningTask reasoning_task_from_string(const std::string& name);

// Binary outcome vectors over the true defects:
//   c  - detected, d  - undetected,
//   cp - correctly classified, dp - misclassified.
// Which vectors are populated depends on the task.
struct ReasoningTargets {
    ReasoningTask task = ReasoningTask::detection;
    std::vector<int> c, d, cp, dp;
};

ReasoningTargets detection_targets(const Matching& matching, std::size_t true_count);

// Requires as many predictions as truths and a complete one-to-one
// matching (classification assumes every defect was already located).
ReasoningTargets classification_targets(const Matching& matching,
                                        const std::vector<GroundTruthDefect>& truths,
                                        const std::vector<PredictedDefect>& predictions);

ReasoningTargets joint_targets(const Matching& matching,
                               const std::vector<GroundTruthDefect>& truths,
                               const std::vector<PredictedDefect>& predictions);

// Per-image matching plus targets concatenated in dataset iteration order,
// row-aligned with the feature matrix.
struct DatasetTargets {
    ReasoningTargets combined;
    std::vector<Matching> per_image;
};

// Matching is independent per image; `jobs` > 1 fans it out without
// changing the result.
DatasetTargets dataset_targets(const DefectDataset& dataset,
                               double iou_threshold,
                               ReasoningTask task,
                               int jobs = 1);

} // namespace defect_reasoner
