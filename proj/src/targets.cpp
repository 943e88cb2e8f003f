#include "defect_reasoner/targets.hpp"

#include "defect_reasoner/errors.hpp"
#include "defect_reasoner/util.hpp"

#include <algorithm>
#include <cmath>

namespace defect_reasoner {

double polygon_iou(const Polygon& a, const Polygon& b) {
    const BBox ba = bounding_box(a);
    const BBox bb = bounding_box(b);
    const int x0 = static_cast<int>(std::floor(std::min(ba.min_x, bb.min_x))) - 1;
    const int y0 = static_cast<int>(std::floor(std::min(ba.min_y, bb.min_y))) - 1;
    const int x1 = static_cast<int>(std::ceil(std::max(ba.max_x, bb.max_x))) + 1;
    const int y1 = static_cast<int>(std::ceil(std::max(ba.max_y, bb.max_y))) + 1;
    std::int64_t intersection = 0;
    std::int64_t union_count = 0;
    for (int py = y0; py < y1; ++py) {
        for (int px = x0; px < x1; ++px) {
            const bool in_a = pixel_center_inside(a, px, py);
            const bool in_b = pixel_center_inside(b, px, py);
            if (in_a && in_b) {
                ++intersection;
            }
            if (in_a || in_b) {
                ++union_count;
            }
        }
    }
    if (union_count == 0) {
        return 0.0;
    }
    return static_cast<double>(intersection) / static_cast<double>(union_count);
}

Matching match_defects(const std::vector<GroundTruthDefect>& truths,
                       const std::vector<PredictedDefect>& predictions,
                       double iou_threshold) {
    if (!(iou_threshold > 0.0) || iou_threshold > 1.0) {
        throw TargetsError("iou threshold must be in (0, 1]");
    }
    std::vector<MatchPair> candidates;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        for (std::size_t j = 0; j < predictions.size(); ++j) {
            const double iou = polygon_iou(truths[i].region, predictions[j].region);
            if (iou >= iou_threshold) {
                candidates.push_back({i, j, iou});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const MatchPair& a, const MatchPair& b) {
        if (a.iou != b.iou) {
            return a.iou > b.iou;
        }
        if (a.truth_index != b.truth_index) {
            return a.truth_index < b.truth_index;
        }
        return a.pred_index < b.pred_index;
    });

    Matching matching;
    std::vector<bool> truth_taken(truths.size(), false);
    std::vector<bool> pred_taken(predictions.size(), false);
    for (const MatchPair& cand : candidates) {
        if (!truth_taken[cand.truth_index] && !pred_taken[cand.pred_index]) {
            truth_taken[cand.truth_index] = true;
            pred_taken[cand.pred_index] = true;
            matching.pairs.push_back(cand);
        }
    }
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (!truth_taken[i]) {
            matching.unmatched_true.push_back(i);
        }
    }
    for (std::size_t j = 0; j < predictions.size(); ++j) {
        if (!pred_taken[j]) {
            matching.unmatched_pred.push_back(j);
        }
    }
    return matching;
}

std::string to_string(ReasoningTask task) {
    switch (task) {
    case ReasoningTask::detection: return "detection";
    case ReasoningTask::classification: return "classification";
    case ReasoningTask::joint: return "joint";
    }
    throw TargetsError("unknown reasoning task");
}

ReasoningTask reasoning_task_from_string(const std::string& name) {
    if (name == "detection") return ReasoningTask::detection;
    if (name == "classification") return ReasoningTask::classification;
    if (name == "joint") return ReasoningTask::joint;
    throw ConfigError("unknown task '" + name + "' (expected detection, classification or joint)");
}

ReasoningTargets detection_targets(const Matching& matching, std::size_t true_count) {
    ReasoningTargets targets;
    targets.task = ReasoningTask::detection;
    targets.c.assign(true_count, 0);
    targets.d.assign(true_count, 1);
    for (const MatchPair& pair : matching.pairs) {
        if (pair.truth_index >= true_count) {
            throw TargetsError("matching references truth index out of range");
        }
        targets.c[pair.truth_index] = 1;
        targets.d[pair.truth_index] = 0;
    }
    return targets;
}

ReasoningTargets classification_targets(const Matching& matching,
                                        const std::vector<GroundTruthDefect>& truths,
                                        const std::vector<PredictedDefect>& predictions) {
    if (truths.size() != predictions.size() || matching.pairs.size() != truths.size()) {
        throw TargetsError(
            "classification targets need equally many truths and predictions, all matched");
    }
    ReasoningTargets targets;
    targets.task = ReasoningTask::classification;
    targets.cp.assign(truths.size(), 0);
    targets.dp.assign(truths.size(), 0);
    for (const MatchPair& pair : matching.pairs) {
        const bool correct =
            truths[pair.truth_index].label == predictions[pair.pred_index].label;
        targets.cp[pair.truth_index] = correct ? 1 : 0;
        targets.dp[pair.truth_index] = correct ? 0 : 1;
    }
    return targets;
}

ReasoningTargets joint_targets(const Matching& matching,
                               const std::vector<GroundTruthDefect>& truths,
                               const std::vector<PredictedDefect>& predictions) {
    ReasoningTargets targets;
    targets.task = ReasoningTask::joint;
    targets.c.assign(truths.size(), 0);
    targets.d.assign(truths.size(), 1);
    targets.cp.assign(truths.size(), 0);
    targets.dp.assign(truths.size(), 0);
    for (const MatchPair& pair : matching.pairs) {
        targets.c[pair.truth_index] = 1;
        targets.d[pair.truth_index] = 0;
        const bool correct =
            truths[pair.truth_index].label == predictions[pair.pred_index].label;
        targets.cp[pair.truth_index] = correct ? 1 : 0;
        targets.dp[pair.truth_index] = correct ? 0 : 1;
    }
    return targets;
}

namespace {

void append(std::vector<int>& dst, const std::vector<int>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

} // namespace

DatasetTargets dataset_targets(const DefectDataset& dataset,
                               double iou_threshold,
                               ReasoningTask task,
                               int jobs) {
    DatasetTargets out;
    out.combined.task = task;
    out.per_image.resize(dataset.entries.size());
    std::vector<ReasoningTargets> per_image_targets(dataset.entries.size());
    parallel_for(dataset.entries.size(), jobs, [&](std::size_t k) {
        const DatasetEntry& entry = dataset.entries[k];
        Matching matching = match_defects(entry.truths, entry.predictions, iou_threshold);
        switch (task) {
        case ReasoningTask::detection:
            per_image_targets[k] = detection_targets(matching, entry.truths.size());
            break;
        case ReasoningTask::classification:
            per_image_targets[k] =
                classification_targets(matching, entry.truths, entry.predictions);
            break;
        case ReasoningTask::joint:
            per_image_targets[k] = joint_targets(matching, entry.truths, entry.predictions);
            break;
        }
        out.per_image[k] = std::move(matching);
    });
    for (const ReasoningTargets& targets : per_image_targets) {
        append(out.combined.c, targets.c);
        append(out.combined.d, targets.d);
        append(out.combined.cp, targets.cp);
        append(out.combined.dp, targets.dp);
    }
    return out;
}

} // namespace defect_reasoner
