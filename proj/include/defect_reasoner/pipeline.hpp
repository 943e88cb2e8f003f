#pragma once

#include "defect_reasoner/defchar.hpp"
#include "defect_reasoner/forest.hpp"
#include "defect_reasoner/targets.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace defect_reasoner {

// Which outcome vector a forest is trained on.
enum class TargetKind { c, d, c_prime, d_prime };

std::string target_file_name(TargetKind kind);   // C, D, C_prime, D_prime
std::string target_display_name(TargetKind kind); // C, D, C', D'
TargetKind target_kind_from_string(const std::string& name);

struct RunConfig {
    std::filesystem::path images_dir;
    std::filesystem::path annotations_path;
    std::filesystem::path predictions_path;
    std::filesystem::path output_dir;
    double iou_threshold = 0.5;
    TreeParams tree;
    ReasoningTask task = ReasoningTask::joint;
    std::vector<TargetKind> targets = {TargetKind::c, TargetKind::d, TargetKind::c_prime,
                                       TargetKind::d_prime};
    FeatureCombination combination = FeatureCombination::all;
    int jobs = 1;
};

struct TargetRunResult {
    TargetKind target = TargetKind::c;
    double learning_score = 0.0;
    std::string validation_line;
    std::size_t charts_written = 0;
};

struct PipelineResult {
    std::size_t image_count = 0;
    std::size_t defect_count = 0;
    std::size_t prediction_count = 0;
    std::vector<TargetRunResult> targets;
};

// Full run: ingest -> matching/targets -> characteristic matrix -> one
// forest per requested target -> charts, Markdown report, JSON summary and
// forest dump under output_dir. Prints one validation line per target to
// `log`. Errors are rethrown tagged with the failing stage.
PipelineResult run_pipeline(const RunConfig& config, std::ostream& log);

// Ingest + extraction only; writes the raw and scaled CSVs.
struct ExtractResult {
    std::size_t rows = 0;
    std::filesystem::path raw_csv;
    std::filesystem::path scaled_csv;
};
ExtractResult extract_only(const RunConfig& config);

struct GridRow {
    int max_depth = -1;
    int min_split = 2;
    int min_leaf = 1;
};

// The eight parameter rows used by the score-table experiments.
std::vector<GridRow> default_grid_rows();

std::vector<GridRow> grid_rows_from_lists(std::span<const int> depths,
                                          std::span<const int> splits,
                                          std::span<const int> leaves);

struct GridResult {
    std::vector<GridRow> rows;
    std::vector<FeatureCombination> combinations;
    // scores[row][combination]: learning score averaged over the selected
    // reasoning targets.
    std::vector<std::vector<double>> scores;
};

// Trains one forest per (parameter row, combination, target) cell and
// averages the learning scores over targets. Cells run in parallel up to
// config.jobs; results are deterministic for a fixed seed. Writes
// grid.csv under output_dir and a table to `log`.
GridResult run_grid(const RunConfig& config,
                    std::span<const GridRow> rows,
                    std::span<const FeatureCombination> combinations,
                    std::ostream& log);

// Stage-tagged wrapper so the CLI can name the failing stage.
struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string stage_name, const std::string& msg)
        : std::runtime_error(msg), stage(std::move(stage_name)) {}
};

} // namespace defect_reasoner
