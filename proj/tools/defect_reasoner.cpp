#include "defect_reasoner/errors.hpp"
#include "defect_reasoner/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace dr = defect_reasoner;

namespace {

struct CliOptions {
    dr::RunConfig config;
    std::string task = "joint";
    std::vector<std::string> targets;
    std::string combination = "all";
    std::vector<int> depths;
    std::vector<int> splits;
    std::vector<int> leaves;
    std::vector<std::string> grid_combinations;
    std::string single_target;
};

void add_data_options(CLI::App* cmd, CliOptions& opts, bool with_predictions) {
    cmd->add_option("--images", opts.config.images_dir, "Directory containing the image files")
        ->required();
    cmd->add_option("--annotations", opts.config.annotations_path,
                    "Ground-truth annotation JSON file")
        ->required();
    if (with_predictions) {
        cmd->add_option("--predictions", opts.config.predictions_path,
                        "Model prediction JSON file")
            ->required();
    }
    cmd->add_option("--out", opts.config.output_dir, "Output directory")->required();
}

void add_reasoning_options(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--iou-threshold", opts.config.iou_threshold,
                    "Minimum IoU for matching a prediction to a true defect")
        ->check(CLI::Range(1e-9, 1.0));
    cmd->add_option("--task", opts.task, "detection, classification or joint");
    cmd->add_option("--combination", opts.combination,
                    "Feature combination: color, shape, meta, color-shape or all");
    cmd->add_option("--trees", opts.config.tree.n_trees, "Number of trees in the ensemble");
    cmd->add_option("--max-depth", opts.config.tree.max_depth,
                    "Maximum tree depth (-1 for unlimited)");
    cmd->add_option("--min-split", opts.config.tree.min_split,
                    "Minimum samples in a node to split it");
    cmd->add_option("--min-leaf", opts.config.tree.min_leaf, "Minimum samples per leaf");
    cmd->add_option("--feature-subset", opts.config.tree.feature_subset_size,
                    "Features considered per split");
    cmd->add_option("--seed", opts.config.tree.seed, "Random seed");
    cmd->add_option("--jobs", opts.config.jobs, "Worker threads");
}

void finalize_config(CliOptions& opts) {
    opts.config.task = dr::reasoning_task_from_string(opts.task);
    opts.config.combination = dr::combination_from_string(opts.combination);
    if (!opts.targets.empty()) {
        opts.config.targets.clear();
        for (const std::string& name : opts.targets) {
            opts.config.targets.push_back(dr::target_kind_from_string(name));
        }
    } else if (opts.config.task == dr::ReasoningTask::detection) {
        opts.config.targets = {dr::TargetKind::c, dr::TargetKind::d};
    } else if (opts.config.task == dr::ReasoningTask::classification) {
        opts.config.targets = {dr::TargetKind::c_prime, dr::TargetKind::d_prime};
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"defect-reasoner: explains mask-based defect detection and classification "
                 "models through morphological defect characteristics"};
    app.set_config("--config", "", "Read options from a key=value config file");
    app.require_subcommand(1);

    CliOptions opts;

    CLI::App* extract = app.add_subcommand(
        "extract", "Extract the defect-characteristic matrix and write raw/scaled CSVs");
    add_data_options(extract, opts, /*with_predictions=*/false);

    CLI::App* reason = app.add_subcommand(
        "reason", "Run the full pipeline for a single reasoning target");
    add_data_options(reason, opts, /*with_predictions=*/true);
    add_reasoning_options(reason, opts);
    reason->add_option("--target", opts.single_target, "Reasoning target: C, D, C' or D'")
        ->required();

    CLI::App* pipeline = app.add_subcommand(
        "pipeline", "Run the full pipeline for every selected reasoning target");
    add_data_options(pipeline, opts, /*with_predictions=*/true);
    add_reasoning_options(pipeline, opts);
    pipeline->add_option("--targets", opts.targets,
                         "Reasoning targets (default: all for the task)");

    CLI::App* grid = app.add_subcommand(
        "grid", "Train forests over a parameter/combination grid and tabulate learning scores");
    add_data_options(grid, opts, /*with_predictions=*/true);
    add_reasoning_options(grid, opts);
    grid->add_option("--targets", opts.targets, "Reasoning targets to average over");
    grid->add_option("--depths", opts.depths, "Max-depth values (-1 for unlimited)");
    grid->add_option("--splits", opts.splits, "Min-split values");
    grid->add_option("--leaves", opts.leaves, "Min-leaf values");
    grid->add_option("--combinations", opts.grid_combinations,
                     "Feature combinations (default: all five)");

    CLI11_PARSE(app, argc, argv);

    try {
        finalize_config(opts);
        if (extract->parsed()) {
            const dr::ExtractResult result = dr::extract_only(opts.config);
            std::cout << "[extract] wrote " << result.raw_csv.filename().string() << " and "
                      << result.scaled_csv.filename().string() << " (" << result.rows
                      << " rows)\n";
        } else if (reason->parsed()) {
            opts.config.targets = {dr::target_kind_from_string(opts.single_target)};
            dr::run_pipeline(opts.config, std::cout);
        } else if (pipeline->parsed()) {
            dr::run_pipeline(opts.config, std::cout);
        } else if (grid->parsed()) {
            std::vector<dr::GridRow> rows;
            if (opts.depths.empty() && opts.splits.empty() && opts.leaves.empty()) {
                rows = dr::default_grid_rows();
            } else {
                if (opts.depths.empty()) opts.depths = {-1};
                if (opts.splits.empty()) opts.splits = {2};
                if (opts.leaves.empty()) opts.leaves = {1};
                rows = dr::grid_rows_from_lists(opts.depths, opts.splits, opts.leaves);
            }
            std::vector<dr::FeatureCombination> combos;
            if (opts.grid_combinations.empty()) {
                combos = {dr::FeatureCombination::color, dr::FeatureCombination::shape,
                          dr::FeatureCombination::meta, dr::FeatureCombination::color_shape,
                          dr::FeatureCombination::all};
            } else {
                for (const std::string& name : opts.grid_combinations) {
                    combos.push_back(dr::combination_from_string(name));
                }
            }
            dr::run_grid(opts.config, rows, combos, std::cout);
        }
    } catch (const dr::StageError& e) {
        std::cerr << "error [stage " << e.stage << "]: " << e.what() << "\n";
        return 1;
    } catch (const dr::ConfigError& e) {
        std::cerr << "error [stage cli]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
