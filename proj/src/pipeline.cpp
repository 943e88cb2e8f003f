#include "defect_reasoner/pipeline.hpp"

#include "defect_reasoner/analysis.hpp"
#include "defect_reasoner/errors.hpp"
#include "defect_reasoner/explain.hpp"
#include "defect_reasoner/util.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace defect_reasoner {

std::string target_file_name(TargetKind kind) {
    switch (kind) {
    case TargetKind::c: return "C";
    case TargetKind::d: return "D";
    case TargetKind::c_prime: return "C_prime";
    case TargetKind::d_prime: return "D_prime";
    }
    throw ConfigError("unknown target kind");
}

std::string target_display_name(TargetKind kind) {
    switch (kind) {
    case TargetKind::c: return "C";
    case TargetKind::d: return "D";
    case TargetKind::c_prime: return "C'";
    case TargetKind::d_prime: return "D'";
    }
    throw ConfigError("unknown target kind");
}

TargetKind target_kind_from_string(const std::string& name) {
    if (name == "C") return TargetKind::c;
    if (name == "D") return TargetKind::d;
    if (name == "C'" || name == "Cp" || name == "C_prime") return TargetKind::c_prime;
    if (name == "D'" || name == "Dp" || name == "D_prime") return TargetKind::d_prime;
    throw ConfigError("unknown reasoning target '" + name + "' (expected C, D, C' or D')");
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

const std::vector<int>& select_target_vector(const ReasoningTargets& targets, TargetKind kind) {
    switch (kind) {
    case TargetKind::c: return targets.c;
    case TargetKind::d: return targets.d;
    case TargetKind::c_prime: return targets.cp;
    case TargetKind::d_prime: return targets.dp;
    }
    throw ConfigError("unknown target kind");
}

void check_targets_against_task(const RunConfig& config) {
    for (TargetKind kind : config.targets) {
        const bool detection_vector = kind == TargetKind::c || kind == TargetKind::d;
        if (config.task == ReasoningTask::detection && !detection_vector) {
            throw ConfigError("target " + target_display_name(kind) +
                              " is not produced by the detection task");
        }
        if (config.task == ReasoningTask::classification && detection_vector) {
            throw ConfigError("target " + target_display_name(kind) +
                              " is not produced by the classification task");
        }
    }
    if (config.targets.empty()) {
        throw ConfigError("no reasoning targets selected");
    }
}

struct LoadedData {
    DefectDataset dataset;
    DatasetTargets targets;
    DefCharMatrix matrix;
    std::size_t prediction_count = 0;
};

LoadedData load_and_extract(const RunConfig& config, bool need_targets) {
    LoadedData data;
    stage("ingest", [&] {
        const AnnotationFile truths = parse_annotations(config.annotations_path);
        AnnotationFile predictions;
        if (need_targets) {
            predictions = parse_predictions(config.predictions_path);
        } else {
            predictions.categories = truths.categories;
        }
        std::vector<NamedImage> images;
        images.reserve(truths.images.size());
        for (const auto& img : truths.images) {
            const auto file = img.file.empty() ? img.id + ".png" : img.file;
            images.push_back({img.id, load_image(config.images_dir / file)});
        }
        data.dataset = assemble_dataset(std::move(images), truths, predictions);
        return 0;
    });
    for (const auto& entry : data.dataset.entries) {
        data.prediction_count += entry.predictions.size();
    }
    if (need_targets) {
        stage("targets", [&] {
            data.targets =
                dataset_targets(data.dataset, config.iou_threshold, config.task, config.jobs);
            return 0;
        });
    }
    stage("defchar", [&] {
        data.matrix = build_matrix(data.dataset, config.jobs);
        minmax_scale(data.matrix);
        return 0;
    });
    return data;
}

struct ColumnSubset {
    FeatureMatrix rows;
    std::vector<std::string> names;
    std::vector<std::pair<double, double>> scaling;
    std::vector<std::size_t> columns;
};

ColumnSubset select_columns(const DefCharMatrix& matrix, FeatureCombination combo) {
    ColumnSubset subset;
    subset.columns = combination_columns(combo);
    subset.names.reserve(subset.columns.size());
    subset.scaling.reserve(subset.columns.size());
    for (std::size_t col : subset.columns) {
        subset.names.emplace_back(defchar_names()[col]);
        subset.scaling.push_back(matrix.scaling[col]);
    }
    subset.rows.reserve(matrix.rows());
    for (const DefCharRow& row : matrix.scaled) {
        std::vector<double> r;
        r.reserve(subset.columns.size());
        for (std::size_t col : subset.columns) {
            r.push_back(row[col]);
        }
        subset.rows.push_back(std::move(r));
    }
    return subset;
}

} // namespace

PipelineResult run_pipeline(const RunConfig& config, std::ostream& log) {
    stage("cli", [&] {
        check_targets_against_task(config);
        return 0;
    });
    LoadedData data = load_and_extract(config, /*need_targets=*/true);

    PipelineResult result;
    result.image_count = data.dataset.entries.size();
    result.defect_count = data.matrix.rows();
    result.prediction_count = data.prediction_count;
    log << "[ingest] " << result.image_count << " images, " << result.defect_count
        << " true defects, " << result.prediction_count << " predictions\n";
    log << "[defchar] matrix " << result.defect_count << " x " << kNumDefChars << "\n";

    stage("defchar", [&] {
        atomic_write_file(config.output_dir / "defchars_raw.csv",
                          matrix_to_csv(data.matrix, /*scaled=*/false));
        atomic_write_file(config.output_dir / "defchars_scaled.csv",
                          matrix_to_csv(data.matrix, /*scaled=*/true));
        return 0;
    });

    const ColumnSubset subset = select_columns(data.matrix, config.combination);
    for (TargetKind kind : config.targets) {
        const std::vector<int>& target_vec =
            select_target_vector(data.targets.combined, kind);
        const std::string file_tag = target_file_name(kind);
        log << "[reason] target " << target_display_name(kind) << " (combination "
            << to_string(config.combination) << ", " << config.tree.n_trees << " trees)\n";

        Forest forest;
        ValidationReport validation;
        std::vector<NodeAnalysis> analyses;
        DefCharSummary summary;
        stage("reasoner", [&] {
            forest = plant_forest(subset.rows, target_vec, config.tree, subset.names,
                                  config.jobs);
            validation = validate_forest(forest, subset.rows, target_vec);
            const std::vector<NodeRecord> records = climb_forest(forest);
            analyses =
                analyse_forest(records, static_cast<std::int64_t>(subset.rows.size()));
            summary = summarise_forest(analyses, forest, subset.scaling);
            return 0;
        });

        TargetRunResult run;
        run.target = kind;
        run.learning_score = validation.learning_score;

        stage("explain", [&] {
            const Report report =
                compose_report(summary, validation, target_display_name(kind));
            run.validation_line = report.validation_line;
            log << report.validation_line << "\n";

            const auto charts_dir = config.output_dir / "charts" / file_tag;
            std::filesystem::create_directories(charts_dir);
            parallel_for(summary.features.size(), config.jobs, [&](std::size_t k) {
                std::vector<double> raw_column(data.matrix.rows());
                const std::size_t col = subset.columns[k];
                for (std::size_t r = 0; r < data.matrix.rows(); ++r) {
                    raw_column[r] = data.matrix.raw[r][col];
                }
                const ChartSpec spec =
                    make_chart_spec(summary.features[k], raw_column, target_vec);
                atomic_write_file(charts_dir / (summary.features[k].name + ".svg"),
                                  render_chart(spec));
            });
            run.charts_written = summary.features.size();
            atomic_write_file(config.output_dir / ("report_" + file_tag + ".md"),
                              report_to_markdown(report, summary));
            atomic_write_file(config.output_dir / ("summary_" + file_tag + ".json"),
                              export_json(summary, validation, report).dump(2) + "\n");
            atomic_write_file(config.output_dir / ("forest_" + file_tag + ".json"),
                              forest_to_json(forest).dump() + "\n");
            log << "[explain] charts/" << file_tag << " (" << run.charts_written
                << " charts), report_" << file_tag << ".md, summary_" << file_tag << ".json\n";
            return 0;
        });
        result.targets.push_back(std::move(run));
    }
    return result;
}

ExtractResult extract_only(const RunConfig& config) {
    LoadedData data = load_and_extract(config, /*need_targets=*/false);
    ExtractResult result;
    result.rows = data.matrix.rows();
    result.raw_csv = config.output_dir / "defchars_raw.csv";
    result.scaled_csv = config.output_dir / "defchars_scaled.csv";
    stage("defchar", [&] {
        atomic_write_file(result.raw_csv, matrix_to_csv(data.matrix, /*scaled=*/false));
        atomic_write_file(result.scaled_csv, matrix_to_csv(data.matrix, /*scaled=*/true));
        return 0;
    });
    return result;
}

std::vector<GridRow> default_grid_rows() {
    return {{1, 2, 1},  {5, 2, 1},  {10, 2, 1}, {-1, 2, 1},
            {-1, 2, 3}, {-1, 2, 5}, {-1, 5, 1}, {-1, 5, 3}};
}

std::vector<GridRow> grid_rows_from_lists(std::span<const int> depths,
                                          std::span<const int> splits,
                                          std::span<const int> leaves) {
    if (depths.empty() || splits.empty() || leaves.empty()) {
        throw ConfigError("grid lists must be non-empty");
    }
    std::vector<GridRow> rows;
    for (int depth : depths) {
        for (int split : splits) {
            for (int leaf : leaves) {
                rows.push_back({depth, split, leaf});
            }
        }
    }
    return rows;
}

GridResult run_grid(const RunConfig& config,
                    std::span<const GridRow> rows,
                    std::span<const FeatureCombination> combinations,
                    std::ostream& log) {
    stage("cli", [&] {
        check_targets_against_task(config);
        if (rows.empty() || combinations.empty()) {
            throw ConfigError("grid needs at least one parameter row and one combination");
        }
        return 0;
    });
    LoadedData data = load_and_extract(config, /*need_targets=*/true);

    GridResult result;
    result.rows.assign(rows.begin(), rows.end());
    result.combinations.assign(combinations.begin(), combinations.end());
    result.scores.assign(rows.size(), std::vector<double>(combinations.size(), 0.0));

    std::vector<ColumnSubset> subsets;
    subsets.reserve(combinations.size());
    for (FeatureCombination combo : combinations) {
        subsets.push_back(select_columns(data.matrix, combo));
    }

    const std::size_t cell_count = rows.size() * combinations.size();
    stage("reasoner", [&] {
        parallel_for(cell_count, config.jobs, [&](std::size_t cell) {
            const std::size_t row_idx = cell / combinations.size();
            const std::size_t combo_idx = cell % combinations.size();
            TreeParams params = config.tree;
            params.max_depth = rows[row_idx].max_depth;
            params.min_split = rows[row_idx].min_split;
            params.min_leaf = rows[row_idx].min_leaf;
            double score_sum = 0.0;
            for (TargetKind kind : config.targets) {
                const std::vector<int>& target_vec =
                    select_target_vector(data.targets.combined, kind);
                const Forest forest = plant_forest(subsets[combo_idx].rows, target_vec, params,
                                                   subsets[combo_idx].names);
                score_sum +=
                    validate_forest(forest, subsets[combo_idx].rows, target_vec).learning_score;
            }
            result.scores[row_idx][combo_idx] =
                score_sum / static_cast<double>(config.targets.size());
        });
        return 0;
    });

    // Console table and CSV.
    std::ostringstream csv;
    csv << "max_depth,min_split,min_leaf";
    for (FeatureCombination combo : result.combinations) {
        csv << ',' << to_string(combo);
    }
    csv << '\n';
    log << std::left << std::setw(10) << "max_depth" << std::setw(10) << "min_split"
        << std::setw(10) << "min_leaf";
    for (FeatureCombination combo : result.combinations) {
        log << std::right << std::setw(13) << to_string(combo);
    }
    log << '\n';
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
        const GridRow& row = result.rows[r];
        const std::string depth =
            row.max_depth < 0 ? "unlimited" : std::to_string(row.max_depth);
        csv << depth << ',' << row.min_split << ',' << row.min_leaf;
        log << std::left << std::setw(10) << depth << std::setw(10) << row.min_split
            << std::setw(10) << row.min_leaf;
        for (std::size_t c = 0; c < result.combinations.size(); ++c) {
            const std::string pct = format_fixed(result.scores[r][c] * 100.0, 2);
            csv << ',' << pct;
            log << std::right << std::setw(12) << pct << '%';
        }
        csv << '\n';
        log << '\n';
    }
    stage("cli", [&] {
        atomic_write_file(config.output_dir / "grid.csv", csv.str());
        return 0;
    });
    return result;
}

} // namespace defect_reasoner
