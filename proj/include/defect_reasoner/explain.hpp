#pragma once

#include "defect_reasoner/analysis.hpp"
#include "defect_reasoner/forest.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace defect_reasoner {

inline constexpr std::size_t kChartBins = 20;

struct ClassHistograms {
    double range_min = 0.0;
    double range_max = 0.0;
    std::array<int, kChartBins> target1{};
    std::array<int, kChartBins> target0{};
};

struct ChartSpec {
    std::string feature;
    double dis = 0.0;
    double duf = 0.0;
    double dos = 0.0;
    std::optional<DerInterval> der; // raw units
    ClassHistograms hist;
};

// Histograms of the raw feature values split by target class, binned over
// the observed range.
ChartSpec make_chart_spec(const FeatureSummary& feature,
                          std::span<const double> raw_values,
                          std::span<const int> targets);

// Standalone SVG: score line on top, overlaid class histograms, shaded
// effective-range band when one exists. Byte-identical output for
// identical specs.
std::string render_chart(const ChartSpec& spec);

struct MitigationEntry {
    std::string id;
    std::vector<std::string> features; // triggering features, rank order
    std::string text;
};

struct Report {
    std::string target_name;
    double learning_score = 0.0;
    std::string validation_line; // "<V>% defects have been correctly reasoned"
    std::vector<std::size_t> ranking; // feature indices, dos descending
    std::vector<std::string> findings;
    std::vector<MitigationEntry> mitigations;
};

Report compose_report(const DefCharSummary& summary,
                      const ValidationReport& validation,
                      const std::string& target_name,
                      std::size_t findings_top_k = 3,
                      std::size_t mitigation_top_k = 5);

// Data pre-processing recommendations keyed by the characteristic group
// of the top-ranked features; one entry per rule, citing every triggering
// feature and its effective range.
std::vector<MitigationEntry> suggest_mitigations(const DefCharSummary& summary,
                                                 std::span<const std::size_t> ranking,
                                                 std::size_t top_k = 5);

std::string report_to_markdown(const Report& report, const DefCharSummary& summary);

// Machine-readable dump of all scores, ranking and mitigations.
nlohmann::json export_json(const DefCharSummary& summary,
                           const ValidationReport& validation,
                           const Report& report);

} // namespace defect_reasoner
