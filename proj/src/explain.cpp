#include "defect_reasoner/explain.hpp"

#include "defect_reasoner/defchar.hpp"
#include "defect_reasoner/errors.hpp"
#include "defect_reasoner/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace defect_reasoner {

ChartSpec make_chart_spec(const FeatureSummary& feature,
                          std::span<const double> raw_values,
                          std::span<const int> targets) {
    if (raw_values.size() != targets.size() || raw_values.empty()) {
        throw ExplainError("make_chart_spec: values and targets must align and be non-empty");
    }
    ChartSpec spec;
    spec.feature = feature.name;
    spec.dis = feature.dis;
    spec.duf = feature.duf;
    spec.dos = feature.dos;
    spec.der = feature.der;

    double lo = raw_values[0];
    double hi = raw_values[0];
    for (double v : raw_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    spec.hist.range_min = lo;
    spec.hist.range_max = hi;
    const double span = hi - lo;
    for (std::size_t r = 0; r < raw_values.size(); ++r) {
        std::size_t bin = 0;
        if (span > 0.0) {
            bin = static_cast<std::size_t>((raw_values[r] - lo) / span * kChartBins);
            bin = std::min(bin, kChartBins - 1);
        }
        if (targets[r] == 1) {
            ++spec.hist.target1[bin];
        } else {
            ++spec.hist.target0[bin];
        }
    }
    return spec;
}

namespace {

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fmt2(double v) { return format_fixed(v, 2); }

} // namespace

std::string render_chart(const ChartSpec& spec) {
    constexpr double width = 640.0;
    constexpr double height = 400.0;
    constexpr double left = 56.0;
    constexpr double right = 616.0;
    constexpr double top = 72.0;
    constexpr double bottom = 344.0;
    const double plot_w = right - left;
    const double plot_h = bottom - top;

    int max_count = 1;
    for (std::size_t b = 0; b < kChartBins; ++b) {
        max_count = std::max({max_count, spec.hist.target1[b], spec.hist.target0[b]});
    }

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt2(width)
        << "\" height=\"" << fmt2(height) << "\" viewBox=\"0 0 " << fmt2(width) << " "
        << fmt2(height) << "\">\n"
        << "  <rect x=\"0\" y=\"0\" width=\"" << fmt2(width) << "\" height=\"" << fmt2(height)
        << "\" fill=\"#ffffff\"/>\n"
        << "  <text x=\"" << fmt2(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\" font-weight=\"bold\">"
        << xml_escape(spec.feature) << "</text>\n"
        << "  <text x=\"" << fmt2(width / 2) << "\" y=\"44\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"12\">DIS "
        << format_fixed(spec.dis, 3) << " | DUF " << format_fixed(spec.duf, 3) << " | DOS "
        << format_fixed(spec.dos, 3) << "</text>\n";

    // Effective-range band under the bars.
    if (spec.der.has_value() && spec.hist.range_max > spec.hist.range_min) {
        const double span = spec.hist.range_max - spec.hist.range_min;
        const double x0 =
            left + (std::clamp(spec.der->lower, spec.hist.range_min, spec.hist.range_max) -
                    spec.hist.range_min) /
                       span * plot_w;
        const double x1 =
            left + (std::clamp(spec.der->upper, spec.hist.range_min, spec.hist.range_max) -
                    spec.hist.range_min) /
                       span * plot_w;
        svg << "  <rect class=\"der-band\" x=\"" << fmt2(x0) << "\" y=\"" << fmt2(top)
            << "\" width=\"" << fmt2(std::max(1.0, x1 - x0)) << "\" height=\"" << fmt2(plot_h)
            << "\" fill=\"#ffe08a\" fill-opacity=\"0.6\"/>\n"
            << "  <text x=\"" << fmt2((x0 + x1) / 2) << "\" y=\"" << fmt2(top - 6)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">range "
            << fmt2(spec.der->lower) << " .. " << fmt2(spec.der->upper)
            << (spec.der->towards_lower ? " (lower)" : " (higher)") << "</text>\n";
    }

    const double bin_w = plot_w / static_cast<double>(kChartBins);
    auto draw_bars = [&](const std::array<int, kChartBins>& counts, const char* fill,
                         double inset) {
        for (std::size_t b = 0; b < kChartBins; ++b) {
            if (counts[b] == 0) {
                continue;
            }
            const double h = plot_h * static_cast<double>(counts[b]) / max_count;
            svg << "  <rect x=\"" << fmt2(left + bin_w * static_cast<double>(b) + inset)
                << "\" y=\"" << fmt2(bottom - h) << "\" width=\"" << fmt2(bin_w - 2 * inset)
                << "\" height=\"" << fmt2(h) << "\" fill=\"" << fill
                << "\" fill-opacity=\"0.55\"/>\n";
        }
    };
    draw_bars(spec.hist.target0, "#4878a8", 1.0);
    draw_bars(spec.hist.target1, "#d84848", 3.0);

    // Axes and tick labels.
    svg << "  <line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(bottom) << "\" x2=\"" << fmt2(right)
        << "\" y2=\"" << fmt2(bottom) << "\" stroke=\"#202020\"/>\n"
        << "  <line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top) << "\" x2=\"" << fmt2(left)
        << "\" y2=\"" << fmt2(bottom) << "\" stroke=\"#202020\"/>\n"
        << "  <text x=\"" << fmt2(left) << "\" y=\"" << fmt2(bottom + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt2(spec.hist.range_min) << "</text>\n"
        << "  <text x=\"" << fmt2((left + right) / 2) << "\" y=\"" << fmt2(bottom + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt2((spec.hist.range_min + spec.hist.range_max) / 2) << "</text>\n"
        << "  <text x=\"" << fmt2(right) << "\" y=\"" << fmt2(bottom + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt2(spec.hist.range_max) << "</text>\n"
        << "  <text x=\"" << fmt2(left - 8) << "\" y=\"" << fmt2(top + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << max_count
        << "</text>\n"
        << "  <text x=\"" << fmt2(left - 8) << "\" y=\"" << fmt2(bottom + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">0</text>\n";

    // Legend.
    svg << "  <rect x=\"" << fmt2(right - 150) << "\" y=\"" << fmt2(top - 26)
        << "\" width=\"10\" height=\"10\" fill=\"#d84848\" fill-opacity=\"0.55\"/>\n"
        << "  <text x=\"" << fmt2(right - 136) << "\" y=\"" << fmt2(top - 17)
        << "\" font-family=\"sans-serif\" font-size=\"11\">target 1</text>\n"
        << "  <rect x=\"" << fmt2(right - 72) << "\" y=\"" << fmt2(top - 26)
        << "\" width=\"10\" height=\"10\" fill=\"#4878a8\" fill-opacity=\"0.55\"/>\n"
        << "  <text x=\"" << fmt2(right - 58) << "\" y=\"" << fmt2(top - 17)
        << "\" font-family=\"sans-serif\" font-size=\"11\">target 0</text>\n"
        << "</svg>\n";
    return svg.str();
}

namespace {

std::string der_phrase(const std::optional<DerInterval>& der) {
    if (!der.has_value()) {
        return "no effective range";
    }
    return "effective range " + format_fixed(der->lower, 2) + " to " +
           format_fixed(der->upper, 2) +
           (der->towards_lower ? " (towards lower values)" : " (towards higher values)");
}

} // namespace

std::vector<MitigationEntry> suggest_mitigations(const DefCharSummary& summary,
                                                 std::span<const std::size_t> ranking,
                                                 std::size_t top_k) {
    struct Rule {
        std::string id;
        std::string text;
        std::vector<std::string> cited;
    };
    // Keyed so each rule appears at most once, ordered by its best trigger.
    std::vector<Rule> emitted;
    auto find_or_add = [&emitted](const std::string& id, const std::string& text) -> Rule& {
        for (Rule& r : emitted) {
            if (r.id == id) {
                return r;
            }
        }
        emitted.push_back({id, text, {}});
        return emitted.back();
    };

    const std::size_t limit = std::min(top_k, ranking.size());
    for (std::size_t k = 0; k < limit; ++k) {
        const FeatureSummary& f = summary.features[ranking[k]];
        if (f.node_count == 0) {
            continue;
        }
        const std::string cite = "`" + f.name + "` (" + der_phrase(f.der) + ")";
        switch (defchar_group(defchar_column(f.name))) {
        case DefCharGroup::colour:
        case DefCharGroup::colour_complexity: {
            Rule& r = find_or_add(
                "colour-normalisation",
                "Normalise and enhance image colours so defect areas contrast more with their "
                "surroundings; greyscaling is a fallback that can trade classification errors "
                "for missed detections.");
            r.cited.push_back(cite);
            break;
        }
        case DefCharGroup::shape:
        case DefCharGroup::shape_complexity: {
            Rule& r = find_or_add(
                "shape-preserving-augmentation",
                "Augment the training set with shape-preserving transforms (flips, rotations, "
                "crops) and use higher-resolution masks so outline detail survives.");
            r.cited.push_back(cite);
            break;
        }
        case DefCharGroup::meta: {
            if (f.name == "defect_size") {
                Rule& r = find_or_add(
                    "scale-augmentation",
                    "Rescale or tile the images so defects in the affected size band are better "
                    "represented at training time.");
                r.cited.push_back(cite);
            } else {
                Rule& r = find_or_add(
                    "crop-isolation",
                    "Crop training windows that isolate each defect from its neighbours so "
                    "nearby defects stop confusing the model.");
                r.cited.push_back(cite);
            }
            break;
        }
        }
    }

    std::vector<MitigationEntry> out;
    out.reserve(emitted.size());
    for (Rule& r : emitted) {
        std::string text = r.text + " Triggered by ";
        for (std::size_t i = 0; i < r.cited.size(); ++i) {
            if (i > 0) {
                text += i + 1 == r.cited.size() ? " and " : ", ";
            }
            text += r.cited[i];
        }
        text += ".";
        out.push_back({r.id, std::move(r.cited), std::move(text)});
    }
    return out;
}

Report compose_report(const DefCharSummary& summary,
                      const ValidationReport& validation,
                      const std::string& target_name,
                      std::size_t findings_top_k,
                      std::size_t mitigation_top_k) {
    if (summary.features.empty()) {
        throw ExplainError("compose_report: empty summary");
    }
    Report report;
    report.target_name = target_name;
    report.learning_score = validation.learning_score;
    report.validation_line =
        format_fixed(validation.learning_score * 100.0, 2) +
        "% defects have been correctly reasoned";
    report.ranking = rank_by_dos(summary);

    const std::size_t limit = std::min(findings_top_k, report.ranking.size());
    for (std::size_t k = 0; k < limit; ++k) {
        const FeatureSummary& f = summary.features[report.ranking[k]];
        std::ostringstream line;
        line << k + 1 << ". `" << f.name << "` (DOS " << format_fixed(f.dos, 3) << ", used in "
             << f.node_count << " nodes): " << der_phrase(f.der) << ".";
        report.findings.push_back(line.str());
    }
    report.mitigations = suggest_mitigations(summary, report.ranking, mitigation_top_k);
    return report;
}

std::string report_to_markdown(const Report& report, const DefCharSummary& summary) {
    std::ostringstream md;
    md << "# Reasoning report - target " << report.target_name << "\n\n";
    md << "## Learning\n\n" << report.validation_line << "\n\n";
    md << "Ensemble of " << summary.n_trees << " decision trees.\n\n";

    md << "## Ranked defect characteristics\n\n";
    md << "| rank | characteristic | DIS | DUF | DOS | nodes | effective range |\n";
    md << "|-----:|:---------------|----:|----:|----:|------:|:----------------|\n";
    for (std::size_t k = 0; k < report.ranking.size(); ++k) {
        const FeatureSummary& f = summary.features[report.ranking[k]];
        md << "| " << k + 1 << " | `" << f.name << "` | " << format_fixed(f.dis, 3) << " | "
           << format_fixed(f.duf, 3) << " | " << format_fixed(f.dos, 3) << " | " << f.node_count
           << " | ";
        if (f.der.has_value()) {
            md << format_fixed(f.der->lower, 2) << " .. " << format_fixed(f.der->upper, 2)
               << (f.der->towards_lower ? " (lower)" : " (higher)");
        } else {
            md << "-";
        }
        md << " |\n";
    }

    md << "\n## Top findings\n\n";
    for (const std::string& finding : report.findings) {
        md << finding << "\n";
    }

    md << "\n## Suggested mitigations\n\n";
    if (report.mitigations.empty()) {
        md << "None.\n";
    }
    for (const MitigationEntry& m : report.mitigations) {
        md << "- **" << m.id << "**: " << m.text << "\n";
    }
    return md.str();
}

nlohmann::json export_json(const DefCharSummary& summary,
                           const ValidationReport& validation,
                           const Report& report) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["target"] = report.target_name;
    doc["learning_score"] = validation.learning_score;
    doc["validation_line"] = report.validation_line;

    nlohmann::json per_tree = nlohmann::json::array();
    for (const auto& [tpr, tnr] : validation.per_tree) {
        per_tree.push_back({{"tpr", tpr}, {"tnr", tnr}});
    }
    doc["per_tree"] = std::move(per_tree);

    std::vector<std::size_t> rank_of(summary.features.size());
    for (std::size_t k = 0; k < report.ranking.size(); ++k) {
        rank_of[report.ranking[k]] = k + 1;
    }
    nlohmann::json features = nlohmann::json::array();
    for (std::size_t col = 0; col < summary.features.size(); ++col) {
        const FeatureSummary& f = summary.features[col];
        nlohmann::json entry;
        entry["name"] = f.name;
        entry["group"] = to_string(defchar_group(defchar_column(f.name)));
        entry["dis"] = f.dis;
        entry["duf"] = f.duf;
        entry["dos"] = f.dos;
        entry["node_count"] = f.node_count;
        entry["rank"] = rank_of[col];
        if (f.der.has_value()) {
            entry["der"] = {{"lower", f.der->lower},
                            {"upper", f.der->upper},
                            {"towards_lower", f.der->towards_lower}};
        } else {
            entry["der"] = nullptr;
        }
        features.push_back(std::move(entry));
    }
    doc["features"] = std::move(features);
    doc["findings"] = report.findings;

    nlohmann::json mitigations = nlohmann::json::array();
    for (const MitigationEntry& m : report.mitigations) {
        mitigations.push_back({{"id", m.id}, {"features", m.features}, {"text", m.text}});
    }
    doc["mitigations"] = std::move(mitigations);
    return doc;
}

} // namespace defect_reasoner
