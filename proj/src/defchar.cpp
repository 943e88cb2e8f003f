#include "defect_reasoner/defchar.hpp"

#include "defect_reasoner/errors.hpp"
#include "defect_reasoner/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace defect_reasoner {

const std::array<std::string_view, kNumDefChars>& defchar_names() {
    static const std::array<std::string_view, kNumDefChars> names = {
        "defect_avg_hue",      "defect_mode_hue",    "defect_unique_hue",  "defect_hue_range",
        "defect_avg_sat",      "defect_mode_sat",    "defect_unique_sat",  "defect_sat_range",
        "defect_avg_bri",      "defect_mode_bri",    "defect_unique_bri",  "defect_bri_range",
        "bg_avg_hue",          "bg_mode_hue",        "bg_unique_hue",      "bg_hue_range",
        "bg_avg_sat",          "bg_mode_sat",        "bg_unique_sat",      "bg_sat_range",
        "bg_avg_bri",          "bg_mode_bri",        "bg_unique_bri",      "bg_bri_range",
        "hue_difference",      "sat_difference",     "bri_difference",
        "number_of_edges",     "coverage",           "aspect_ratio",
        "avg_turning_angle",   "mode_turning_angle",
        "edge_ratio",          "followed_turns",     "small_turns",        "reversed_turns",
        "defect_size",         "neighbour_distance",
    };
    return names;
}

std::size_t defchar_column(std::string_view name) {
    const auto& names = defchar_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) {
            return k;
        }
    }
    throw DefCharError("unknown defect characteristic: " + std::string(name));
}

DefCharGroup defchar_group(std::size_t column) {
    if (column < 24) return DefCharGroup::colour;
    if (column < 27) return DefCharGroup::colour_complexity;
    if (column < 32) return DefCharGroup::shape;
    if (column < 36) return DefCharGroup::shape_complexity;
    if (column < kNumDefChars) return DefCharGroup::meta;
    throw DefCharError("defchar column out of range");
}

std::string to_string(DefCharGroup group) {
    switch (group) {
    case DefCharGroup::colour: return "colour";
    case DefCharGroup::colour_complexity: return "colour_complexity";
    case DefCharGroup::shape: return "shape";
    case DefCharGroup::shape_complexity: return "shape_complexity";
    case DefCharGroup::meta: return "meta";
    }
    throw DefCharError("unknown defchar group");
}

std::string to_string(FeatureCombination combo) {
    switch (combo) {
    case FeatureCombination::color: return "color";
    case FeatureCombination::shape: return "shape";
    case FeatureCombination::meta: return "meta";
    case FeatureCombination::color_shape: return "color-shape";
    case FeatureCombination::all: return "all";
    }
    throw ConfigError("unknown feature combination");
}

FeatureCombination combination_from_string(const std::string& name) {
    if (name == "color" || name == "colour") return FeatureCombination::color;
    if (name == "shape") return FeatureCombination::shape;
    if (name == "meta") return FeatureCombination::meta;
    if (name == "color-shape" || name == "colour-shape" || name == "color_shape") {
        return FeatureCombination::color_shape;
    }
    if (name == "all") return FeatureCombination::all;
    throw ConfigError("unknown feature combination '" + name + "'");
}

std::vector<std::size_t> combination_columns(FeatureCombination combo) {
    std::vector<std::size_t> cols;
    auto add_range = [&cols](std::size_t first, std::size_t last) {
        for (std::size_t k = first; k < last; ++k) {
            cols.push_back(k);
        }
    };
    switch (combo) {
    case FeatureCombination::color:
        add_range(0, 24);
        break;
    case FeatureCombination::shape:
        add_range(27, 36);
        break;
    case FeatureCombination::meta:
        add_range(36, 38);
        break;
    case FeatureCombination::color_shape:
        add_range(0, 24);
        add_range(27, 36);
        break;
    case FeatureCombination::all:
        add_range(0, kNumDefChars);
        break;
    }
    return cols;
}

// ---------------------------------------------------------------- regions --

std::vector<PixelCoord> defect_pixels(const RasterImage& image, const Polygon& defect) {
    auto pixels = rasterize_polygon(defect, image.width, image.height);
    if (pixels.empty()) {
        throw DefCharError("defect region covers no pixel centres");
    }
    return pixels;
}

std::vector<PixelCoord> background_region(const RasterImage& image, const Polygon& defect) {
    const BBox box = bounding_box(defect);
    const double ex = 0.5 * box.width();
    const double ey = 0.5 * box.height();
    const double min_x = std::max(0.0, box.min_x - ex);
    const double min_y = std::max(0.0, box.min_y - ey);
    const double max_x = std::min(static_cast<double>(image.width), box.max_x + ex);
    const double max_y = std::min(static_cast<double>(image.height), box.max_y + ey);

    std::vector<PixelCoord> pixels;
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x)) - 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y)) - 1);
    const int x1 = std::min(image.width, static_cast<int>(std::ceil(max_x)) + 1);
    const int y1 = std::min(image.height, static_cast<int>(std::ceil(max_y)) + 1);
    for (int py = y0; py < y1; ++py) {
        const double cy = py + 0.5;
        if (cy < min_y || cy > max_y) {
            continue;
        }
        for (int px = x0; px < x1; ++px) {
            const double cx = px + 0.5;
            if (cx < min_x || cx > max_x) {
                continue;
            }
            if (!pixel_center_inside(defect, px, py)) {
                pixels.push_back({px, py});
            }
        }
    }
    if (pixels.empty()) {
        throw DefCharError("background region is empty (defect fills its surroundings)");
    }
    return pixels;
}

namespace {

// Fallback when the expanded box holds nothing: the whole image minus the
// defect. Returns an empty vector rather than throwing.
std::vector<PixelCoord> whole_image_background(const RasterImage& image, const Polygon& defect) {
    std::vector<PixelCoord> pixels;
    for (int py = 0; py < image.height; ++py) {
        for (int px = 0; px < image.width; ++px) {
            if (!pixel_center_inside(defect, px, py)) {
                pixels.push_back({px, py});
            }
        }
    }
    return pixels;
}

} // namespace

// ---------------------------------------------------------------- shape ---

namespace {

std::vector<int> rounded_turning_angles(const Polygon& polygon) {
    std::vector<int> rounded;
    for (double deg : interior_angles_deg(polygon)) {
        rounded.push_back(std::clamp(static_cast<int>(std::llround(deg)), 1, 180));
    }
    return rounded;
}

} // namespace

ShapeInfo shape_info(const Polygon& polygon) {
    const double area = std::fabs(signed_area(polygon));
    if (area == 0.0) {
        throw DefCharError("shape_info: degenerate polygon");
    }
    const BBox box = bounding_box(polygon);
    ShapeInfo info;
    info.number_of_edges = static_cast<int>(polygon.vertices.size());
    info.coverage = std::min(1.0, area / box.area());
    info.aspect_ratio =
        std::min(box.width(), box.height()) / std::max(box.width(), box.height());

    const std::vector<int> angles = rounded_turning_angles(polygon);
    std::int64_t angle_sum = 0;
    std::map<int, int> angle_counts;
    for (int a : angles) {
        angle_sum += a;
        ++angle_counts[a];
    }
    info.avg_turning_angle = static_cast<int>(
        std::llround(static_cast<double>(angle_sum) / static_cast<double>(angles.size())));
    int best_count = 0;
    for (const auto& [angle, count] : angle_counts) { // ascending keys: ties -> smaller angle
        if (count > best_count) {
            best_count = count;
            info.mode_turning_angle = angle;
        }
    }
    return info;
}

ShapeComplexity shape_complexity(const Polygon& polygon) {
    if (std::fabs(signed_area(polygon)) == 0.0) {
        throw DefCharError("shape_complexity: degenerate polygon");
    }
    const auto& v = polygon.vertices;
    const std::size_t n = v.size();

    std::vector<double> edge_lengths(n);
    for (std::size_t i = 0; i < n; ++i) {
        edge_lengths[i] = euclidean_distance(v[i], v[(i + 1) % n]);
    }
    double ratio_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = edge_lengths[i];
        const double b = edge_lengths[(i + 1) % n];
        ratio_sum += std::min(a, b) / std::max(a, b);
    }

    // Turn direction at each vertex: sign of cross(incoming, outgoing).
    std::vector<int> signs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point& prev = v[(i + n - 1) % n];
        const Point& curr = v[i];
        const Point& next = v[(i + 1) % n];
        const double cross = (curr.x - prev.x) * (next.y - curr.y) -
                             (curr.y - prev.y) * (next.x - curr.x);
        signs[i] = cross > 0.0 ? 1 : (cross < 0.0 ? -1 : 0);
    }
    std::size_t followed = 0;
    std::size_t reversed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int s1 = signs[i];
        const int s2 = signs[(i + 1) % n];
        if (s1 == 0 || s2 == 0) {
            continue; // collinear vertices count toward neither kind of turn
        }
        if (s1 == s2) {
            ++followed;
        } else {
            ++reversed;
        }
    }

    const std::vector<int> angles = rounded_turning_angles(polygon);
    const std::size_t small =
        static_cast<std::size_t>(std::count_if(angles.begin(), angles.end(),
                                               [](int a) { return a < 90; }));

    ShapeComplexity out;
    out.edge_ratio = ratio_sum / static_cast<double>(n);
    out.followed_turns = static_cast<double>(followed) / static_cast<double>(n);
    out.small_turns = static_cast<double>(small) / static_cast<double>(n);
    out.reversed_turns = static_cast<double>(reversed) / static_cast<double>(n);
    return out;
}

// ----------------------------------------------------------------- meta ---

MetaInfo meta_info(const RasterImage& image,
                   const Polygon& defect,
                   std::span<const Polygon> other_defects) {
    MetaInfo meta;
    meta.defect_size = rasterized_pixel_count(defect, image.width, image.height);
    if (meta.defect_size < 1) {
        throw DefCharError("defect region covers no pixel centres");
    }
    if (other_defects.empty()) {
        meta.neighbour_distance = 2;
        return meta;
    }
    double min_dist = std::numeric_limits<double>::infinity();
    for (const Polygon& other : other_defects) {
        for (const Point& a : defect.vertices) {
            for (const Point& b : other.vertices) {
                min_dist = std::min(min_dist, euclidean_distance(a, b));
            }
        }
    }
    meta.neighbour_distance = min_dist <= 100.0 ? 0 : 1;
    return meta;
}

// ------------------------------------------------------------ extraction --

DefCharRow extract_defchars(const RasterImage& image,
                            const Polygon& defect,
                            std::span<const Polygon> other_defects) {
    const auto inside = defect_pixels(image, defect);
    std::vector<PixelCoord> outside;
    try {
        outside = background_region(image, defect);
    } catch (const DefCharError&) {
        outside = whole_image_background(image, defect);
        if (outside.empty()) {
            throw DefCharError("no background pixels available for defect");
        }
    }

    const auto defect_hsv = hsv_at(image, inside);
    const auto bg_hsv = hsv_at(image, outside);
    const ColourStats dstats = colour_stats(defect_hsv);
    const ColourStats bstats = colour_stats(bg_hsv);
    const ColourComplexity cdiff = colour_complexity(defect_hsv, bg_hsv);
    const ShapeInfo shape = shape_info(defect);
    const ShapeComplexity complexity = shape_complexity(defect);
    const MetaInfo meta = meta_info(image, defect, other_defects);

    DefCharRow row{};
    std::size_t k = 0;
    auto put = [&row, &k](double value) { row[k++] = value; };
    for (const ColourStats* stats : {&dstats, &bstats}) {
        put(stats->avg_hue);
        put(stats->mode_hue);
        put(stats->unique_hue);
        put(stats->hue_range);
        put(stats->avg_sat);
        put(stats->mode_sat);
        put(stats->unique_sat);
        put(stats->sat_range);
        put(stats->avg_bri);
        put(stats->mode_bri);
        put(stats->unique_bri);
        put(stats->bri_range);
    }
    put(cdiff.hue_diff);
    put(cdiff.sat_diff);
    put(cdiff.bri_diff);
    put(shape.number_of_edges);
    put(shape.coverage);
    put(shape.aspect_ratio);
    put(shape.avg_turning_angle);
    put(shape.mode_turning_angle);
    put(complexity.edge_ratio);
    put(complexity.followed_turns);
    put(complexity.small_turns);
    put(complexity.reversed_turns);
    put(static_cast<double>(meta.defect_size));
    put(meta.neighbour_distance);
    return row;
}

DefCharMatrix build_matrix(const DefectDataset& dataset, int jobs) {
    const std::size_t total = dataset.total_true_defects();
    if (total == 0) {
        throw DefCharError("dataset contains no true defects");
    }
    struct Task {
        const DatasetEntry* entry;
        std::size_t defect;
    };
    std::vector<Task> tasks;
    tasks.reserve(total);
    DefCharMatrix matrix;
    matrix.row_ids.reserve(total);
    for (const DatasetEntry& entry : dataset.entries) {
        for (std::size_t d = 0; d < entry.truths.size(); ++d) {
            tasks.push_back({&entry, d});
            matrix.row_ids.push_back(entry.id + ":" + std::to_string(d));
        }
    }
    matrix.raw.resize(total);
    parallel_for(total, jobs, [&](std::size_t k) {
        const DatasetEntry& entry = *tasks[k].entry;
        const std::size_t d = tasks[k].defect;
        std::vector<Polygon> others;
        others.reserve(entry.truths.size() - 1);
        for (std::size_t o = 0; o < entry.truths.size(); ++o) {
            if (o != d) {
                others.push_back(entry.truths[o].region);
            }
        }
        matrix.raw[k] = extract_defchars(entry.image, entry.truths[d].region, others);
    });
    return matrix;
}

void minmax_scale(DefCharMatrix& matrix) {
    if (matrix.raw.empty()) {
        throw DefCharError("cannot scale an empty matrix");
    }
    matrix.scaled.assign(matrix.raw.size(), DefCharRow{});
    for (std::size_t col = 0; col < kNumDefChars; ++col) {
        double lo = matrix.raw[0][col];
        double hi = matrix.raw[0][col];
        for (const DefCharRow& row : matrix.raw) {
            lo = std::min(lo, row[col]);
            hi = std::max(hi, row[col]);
        }
        matrix.scaling[col] = {lo, hi};
        const double span = hi - lo;
        for (std::size_t r = 0; r < matrix.raw.size(); ++r) {
            matrix.scaled[r][col] = span == 0.0 ? 0.0 : (matrix.raw[r][col] - lo) / span;
        }
    }
    matrix.is_scaled = true;
}

double unscale_value(double scaled, const std::pair<double, double>& min_max) {
    return scaled * (min_max.second - min_max.first) + min_max.first;
}

std::string matrix_to_csv(const DefCharMatrix& matrix, bool scaled) {
    if (scaled && !matrix.is_scaled) {
        throw DefCharError("matrix has not been scaled");
    }
    const auto& rows = scaled ? matrix.scaled : matrix.raw;
    std::ostringstream out;
    out << "defect_id";
    for (const auto& name : defchar_names()) {
        out << ',' << name;
    }
    out << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << matrix.row_ids[r];
        for (std::size_t col = 0; col < kNumDefChars; ++col) {
            out << ',' << format_double(rows[r][col]);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace defect_reasoner
