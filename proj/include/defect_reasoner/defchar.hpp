#pragma once

#include "defect_reasoner/color.hpp"
#include "defect_reasoner/dataset.hpp"
#include "defect_reasoner/geometry.hpp"
#include "defect_reasoner/image.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace defect_reasoner {

inline constexpr std::size_t kNumDefChars = 38;

// Column layout of a defect-characteristics row:
//   [0..11]  colour statistics of the defect area
//   [12..23] colour statistics of the surrounding background area
//   [24..26] colour distribution differences between the two areas
//   [27..31] outline shape measurements
//   [32..35] outline irregularity measurements
//   [36..37] size and neighbourhood context
const std::array<std::string_view, kNumDefChars>& defchar_names();

std::size_t defchar_column(std::string_view name);

enum class DefCharGroup { colour, colour_complexity, shape, shape_complexity, meta };

DefCharGroup defchar_group(std::size_t column);
std::string to_string(DefCharGroup group);

enum class FeatureCombination { color, shape, meta, color_shape, all };

std::string to_string(FeatureCombination combo);
FeatureCombination combination_from_string(const std::string& name);

// Column subsets: color -> the 24 area-colour statistics, shape -> the 9
// outline measurements, meta -> 2, color_shape -> 33, all -> 38.
std::vector<std::size_t> combination_columns(FeatureCombination combo);

// --------------------------------------------------------------- regions --

// Pixels whose centres fall inside the defect outline, clipped to the
// image. Throws DefCharError when no pixel centre is covered.
std::vector<PixelCoord> defect_pixels(const RasterImage& image, const Polygon& defect);

// Pixels of the defect's bounding box expanded by 50% of its width/height
// on each side (clamped to the image), excluding the defect itself.
// Throws DefCharError when that region is empty.
std::vector<PixelCoord> background_region(const RasterImage& image, const Polygon& defect);

// ---------------------------------------------------------------- shape ---

struct ShapeInfo {
    int number_of_edges = 0;
    double coverage = 0.0;     // polygon area / bounding-box area
    double aspect_ratio = 0.0; // min(bbox w, h) / max(bbox w, h)
    int avg_turning_angle = 0; // per-vertex angles rounded into {1..180}
    int mode_turning_angle = 0;
};

ShapeInfo shape_info(const Polygon& polygon);

struct ShapeComplexity {
    double edge_ratio = 0.0;     // mean min/max length ratio of adjacent edges
    double followed_turns = 0.0; // adjacent vertex pairs turning the same way
    double small_turns = 0.0;    // vertices with angle < 90 degrees
    double reversed_turns = 0.0; // adjacent vertex pairs turning opposite ways
};

ShapeComplexity shape_complexity(const Polygon& polygon);

// ----------------------------------------------------------------- meta ---

struct MetaInfo {
    std::int64_t defect_size = 0;
    int neighbour_distance = 2; // 0: <=100px, 1: >100px, 2: no neighbour
};

MetaInfo meta_info(const RasterImage& image,
                   const Polygon& defect,
                   std::span<const Polygon> other_defects);

// ------------------------------------------------------------ extraction --

using DefCharRow = std::array<double, kNumDefChars>;

DefCharRow extract_defchars(const RasterImage& image,
                            const Polygon& defect,
                            std::span<const Polygon> other_defects);

struct DefCharMatrix {
    std::vector<std::string> row_ids; // "<image id>:<defect index>"
    std::vector<DefCharRow> raw;
    std::vector<DefCharRow> scaled;
    std::array<std::pair<double, double>, kNumDefChars> scaling{}; // per-column (min, max)
    bool is_scaled = false;

    std::size_t rows() const { return raw.size(); }
};

// One row per true defect, in dataset iteration order. Extraction is
// independent per defect; `jobs` > 1 fans it out without changing the
// result.
DefCharMatrix build_matrix(const DefectDataset& dataset, int jobs = 1);

// In-place min-max scaling; constant columns map to 0. The recorded
// (min, max) pairs invert the transform for reporting.
void minmax_scale(DefCharMatrix& matrix);

double unscale_value(double scaled, const std::pair<double, double>& min_max);

// CSV with a defect_id column followed by the 38 characteristics.
std::string matrix_to_csv(const DefCharMatrix& matrix, bool scaled);

} // namespace defect_reasoner
