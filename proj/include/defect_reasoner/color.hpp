#pragma once

#include "defect_reasoner/geometry.hpp"
#include "defect_reasoner/image.hpp"

#include <span>
#include <vector>

namespace defect_reasoner {

// Quantised HSV: hue in whole degrees, saturation and brightness mapped
// onto {0..254}.
struct HsvPixel {
    int hue = 0; // {0..359}
    int sat = 0; // {0..254}
    int val = 0; // {0..254}

    friend bool operator==(const HsvPixel&, const HsvPixel&) = default;
};

// Hue is rounded to whole degrees (half away from zero) mod 360; S and V
// come from round(x * 254) on the unit-interval values. Greys (including
// black) report hue 0.
HsvPixel rgb_to_hsv(int r, int g, int b);

std::vector<HsvPixel> hsv_at(const RasterImage& image, std::span<const PixelCoord> coords);

struct ColourStats {
    int avg_hue = 0;
    int mode_hue = 0;
    int unique_hue = 0;
    int hue_range = 0; // smallest circular arc containing all hues, capped at 180
    int avg_sat = 0;
    int mode_sat = 0;
    int unique_sat = 0;
    int sat_range = 0;
    int avg_bri = 0;
    int mode_bri = 0;
    int unique_bri = 0;
    int bri_range = 0;
};

// Averages round half away from zero; mode ties resolve to the smaller
// value. Throws DefCharError on an empty region.
ColourStats colour_stats(std::span<const HsvPixel> region);

struct ColourComplexity {
    double hue_diff = 0.0;
    double sat_diff = 0.0;
    double bri_diff = 0.0;
};

// Total-variation distance between the two regions' normalised value
// histograms per channel (hue: 360 bins, sat/bri: 255 bins). Symmetric,
// bounded to [0,1].
ColourComplexity colour_complexity(std::span<const HsvPixel> defect,
                                   std::span<const HsvPixel> background);

} // namespace defect_reasoner
