#include "defect_reasoner/color.hpp"

#include "defect_reasoner/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace defect_reasoner {

HsvPixel rgb_to_hsv(int r, int g, int b) {
    if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) {
        throw DefCharError("rgb_to_hsv: channel out of [0,255]");
    }
    const int mx = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    const int delta = mx - mn;

    // Hue on integer channel values: 60*(diff)/delta stays exact in the
    // half-degree cases, so rounding is reproducible.
    double hue_deg = 0.0;
    if (delta != 0) {
        if (mx == r) {
            hue_deg = 60.0 * (g - b) / delta;
            if (hue_deg < 0.0) {
                hue_deg += 360.0;
            }
        } else if (mx == g) {
            hue_deg = 120.0 + 60.0 * (b - r) / delta;
        } else {
            hue_deg = 240.0 + 60.0 * (r - g) / delta;
        }
    }

    HsvPixel out;
    out.hue = static_cast<int>(std::llround(hue_deg)) % 360;
    out.sat = mx == 0 ? 0 : static_cast<int>(std::llround(254.0 * delta / mx));
    out.val = static_cast<int>(std::llround(254.0 * mx / 255.0));
    return out;
}

std::vector<HsvPixel> hsv_at(const RasterImage& image, std::span<const PixelCoord> coords) {
    std::vector<HsvPixel> out;
    out.reserve(coords.size());
    for (const PixelCoord& c : coords) {
        const Rgb& p = image.at(c.x, c.y);
        out.push_back(rgb_to_hsv(p.r, p.g, p.b));
    }
    return out;
}

namespace {

struct ChannelSummary {
    int avg = 0;
    int mode = 0;
    int unique = 0;
    int min = 0;
    int max = 0;
};

template <std::size_t Bins>
ChannelSummary summarise(const std::array<std::int64_t, Bins>& counts, std::int64_t total) {
    ChannelSummary s;
    std::int64_t weighted_sum = 0;
    std::int64_t best_count = 0;
    int min_v = -1;
    int max_v = 0;
    for (int v = 0; v < static_cast<int>(Bins); ++v) {
        const std::int64_t c = counts[static_cast<std::size_t>(v)];
        if (c == 0) {
            continue;
        }
        weighted_sum += c * v;
        if (c > best_count) { // ascending scan keeps the smallest tied value
            best_count = c;
            s.mode = v;
        }
        ++s.unique;
        if (min_v < 0) {
            min_v = v;
        }
        max_v = v;
    }
    s.avg = static_cast<int>(std::llround(static_cast<double>(weighted_sum) / total));
    s.min = std::max(min_v, 0);
    s.max = max_v;
    return s;
}

// Smallest circular arc containing every observed hue: 360 minus the
// widest empty gap between consecutive hues on the circle.
int circular_hue_range(const std::array<std::int64_t, 360>& counts) {
    std::vector<int> hues;
    for (int h = 0; h < 360; ++h) {
        if (counts[static_cast<std::size_t>(h)] > 0) {
            hues.push_back(h);
        }
    }
    if (hues.size() <= 1) {
        return 0;
    }
    int max_gap = 0;
    for (std::size_t i = 1; i < hues.size(); ++i) {
        max_gap = std::max(max_gap, hues[i] - hues[i - 1]);
    }
    max_gap = std::max(max_gap, hues.front() + 360 - hues.back());
    return std::min(180, 360 - max_gap);
}

} // namespace

ColourStats colour_stats(std::span<const HsvPixel> region) {
    if (region.empty()) {
        throw DefCharError("colour_stats: empty region");
    }
    std::array<std::int64_t, 360> hue_counts{};
    std::array<std::int64_t, 255> sat_counts{};
    std::array<std::int64_t, 255> bri_counts{};
    for (const HsvPixel& p : region) {
        ++hue_counts[static_cast<std::size_t>(p.hue)];
        ++sat_counts[static_cast<std::size_t>(p.sat)];
        ++bri_counts[static_cast<std::size_t>(p.val)];
    }
    const auto total = static_cast<std::int64_t>(region.size());
    const ChannelSummary hue = summarise(hue_counts, total);
    const ChannelSummary sat = summarise(sat_counts, total);
    const ChannelSummary bri = summarise(bri_counts, total);

    ColourStats stats;
    stats.avg_hue = hue.avg;
    stats.mode_hue = hue.mode;
    stats.unique_hue = hue.unique;
    stats.hue_range = circular_hue_range(hue_counts);
    stats.avg_sat = sat.avg;
    stats.mode_sat = sat.mode;
    stats.unique_sat = sat.unique;
    stats.sat_range = sat.max - sat.min;
    stats.avg_bri = bri.avg;
    stats.mode_bri = bri.mode;
    stats.unique_bri = bri.unique;
    stats.bri_range = bri.max - bri.min;
    return stats;
}

namespace {

template <std::size_t Bins>
double total_variation(const std::array<std::int64_t, Bins>& a, std::int64_t a_total,
                       const std::array<std::int64_t, Bins>& b, std::int64_t b_total) {
    double sum = 0.0;
    for (std::size_t k = 0; k < Bins; ++k) {
        const double p = static_cast<double>(a[k]) / static_cast<double>(a_total);
        const double q = static_cast<double>(b[k]) / static_cast<double>(b_total);
        sum += std::fabs(p - q);
    }
    // Accumulation can overshoot the mathematical bound by a few ulp.
    return std::min(1.0, 0.5 * sum);
}

} // namespace

ColourComplexity colour_complexity(std::span<const HsvPixel> defect,
                                   std::span<const HsvPixel> background) {
    if (defect.empty() || background.empty()) {
        throw DefCharError("colour_complexity: empty region");
    }
    std::array<std::int64_t, 360> hue_a{}, hue_b{};
    std::array<std::int64_t, 255> sat_a{}, sat_b{};
    std::array<std::int64_t, 255> bri_a{}, bri_b{};
    for (const HsvPixel& p : defect) {
        ++hue_a[static_cast<std::size_t>(p.hue)];
        ++sat_a[static_cast<std::size_t>(p.sat)];
        ++bri_a[static_cast<std::size_t>(p.val)];
    }
    for (const HsvPixel& p : background) {
        ++hue_b[static_cast<std::size_t>(p.hue)];
        ++sat_b[static_cast<std::size_t>(p.sat)];
        ++bri_b[static_cast<std::size_t>(p.val)];
    }
    const auto na = static_cast<std::int64_t>(defect.size());
    const auto nb = static_cast<std::int64_t>(background.size());
    return {total_variation(hue_a, na, hue_b, nb),
            total_variation(sat_a, na, sat_b, nb),
            total_variation(bri_a, na, bri_b, nb)};
}

} // namespace defect_reasoner
