// Independent re-derivations of the library's numeric definitions, written
// as plain straight-line code against the same stated semantics. Tests
// compare implementation output against these; none of them call back into
// the implementation paths they check.
#pragma once

#include "defect_reasoner/analysis.hpp"
#include "defect_reasoner/color.hpp"
#include "defect_reasoner/forest.hpp"
#include "defect_reasoner/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace oracle {

namespace dr = defect_reasoner;

// Even-odd crossing count for a pixel centre. Same per-edge arithmetic as
// the stated definition, accumulated as an integer crossing count over a
// reversed edge walk.
inline bool pixel_inside(const dr::Polygon& poly, int px, int py) {
    const double x = px + 0.5;
    const double y = py + 0.5;
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    int crossings = 0;
    for (std::size_t back = n; back > 0; --back) {
        const dr::Point& a = v[back - 1];
        const dr::Point& b = v[back % n];
        if ((a.y > y) != (b.y > y)) {
            const double x_cross = a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y);
            if (x < x_cross) {
                ++crossings;
            }
        }
    }
    return crossings % 2 == 1;
}

// Brute-force pixel count over an explicit rectangle of pixel indices.
inline std::int64_t pixel_count(const dr::Polygon& poly, int x0, int y0, int x1, int y1) {
    std::int64_t count = 0;
    for (int py = y0; py < y1; ++py) {
        for (int px = x0; px < x1; ++px) {
            if (pixel_inside(poly, px, py)) {
                ++count;
            }
        }
    }
    return count;
}

inline double shoelace_area(const dr::Polygon& poly) {
    const auto& v = poly.vertices;
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const dr::Point& p = v[i];
        const dr::Point& q = v[(i + 1) % v.size()];
        acc += p.x * q.y - q.x * p.y;
    }
    return std::fabs(acc) / 2.0;
}

// Interior angle via the difference of the two edge headings, wrapped into
// [0, 180]. A different route than atan2(|cross|, dot).
inline double interior_angle_deg(const dr::Point& prev, const dr::Point& at,
                                 const dr::Point& next) {
    const double head_in = std::atan2(prev.y - at.y, prev.x - at.x);
    const double head_out = std::atan2(next.y - at.y, next.x - at.x);
    double delta = head_in - head_out;
    const double pi = std::acos(-1.0);
    while (delta > pi) delta -= 2.0 * pi;
    while (delta < -pi) delta += 2.0 * pi;
    return std::fabs(delta) * 180.0 / pi;
}

// ----------------------------------------------------------------- colour --

// Integer-exact HSV quantisation: rational rounding without any floating
// point. round(60 * num / den + offset) half away from zero, num may be
// negative only before the offset is applied.
inline std::int64_t round_ratio_half_up(std::int64_t num, std::int64_t den) {
    // num, den >= 0
    return (2 * num + den) / (2 * den);
}

struct HsvInt {
    int hue;
    int sat;
    int val;
};

inline HsvInt rgb_to_hsv_exact(int r, int g, int b) {
    const int mx = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    const int delta = mx - mn;
    std::int64_t hue = 0;
    if (delta != 0) {
        std::int64_t num; // hue * delta, guaranteed non-negative
        if (mx == r) {
            num = g >= b ? 60LL * (g - b) : 360LL * delta - 60LL * (b - g);
        } else if (mx == g) {
            num = 120LL * delta + 60LL * (b - r);
        } else {
            num = 240LL * delta + 60LL * (r - g);
        }
        hue = round_ratio_half_up(num, delta) % 360;
    }
    const std::int64_t sat = mx == 0 ? 0 : round_ratio_half_up(254LL * delta, mx);
    const std::int64_t val = round_ratio_half_up(254LL * mx, 255);
    return {static_cast<int>(hue), static_cast<int>(sat), static_cast<int>(val)};
}

struct ChannelBrute {
    int avg;
    int mode;
    int unique;
    int min;
    int max;
};

inline ChannelBrute channel_brute(const std::vector<int>& values) {
    std::map<int, std::int64_t> hist;
    std::int64_t sum = 0;
    for (int v : values) {
        ++hist[v];
        sum += v;
    }
    ChannelBrute out{};
    out.avg = static_cast<int>(std::llround(static_cast<double>(sum) /
                                            static_cast<double>(values.size())));
    std::int64_t best = 0;
    for (const auto& [value, count] : hist) {
        if (count > best) {
            best = count;
            out.mode = value;
        }
    }
    out.unique = static_cast<int>(hist.size());
    out.min = hist.begin()->first;
    out.max = hist.rbegin()->first;
    return out;
}

// Smallest arc containing all hues, by trying every observed hue as the
// arc start (rather than via the largest-gap identity).
inline int circular_hue_range_brute(const std::vector<int>& hues) {
    std::vector<int> distinct = hues;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() <= 1) {
        return 0;
    }
    int best = 360;
    for (int start : distinct) {
        int arc = 0;
        for (int h : distinct) {
            arc = std::max(arc, (h - start + 360) % 360);
        }
        best = std::min(best, arc);
    }
    return std::min(best, 180);
}

inline double total_variation_brute(const std::vector<int>& a, const std::vector<int>& b) {
    std::map<int, double> pa, pb;
    for (int v : a) {
        pa[v] += 1.0 / static_cast<double>(a.size());
    }
    for (int v : b) {
        pb[v] += 1.0 / static_cast<double>(b.size());
    }
    std::map<int, double> diff;
    for (const auto& [v, p] : pa) {
        diff[v] += p;
    }
    for (const auto& [v, p] : pb) {
        diff[v] -= p;
    }
    double sum = 0.0;
    for (const auto& [v, d] : diff) {
        sum += std::fabs(d);
    }
    return sum / 2.0;
}

// ------------------------------------------------------------------ trees --

// Recursive walk, independent of DecisionTree::predict's loop.
inline int tree_predict(const dr::DecisionTree& tree, std::span<const double> row,
                        int node = 0) {
    const dr::TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) {
        return n.n1 > n.n0 ? 1 : 0;
    }
    if (row[static_cast<std::size_t>(n.feature)] <= n.threshold) {
        return tree_predict(tree, row, n.true_child);
    }
    return tree_predict(tree, row, n.false_child);
}

// Straight-line transcription of the node-score definitions plus the
// degree/status bonus table.
struct NodeScores {
    double ds;
    double ts;
    double ts_alt;
    double u;
    double b_deg;
    double b_sta;
    double idx;
    bool dir;
};

inline NodeScores node_scores(std::int64_t in1, std::int64_t in0, std::int64_t itc1,
                              std::int64_t itc0, std::int64_t ifc1, std::int64_t ifc0,
                              std::int64_t total) {
    const double n1 = static_cast<double>(in1);
    const double n0 = static_cast<double>(in0);
    const double tc1 = static_cast<double>(itc1);
    const double tc0 = static_cast<double>(itc0);
    const double fc1 = static_cast<double>(ifc1);
    const double fc0 = static_cast<double>(ifc0);
    NodeScores s{};
    s.ds = 0.5 * (std::fabs((tc1 - fc1) / n1) + std::fabs((tc0 - fc0) / n0));
    s.ts = std::fabs(tc1 / n1 - tc0 / n0);
    s.ts_alt = std::fabs(fc1 / n1 - fc0 / n0);
    s.u = static_cast<double>(in1 + in0) / static_cast<double>(total);
    if (s.ts == 0.0) {
        s.b_deg = 0.0;
    } else if (s.ts < 0.25) {
        s.b_deg = 0.1;
    } else if (s.ts < 0.5) {
        s.b_deg = 0.2;
    } else if (s.ts < 1.0) {
        s.b_deg = 0.3;
    } else {
        s.b_deg = 0.5;
    }
    if (itc1 == 0 || itc0 == 0) {
        s.b_sta = 0.5;
    } else if (itc1 == ifc1 || itc0 == ifc0) {
        s.b_sta = 0.2;
    } else {
        s.b_sta = 0.0;
    }
    s.idx = s.u * ((1.0 + s.ds) * s.ts + s.b_deg + s.b_sta);
    s.dir = itc1 >= ifc1;
    return s;
}

} // namespace oracle
