#include "defect_reasoner/geometry.hpp"

#include "defect_reasoner/errors.hpp"

#include <algorithm>
#include <cmath>

namespace defect_reasoner {

double signed_area(const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    double twice_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % n];
        twice_area += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice_area;
}

BBox bounding_box(const Polygon& poly) {
    if (poly.vertices.empty()) {
        throw IngestError("bounding_box: empty polygon");
    }
    BBox box{poly.vertices[0].x, poly.vertices[0].y, poly.vertices[0].x, poly.vertices[0].y};
    for (const Point& p : poly.vertices) {
        box.min_x = std::min(box.min_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_x = std::max(box.max_x, p.x);
        box.max_y = std::max(box.max_y, p.y);
    }
    return box;
}

Polygon normalize_polygon(const Polygon& poly) {
    Polygon out;
    for (const Point& p : poly.vertices) {
        if (out.vertices.empty() || !(out.vertices.back() == p)) {
            out.vertices.push_back(p);
        }
    }
    // Closing vertex repeated at the end is a common export style.
    while (out.vertices.size() > 1 && out.vertices.front() == out.vertices.back()) {
        out.vertices.pop_back();
    }
    if (out.vertices.size() < 3) {
        throw IngestError("polygon has fewer than 3 distinct vertices");
    }
    const double area = signed_area(out);
    if (area == 0.0) {
        throw IngestError("polygon encloses zero area");
    }
    if (area < 0.0) {
        std::reverse(out.vertices.begin(), out.vertices.end());
    }
    return out;
}

Polygon clamp_polygon(const Polygon& poly, double width, double height) {
    Polygon clamped = poly;
    for (Point& p : clamped.vertices) {
        p.x = std::clamp(p.x, 0.0, width);
        p.y = std::clamp(p.y, 0.0, height);
    }
    try {
        return normalize_polygon(clamped);
    } catch (const IngestError&) {
        throw IngestError("polygon degenerates after clamping to image bounds");
    }
}

bool point_in_polygon(const Polygon& poly, double x, double y) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    bool inside = false;
    for (std::size_t k = 0; k < n; ++k) {
        const Point& a = v[k];
        const Point& b = v[(k + 1) % n];
        if ((a.y > y) != (b.y > y)) {
            const double x_cross = a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y);
            if (x < x_cross) {
                inside = !inside;
            }
        }
    }
    return inside;
}

std::vector<PixelCoord> rasterize_polygon(const Polygon& poly, int clip_width, int clip_height) {
    const BBox box = bounding_box(poly);
    int x0 = static_cast<int>(std::floor(box.min_x)) - 1;
    int y0 = static_cast<int>(std::floor(box.min_y)) - 1;
    int x1 = static_cast<int>(std::ceil(box.max_x)) + 1;
    int y1 = static_cast<int>(std::ceil(box.max_y)) + 1;
    if (clip_width >= 0) {
        x0 = std::max(x0, 0);
        x1 = std::min(x1, clip_width);
    }
    if (clip_height >= 0) {
        y0 = std::max(y0, 0);
        y1 = std::min(y1, clip_height);
    }
    std::vector<PixelCoord> pixels;
    for (int py = y0; py < y1; ++py) {
        for (int px = x0; px < x1; ++px) {
            if (pixel_center_inside(poly, px, py)) {
                pixels.push_back({px, py});
            }
        }
    }
    return pixels;
}

std::int64_t rasterized_pixel_count(const Polygon& poly, int clip_width, int clip_height) {
    const BBox box = bounding_box(poly);
    int x0 = static_cast<int>(std::floor(box.min_x)) - 1;
    int y0 = static_cast<int>(std::floor(box.min_y)) - 1;
    int x1 = static_cast<int>(std::ceil(box.max_x)) + 1;
    int y1 = static_cast<int>(std::ceil(box.max_y)) + 1;
    if (clip_width >= 0) {
        x0 = std::max(x0, 0);
        x1 = std::min(x1, clip_width);
    }
    if (clip_height >= 0) {
        y0 = std::max(y0, 0);
        y1 = std::min(y1, clip_height);
    }
    std::int64_t count = 0;
    for (int py = y0; py < y1; ++py) {
        for (int px = x0; px < x1; ++px) {
            if (pixel_center_inside(poly, px, py)) {
                ++count;
            }
        }
    }
    return count;
}

std::vector<double> interior_angles_deg(const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    if (n < 3) {
        throw DefCharError("interior_angles_deg: polygon has fewer than 3 vertices");
    }
    std::vector<double> angles;
    angles.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point& prev = v[(i + n - 1) % n];
        const Point& curr = v[i];
        const Point& next = v[(i + 1) % n];
        const double ax = prev.x - curr.x;
        const double ay = prev.y - curr.y;
        const double bx = next.x - curr.x;
        const double by = next.y - curr.y;
        const double cross = ax * by - ay * bx;
        const double dot = ax * bx + ay * by;
        const double rad = std::atan2(std::fabs(cross), dot);
        angles.push_back(rad * 180.0 / 3.141592653589793238462643383279502884);
    }
    return angles;
}

double euclidean_distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

} // namespace defect_reasoner
