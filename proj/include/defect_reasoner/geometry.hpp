#pragma once

#include <cstdint>
#include <vector>

namespace defect_reasoner {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct PixelCoord {
    int x = 0;
    int y = 0;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

struct BBox {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    double area() const { return width() * height(); }
};

// A defect region outline. After normalisation the vertex list has no
// consecutive duplicates and is oriented counter-clockwise
// (signed shoelace area > 0).
struct Polygon {
    std::vector<Point> vertices;
};

double signed_area(const Polygon& poly);
BBox bounding_box(const Polygon& poly);

// Merges consecutive duplicate vertices (including a repeated closing
// vertex) and orients the result counter-clockwise. Throws IngestError if
// fewer than 3 distinct vertices remain or the enclosed area is zero.
Polygon normalize_polygon(const Polygon& poly);

// Clamps vertices into [0,width] x [0,height] and re-normalises.
// Throws IngestError when clamping degenerates the polygon.
Polygon clamp_polygon(const Polygon& poly, double width, double height);

// Even-odd rule. Shared by every pixel-level operation so that IoU,
// defect size and colour sampling all agree on region membership.
bool point_in_polygon(const Polygon& poly, double x, double y);

inline bool pixel_center_inside(const Polygon& poly, int px, int py) {
    return point_in_polygon(poly, px + 0.5, py + 0.5);
}

// All pixels whose centres fall inside the polygon, restricted to
// 0 <= x < clip_width, 0 <= y < clip_height when clip dimensions are
// positive. Row-major order (y outer, x inner).
std::vector<PixelCoord> rasterize_polygon(const Polygon& poly,
                                          int clip_width = -1,
                                          int clip_height = -1);

std::int64_t rasterized_pixel_count(const Polygon& poly,
                                    int clip_width = -1,
                                    int clip_height = -1);

// Interior angle at every vertex, in degrees within [0, 180]. Reflex
// corners report the angle between the incident edges, which keeps every
// value inside the declared range.
std::vector<double> interior_angles_deg(const Polygon& poly);

double euclidean_distance(const Point& a, const Point& b);

} // namespace defect_reasoner
