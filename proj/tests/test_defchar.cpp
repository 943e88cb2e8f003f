#include "defect_reasoner/defchar.hpp"
#include "defect_reasoner/errors.hpp"

#include "oracles.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace defect_reasoner;

namespace {

DefectDataset single_image_dataset(RasterImage image, std::vector<GroundTruthDefect> truths) {
    DefectDataset dataset;
    dataset.categories = {"crack"};
    DatasetEntry entry;
    entry.id = "img";
    entry.image = std::move(image);
    entry.truths = std::move(truths);
    dataset.entries.push_back(std::move(entry));
    return dataset;
}

} // namespace

TEST_CASE("column layout: names, groups and combination subsets") {
    const auto& names = defchar_names();
    REQUIRE(names.size() == kNumDefChars);
    std::set<std::string_view> unique(names.begin(), names.end());
    CHECK(unique.size() == kNumDefChars);

    CHECK(defchar_group(defchar_column("defect_avg_hue")) == DefCharGroup::colour);
    CHECK(defchar_group(defchar_column("bg_bri_range")) == DefCharGroup::colour);
    CHECK(defchar_group(defchar_column("hue_difference")) == DefCharGroup::colour_complexity);
    CHECK(defchar_group(defchar_column("coverage")) == DefCharGroup::shape);
    CHECK(defchar_group(defchar_column("followed_turns")) == DefCharGroup::shape_complexity);
    CHECK(defchar_group(defchar_column("defect_size")) == DefCharGroup::meta);

    CHECK(combination_columns(FeatureCombination::color).size() == 24);
    CHECK(combination_columns(FeatureCombination::shape).size() == 9);
    CHECK(combination_columns(FeatureCombination::meta).size() == 2);
    CHECK(combination_columns(FeatureCombination::color_shape).size() == 33);
    CHECK(combination_columns(FeatureCombination::all).size() == 38);
}

TEST_CASE("background_region is the expanded box minus the defect") {
    const RasterImage image = make_image(100, 100, {50, 50, 50});
    // 10x10 defect centred at (50,50): bbox [45,55]^2, expansion 50% -> [40,60]^2.
    const Polygon defect = testutil::rect_polygon(45, 45, 10, 10);
    const auto bg = background_region(image, defect);
    // 20x20 box = 400 pixels, minus the 100 defect pixels.
    CHECK(bg.size() == 300);
    for (const PixelCoord& p : bg) {
        REQUIRE_FALSE(oracle::pixel_inside(defect, p.x, p.y));
        REQUIRE(p.x >= 40);
        REQUIRE(p.x < 60);
        REQUIRE(p.y >= 40);
        REQUIRE(p.y < 60);
    }
}

TEST_CASE("background_region clamps at the image border") {
    const RasterImage image = make_image(50, 50);
    const Polygon corner = testutil::rect_polygon(0, 0, 10, 10);
    const auto bg = background_region(image, corner);
    // Expanded box [-5,15]^2 clamps to [0,15]^2 -> 225 pixels minus 100.
    CHECK(bg.size() == 125);
    for (const PixelCoord& p : bg) {
        REQUIRE(p.x >= 0);
        REQUIRE(p.y >= 0);
        REQUIRE(p.x < 15);
        REQUIRE(p.y < 15);
    }
}

TEST_CASE("background_region fails when the defect fills the image") {
    const RasterImage image = make_image(10, 10);
    const Polygon everything = testutil::rect_polygon(0, 0, 10, 10);
    CHECK_THROWS_AS(background_region(image, everything), DefCharError);
    // extract falls back to whole-image-minus-defect, which is also empty here.
    CHECK_THROWS_AS(extract_defchars(image, everything, {}), DefCharError);
}

TEST_CASE("shape_info on pinned shapes") {
    SUBCASE("square") {
        const ShapeInfo s = shape_info(testutil::rect_polygon(0, 0, 10, 10));
        CHECK(s.number_of_edges == 4);
        CHECK(s.coverage == doctest::Approx(1.0));
        CHECK(s.aspect_ratio == doctest::Approx(1.0));
        CHECK(s.avg_turning_angle == 90);
        CHECK(s.mode_turning_angle == 90);
    }
    SUBCASE("right triangle") {
        const Polygon tri{{{0, 0}, {10, 0}, {0, 10}}};
        const ShapeInfo s = shape_info(normalize_polygon(tri));
        CHECK(s.number_of_edges == 3);
        CHECK(s.coverage == doctest::Approx(0.5));
        CHECK(s.aspect_ratio == doctest::Approx(1.0));
        CHECK(s.avg_turning_angle == 60); // angles 90, 45, 45
        CHECK(s.mode_turning_angle == 45);
    }
    SUBCASE("wide rectangle") {
        const ShapeInfo s = shape_info(testutil::rect_polygon(0, 0, 20, 5));
        CHECK(s.aspect_ratio == doctest::Approx(0.25));
    }
}

TEST_CASE("shape_info matches the shoelace and angle oracles on random polygons") {
    std::mt19937_64 rng(2025);
    for (int round = 0; round < 60; ++round) {
        const Polygon poly = testutil::random_polygon(rng, 50, 50, 3.0, 30.0);
        const ShapeInfo s = shape_info(poly);
        REQUIRE(s.number_of_edges == static_cast<int>(poly.vertices.size()));
        const BBox box = bounding_box(poly);
        REQUIRE(s.coverage ==
                doctest::Approx(oracle::shoelace_area(poly) / (box.width() * box.height()))
                    .epsilon(1e-9));
        REQUIRE(s.coverage <= 1.0 + 1e-12);
        REQUIRE(s.aspect_ratio > 0.0);
        REQUIRE(s.aspect_ratio <= 1.0);
        REQUIRE(s.avg_turning_angle >= 1);
        REQUIRE(s.avg_turning_angle <= 180);
    }
}

TEST_CASE("coverage is 1 exactly for axis-aligned rectangles and below otherwise") {
    CHECK(shape_info(testutil::rect_polygon(3, 4, 17, 9)).coverage == doctest::Approx(1.0));
    const Polygon diamond{{{10, 0}, {20, 10}, {10, 20}, {0, 10}}};
    CHECK(shape_info(diamond).coverage == doctest::Approx(0.5));
}

TEST_CASE("shape_complexity on pinned shapes") {
    SUBCASE("square: equal edges, all turns alike, no small angles") {
        const ShapeComplexity c = shape_complexity(testutil::rect_polygon(0, 0, 10, 10));
        CHECK(c.edge_ratio == doctest::Approx(1.0));
        CHECK(c.followed_turns == doctest::Approx(1.0));
        CHECK(c.small_turns == doctest::Approx(0.0));
        CHECK(c.reversed_turns == doctest::Approx(0.0));
    }
    SUBCASE("right triangle has two 45-degree corners") {
        const Polygon tri = normalize_polygon(Polygon{{{0, 0}, {10, 0}, {0, 10}}});
        const ShapeComplexity c = shape_complexity(tri);
        CHECK(c.small_turns == doctest::Approx(2.0 / 3.0));
        CHECK(c.followed_turns == doctest::Approx(1.0));
    }
    SUBCASE("concave arrowhead has a reversed turn") {
        const Polygon arrow{{{0, 0}, {10, 4}, {20, 0}, {10, 20}}};
        const ShapeComplexity c = shape_complexity(normalize_polygon(arrow));
        CHECK(c.reversed_turns > 0.0);
    }
}

TEST_CASE("convex polygons follow every turn; followed + reversed account for all turns") {
    std::mt19937_64 rng(404);
    int convex_seen = 0;
    for (int round = 0; round < 80; ++round) {
        const Polygon poly = testutil::random_polygon(rng, 0, 0, 5.0, 25.0);
        const ShapeComplexity c = shape_complexity(poly);
        const auto angles = interior_angles_deg(poly);
        const bool strictly_convex =
            std::all_of(angles.begin(), angles.end(), [](double a) { return a < 179.5; }) &&
            signed_area(poly) > 0.0 &&
            std::none_of(angles.begin(), angles.end(), [](double a) { return a <= 0.5; });
        // Star polygons around a centre need not be convex; detect via turn mix.
        if (c.reversed_turns == 0.0 && strictly_convex) {
            CHECK(c.followed_turns == doctest::Approx(1.0));
            ++convex_seen;
        }
        REQUIRE(c.followed_turns + c.reversed_turns <= 1.0 + 1e-12);
        // No collinear vertices in these polygons: the split is exhaustive.
        const std::size_t n = poly.vertices.size();
        const double total = c.followed_turns + c.reversed_turns;
        REQUIRE(std::llround(total * double(n)) == static_cast<long long>(n));
    }
    CHECK(convex_seen > 0);

    // A guaranteed convex case.
    const Polygon hexagon{{{10, 0}, {20, 5}, {20, 15}, {10, 20}, {0, 15}, {0, 5}}};
    const ShapeComplexity c = shape_complexity(normalize_polygon(hexagon));
    CHECK(c.followed_turns == doctest::Approx(1.0));
    CHECK(c.reversed_turns == doctest::Approx(0.0));
}

TEST_CASE("meta_info: size oracle and neighbour categories") {
    const RasterImage image = make_image(800, 200);
    SUBCASE("defect size equals the brute-force count on random polygons") {
        std::mt19937_64 rng(7331);
        for (int round = 0; round < 50; ++round) {
            const Polygon poly = testutil::random_polygon(rng, 100, 100, 3.0, 60.0);
            const MetaInfo meta = meta_info(image, poly, {});
            REQUIRE(meta.defect_size == oracle::pixel_count(poly, 0, 0, 800, 200));
            REQUIRE(meta.defect_size >= 1);
        }
    }
    SUBCASE("lone defect reports no neighbour") {
        const Polygon only = testutil::rect_polygon(10, 10, 20, 20);
        CHECK(meta_info(image, only, {}).neighbour_distance == 2);
    }
    SUBCASE("50px apart is a short distance") {
        const Polygon a = testutil::rect_polygon(0, 0, 10, 10);
        const std::vector<Polygon> others = {testutil::rect_polygon(60, 0, 10, 10)};
        CHECK(meta_info(image, a, others).neighbour_distance == 0);
    }
    SUBCASE("500px apart is a long distance") {
        const Polygon a = testutil::rect_polygon(0, 0, 10, 10);
        const std::vector<Polygon> others = {testutil::rect_polygon(510, 0, 10, 10)};
        CHECK(meta_info(image, a, others).neighbour_distance == 1);
    }
    SUBCASE("boundary: exactly 100px is still short") {
        const Polygon a = testutil::rect_polygon(0, 0, 10, 10);
        const std::vector<Polygon> others = {testutil::rect_polygon(110, 0, 10, 10)};
        CHECK(meta_info(image, a, others).neighbour_distance == 0);
    }
}

TEST_CASE("extract_defchars composes the full 38-value row") {
    RasterImage image = make_image(60, 60, {0, 255, 255}); // cyan background
    const Polygon defect = testutil::rect_polygon(25, 25, 10, 10);
    for (const PixelCoord& p : rasterize_polygon(defect, 60, 60)) {
        image.at(p.x, p.y) = {255, 0, 0}; // red defect
    }
    const DefCharRow row = extract_defchars(image, defect, {});
    CHECK(row[defchar_column("hue_difference")] == doctest::Approx(1.0));
    CHECK(row[defchar_column("coverage")] == doctest::Approx(1.0));
    CHECK(row[defchar_column("followed_turns")] == doctest::Approx(1.0));
    CHECK(row[defchar_column("neighbour_distance")] == doctest::Approx(2.0));
    CHECK(row[defchar_column("defect_size")] == doctest::Approx(100.0));
    CHECK(row[defchar_column("defect_avg_hue")] == doctest::Approx(0.0));
    CHECK(row[defchar_column("bg_avg_hue")] == doctest::Approx(180.0));

    SUBCASE("defect identical to background has zero complexity differences") {
        const RasterImage plain = make_image(60, 60, {90, 120, 200});
        const DefCharRow flat = extract_defchars(plain, defect, {});
        CHECK(flat[defchar_column("hue_difference")] == doctest::Approx(0.0));
        CHECK(flat[defchar_column("sat_difference")] == doctest::Approx(0.0));
        CHECK(flat[defchar_column("bri_difference")] == doctest::Approx(0.0));
    }
}

TEST_CASE("translating polygon and image content together leaves the row unchanged") {
    std::mt19937_64 rng(99);
    const int dx = 13, dy = 7;
    RasterImage image = make_image(120, 120, {40, 40, 40});
    // Textured patch so colour stats are non-trivial.
    for (int y = 0; y < 120; ++y) {
        for (int x = 0; x < 120; ++x) {
            image.at(x, y) = {static_cast<std::uint8_t>((x * 7 + y * 13) % 256),
                              static_cast<std::uint8_t>((x * 3) % 256),
                              static_cast<std::uint8_t>((y * 5) % 256)};
        }
    }
    RasterImage shifted = make_image(120, 120, {40, 40, 40});
    for (int y = 0; y < 120; ++y) {
        for (int x = 0; x < 120; ++x) {
            const int sx = x + dx, sy = y + dy;
            if (sx < 120 && sy < 120) {
                shifted.at(sx, sy) = image.at(x, y);
            }
        }
    }
    for (int round = 0; round < 10; ++round) {
        Polygon poly = testutil::random_polygon(rng, 45, 45, 4.0, 18.0);
        Polygon moved = poly;
        for (Point& p : moved.vertices) {
            p.x += dx;
            p.y += dy;
        }
        const DefCharRow a = extract_defchars(image, poly, {});
        const DefCharRow b = extract_defchars(shifted, moved, {});
        for (std::size_t col = 0; col < kNumDefChars; ++col) {
            REQUIRE(a[col] == doctest::Approx(b[col]).epsilon(1e-12));
        }
    }
}

TEST_CASE("build_matrix shape and errors") {
    RasterImage image = make_image(80, 40, {10, 60, 110});
    std::vector<GroundTruthDefect> truths = {{testutil::rect_polygon(5, 5, 10, 10), 0},
                                             {testutil::rect_polygon(40, 5, 12, 9), 0},
                                             {testutil::rect_polygon(60, 20, 8, 8), 0}};
    const DefCharMatrix matrix = build_matrix(single_image_dataset(std::move(image), truths));
    CHECK(matrix.rows() == 3);
    CHECK(matrix.row_ids[0] == "img:0");
    CHECK(matrix.row_ids[2] == "img:2");
    for (const DefCharRow& row : matrix.raw) {
        CHECK(row.size() == kNumDefChars);
    }
    CHECK_THROWS_AS(build_matrix(DefectDataset{}), DefCharError);
}

TEST_CASE("minmax_scale maps columns into [0,1] and is invertible") {
    DefCharMatrix matrix;
    matrix.row_ids = {"a", "b", "c"};
    matrix.raw.assign(3, DefCharRow{});
    // Column 0: [2,4,6]; column 1: constant 5; column 2: [0,100,50].
    matrix.raw[0][0] = 2;
    matrix.raw[1][0] = 4;
    matrix.raw[2][0] = 6;
    matrix.raw[0][1] = 5;
    matrix.raw[1][1] = 5;
    matrix.raw[2][1] = 5;
    matrix.raw[1][2] = 100;
    matrix.raw[2][2] = 50;
    minmax_scale(matrix);
    CHECK(matrix.scaled[0][0] == doctest::Approx(0.0));
    CHECK(matrix.scaled[1][0] == doctest::Approx(0.5));
    CHECK(matrix.scaled[2][0] == doctest::Approx(1.0));
    CHECK(matrix.scaled[0][1] == 0.0);
    CHECK(matrix.scaled[2][1] == 0.0);
    CHECK(matrix.scaled[1][2] == doctest::Approx(1.0));

    std::mt19937_64 rng(1);
    DefCharMatrix random;
    random.raw.resize(20);
    random.row_ids.resize(20, "x");
    for (auto& row : random.raw) {
        for (double& v : row) {
            v = uniform_unit(rng) * 300.0 - 100.0;
        }
    }
    minmax_scale(random);
    for (std::size_t r = 0; r < random.rows(); ++r) {
        for (std::size_t col = 0; col < kNumDefChars; ++col) {
            REQUIRE(random.scaled[r][col] >= 0.0);
            REQUIRE(random.scaled[r][col] <= 1.0);
            const double back = unscale_value(random.scaled[r][col], random.scaling[col]);
            REQUIRE(std::fabs(back - random.raw[r][col]) <= 1e-9);
        }
    }
}

TEST_CASE("matrix CSV has the expected header and row count") {
    RasterImage image = make_image(40, 40, {200, 100, 20});
    std::vector<GroundTruthDefect> truths = {{testutil::rect_polygon(4, 4, 8, 8), 0},
                                             {testutil::rect_polygon(20, 20, 10, 6), 0}};
    DefCharMatrix matrix = build_matrix(single_image_dataset(std::move(image), truths));
    minmax_scale(matrix);
    const std::string csv = matrix_to_csv(matrix, false);
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == 3); // header + 2 rows
    CHECK(csv.rfind("defect_id,defect_avg_hue,", 0) == 0);
    CHECK(csv.find("neighbour_distance\n") != std::string::npos);
    const std::string scaled_csv = matrix_to_csv(matrix, true);
    CHECK(std::count(scaled_csv.begin(), scaled_csv.end(), '\n') == 3);
}
