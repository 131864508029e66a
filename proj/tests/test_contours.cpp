#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <utility>

#include "numprep/contours.hpp"
#include "numprep/errors.hpp"
#include "numprep/raster.hpp"
#include "support/oracles.hpp"

using namespace numprep;

namespace {

BinaryImage make_binary(int w, int h, const std::vector<std::pair<int, int>>& fg) {
    GrayImage img(w, h, std::uint8_t{0});
    for (auto [x, y] : fg) img.set(x, y, 255);
    return BinaryImage(std::move(img));
}

BinaryImage filled_rect(int w, int h, Rect r) {
    GrayImage img(w, h, std::uint8_t{0});
    for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x) img.set(x, y, 255);
    return BinaryImage(std::move(img));
}

}  // namespace

TEST_CASE("single pixel yields a one-point contour") {
    BinaryImage img = make_binary(5, 5, {{2, 3}});
    auto cs = find_contours(img);
    REQUIRE(cs.size() == 1);
    REQUIRE(cs[0].points.size() == 1);
    CHECK(cs[0].points[0] == Point{2, 3});
    CHECK(contour_area(cs[0]) == doctest::Approx(0.0));
}

TEST_CASE("filled square traces its outer boundary from the top-left") {
    BinaryImage img = filled_rect(7, 7, {2, 2, 3, 3});
    auto cs = find_contours(img);
    REQUIRE(cs.size() == 1);
    const auto& pts = cs[0].points;
    CHECK(pts.front() == Point{2, 2});
    // the boundary of a 3x3 square has 8 pixels
    std::set<std::pair<int, int>> uniq;
    for (auto p : pts) uniq.insert({p.x, p.y});
    CHECK(uniq.size() == 8);
    CHECK_FALSE(uniq.count({3, 3}));  // interior pixel is not on the boundary
}

TEST_CASE("contour count equals the flood-fill component count") {
    rng::SplitMix r(606);
    for (int trial = 0; trial < 60; ++trial) {
        int w = 4 + (int)r.next_below(30);
        int h = 4 + (int)r.next_below(30);
        double density = 0.05 + 0.9 * r.next_double();
        BinaryImage img = oracles::random_binary(r, w, h, density);
        CHECK((int)find_contours(img).size() ==
              oracles::flood_fill_components(img));
    }
}

TEST_CASE("holes are not traced as separate contours") {
    // ring: foreground border, background center
    GrayImage g(7, 7, std::uint8_t{0});
    for (int y = 1; y <= 5; ++y)
        for (int x = 1; x <= 5; ++x)
            if (x == 1 || x == 5 || y == 1 || y == 5) g.set(x, y, 255);
    auto cs = find_contours(BinaryImage(std::move(g)));
    CHECK(cs.size() == 1);
}

TEST_CASE("shoelace area of an axis-aligned rectangle") {
    Contour c{{{0, 0}, {3, 0}, {3, 2}, {0, 2}}};
    CHECK(contour_area(c) == doctest::Approx(6.0));
    std::reverse(c.points.begin(), c.points.end());  // orientation-free
    CHECK(contour_area(c) == doctest::Approx(6.0));
}

TEST_CASE("perimeter of a closed path") {
    Contour c{{{0, 0}, {3, 0}, {3, 2}, {0, 2}}};
    CHECK(contour_perimeter(c) == doctest::Approx(10.0));
    Contour diag{{{0, 0}, {3, 4}}};
    CHECK(contour_perimeter(diag) == doctest::Approx(10.0));  // there and back
}

TEST_CASE("bounding box of scattered points") {
    Contour c{{{2, 1}, {6, 1}, {4, 5}}};
    Rect r = bounding_box(c);
    CHECK(r == Rect{2, 1, 5, 5});
    CHECK_THROWS_AS(bounding_box(Contour{}), EmptyContour);
}

TEST_CASE("polygon approximation collapses collinear runs") {
    Contour line;
    for (int i = 0; i < 10; ++i) line.points.push_back({i, 0});
    std::vector<Point> out = approx_polygon(line, 0.5);
    REQUIRE(out.size() == 2);
    CHECK(out.front() == Point{0, 0});
    CHECK(out.back() == Point{9, 0});
}

TEST_CASE("polygon approximation of a dense rectangle keeps the four corners") {
    Contour rect;
    for (int x = 0; x <= 20; ++x) rect.points.push_back({x, 0});
    for (int y = 1; y <= 10; ++y) rect.points.push_back({20, y});
    for (int x = 19; x >= 0; --x) rect.points.push_back({x, 10});
    for (int y = 9; y >= 1; --y) rect.points.push_back({0, y});
    double eps = 0.02 * contour_perimeter(rect);
    std::vector<Point> out = approx_polygon(rect, eps);
    REQUIRE(out.size() == 4);
    std::set<std::pair<int, int>> corners;
    for (auto p : out) corners.insert({p.x, p.y});
    CHECK(corners == std::set<std::pair<int, int>>{
                         {0, 0}, {20, 0}, {20, 10}, {0, 10}});
}

TEST_CASE("polygon approximation is monotone in epsilon") {
    rng::SplitMix r(17);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryImage img = oracles::random_binary(r, 24, 24, 0.45);
        for (const auto& c : find_contours(img)) {
            if (c.points.size() < 4) continue;
            std::size_t prev = c.points.size() + 1;
            for (double eps : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
                std::size_t n = approx_polygon(c, eps).size();
                CHECK(n <= prev);
                prev = n;
            }
        }
    }
}

TEST_CASE("convex hull of a point cloud") {
    std::vector<Point> pts = {{0, 0}, {4, 0}, {4, 4}, {0, 4},
                              {2, 2}, {1, 1}, {2, 0}};
    std::vector<Point> hull = convex_hull(pts);
    std::set<std::pair<int, int>> got;
    for (auto p : hull) got.insert({p.x, p.y});
    CHECK(got == std::set<std::pair<int, int>>{{0, 0}, {4, 0}, {4, 4}, {0, 4}});
    // collinear edge midpoints are dropped, so the square hull has 4 vertices
    CHECK(hull.size() == 4);
}

TEST_CASE("hull area bounds the contour area") {
    rng::SplitMix r(31);
    for (int trial = 0; trial < 30; ++trial) {
        BinaryImage img = oracles::random_binary(r, 20, 20, 0.4);
        for (const auto& c : find_contours(img)) {
            if (c.points.size() < 3) continue;
            std::vector<Point> hull = convex_hull(c.points);
            if (hull.size() < 3) continue;
            CHECK(polygon_area(hull) >= contour_area(c) - 1e-9);
        }
    }
}

TEST_CASE("fill_contour paints an even-odd polygon region") {
    GrayImage img(9, 9, std::uint8_t{200});
    Contour quad{{{1, 1}, {6, 1}, {6, 6}, {1, 6}}};
    GrayImage out = fill_contour(img, quad, 0);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x) {
            // Edge spans are half-open in y (standard scanline), so the
            // bottom row keeps only the explicitly painted contour corners.
            bool inside = (x >= 1 && x <= 6 && y >= 1 && y <= 5) ||
                          (y == 6 && (x == 1 || x == 6));
            CHECK(out.at(x, y) == (inside ? 0 : 200));
        }
    Contour oob{{{-1, 0}, {3, 0}, {3, 3}}};
    CHECK_THROWS_AS(fill_contour(img, oob, 0), OutOfBounds);
    CHECK_THROWS_AS(fill_contour(img, Contour{}, 0), EmptyContour);
}

TEST_CASE("filling a traced contour erases the whole component") {
    rng::SplitMix r(57);
    for (int trial = 0; trial < 40; ++trial) {
        BinaryImage img = oracles::random_binary(r, 16, 16, 0.35);
        auto cs = find_contours(img);
        if (cs.empty()) continue;
        std::size_t pick = r.next_below(cs.size());
        Point seed = cs[pick].points.front();
        auto member = oracles::flood_fill_pixels(img.gray(), seed.x, seed.y, 255);
        GrayImage work = fill_contour(img.gray(), cs[pick], 0);
        for (auto [x, y] : member) CHECK(work.at(x, y) == 0);
    }
}

TEST_CASE("largest_contour_bbox picks the biggest blob") {
    GrayImage g(20, 12, std::uint8_t{0});
    for (int y = 1; y <= 3; ++y)
        for (int x = 1; x <= 3; ++x) g.set(x, y, 255);  // area 9
    for (int y = 5; y <= 9; ++y)
        for (int x = 8; x <= 12; ++x) g.set(x, y, 255);  // area 25
    Rect r = largest_contour_bbox(BinaryImage(std::move(g)));
    CHECK(r == Rect{8, 5, 5, 5});
    GrayImage blank(6, 6, std::uint8_t{0});
    CHECK_THROWS_AS(largest_contour_bbox(BinaryImage(std::move(blank))),
                    NoForeground);
}

TEST_CASE("spot detector flags a solid dark square and ignores strokes") {
    // dark 8x8 square on a bright 28x28 background
    GrayImage img(28, 28, std::uint8_t{255});
    for (int y = 10; y < 18; ++y)
        for (int x = 6; x < 14; ++x) img.set(x, y, 0);
    SpotCriteria crit;
    auto spots = detect_quad_spots(img, crit);
    REQUIRE(spots.size() == 1);
    // traced-boundary shoelace area of an 8x8 block is 7*7
    CHECK(contour_area(spots[0]) == doctest::Approx(49.0));
    Rect bb = bounding_box(spots[0]);
    CHECK(bb == Rect{6, 10, 8, 8});

    // a thin 1px-wide stroke fails the solidity/vertex filters
    GrayImage stroke(28, 28, std::uint8_t{255});
    for (int y = 3; y < 25; ++y) stroke.set(14, y, 0);
    CHECK(detect_quad_spots(stroke, crit).empty());

    // blank image: nothing to detect
    GrayImage blank(28, 28, std::uint8_t{255});
    CHECK(detect_quad_spots(blank, crit).empty());
}

TEST_CASE("spot detector respects the area window") {
    SpotCriteria crit;
    // 2x2 blob: area fraction 4/784 is below the default 1% floor
    GrayImage tiny(28, 28, std::uint8_t{255});
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) tiny.set(x + 13, y + 13, 0);
    CHECK(detect_quad_spots(tiny, crit).empty());
    // near-total darkness exceeds the 50% ceiling
    GrayImage big(28, 28, std::uint8_t{255});
    for (int y = 1; y < 27; ++y)
        for (int x = 1; x < 27; ++x) big.set(x, y, 0);
    CHECK(detect_quad_spots(big, crit).empty());
}

TEST_CASE("spot criteria validation rejects nonsense windows") {
    SpotCriteria bad;
    bad.min_vertices = 9;
    bad.max_vertices = 4;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    SpotCriteria neg;
    neg.min_area_frac = -0.5;
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}
