#pragma once

#include <cstdint>
#include <vector>

#include "numprep/raster.hpp"

namespace numprep {

struct Point {
    int x = 0;
    int y = 0;

    bool operator==(const Point&) const = default;
};

/// Closed boundary: the last point connects back to the first. Contours
/// produced by find_contours step between 8-neighbors and are oriented so
/// that their signed shoelace area is non-negative.
struct Contour {
    std::vector<Point> points;
};

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const Rect&) const = default;
};

/// Acceptance window for quadrilateral-like dark blobs.
struct SpotCriteria {
    int min_vertices = 4;
    int max_vertices = 8;
    double min_solidity = 0.90;
    double min_area_frac = 0.01;
    double max_area_frac = 0.50;
    double dp_epsilon_frac = 0.02;

    void validate() const;  // throws std::invalid_argument
};

/// Outer boundaries of all 8-connected foreground (255) components, one
/// contour per component, in raster-scan discovery order. Hole boundaries
/// are not traced.
std::vector<Contour> find_contours(const BinaryImage& img);

/// Absolute shoelace area of the closed point sequence. A single point has
/// area 0.
double contour_area(const Contour& c);

/// Length of the closed path through the points, including the closing edge.
double contour_perimeter(const Contour& c);

/// Tight axis-aligned bounding box. Throws EmptyContour for a contour with
/// no points.
Rect bounding_box(const Contour& c);

/// Closed-curve Douglas-Peucker simplification: the contour is split at its
/// two mutually farthest points and each half keeps the points whose
/// perpendicular distance to the current chord exceeds epsilon.
std::vector<Point> approx_polygon(const Contour& c, double epsilon);

/// Convex hull (monotone chain), collinear points dropped.
std::vector<Point> convex_hull(std::vector<Point> pts);

/// Absolute shoelace area of an arbitrary closed vertex list.
double polygon_area(const std::vector<Point>& pts);

/// Finds dark blobs that look like filled quadrilaterals: the image is cut
/// at intensity 127 into a dark mask, and each mask component is kept when
/// its simplified polygon vertex count, solidity and area fraction of the
/// frame all fall inside the criteria windows.
std::vector<Contour> detect_quad_spots(const GrayImage& img, const SpotCriteria& criteria);

/// Sets every pixel inside or on the closed contour to `value` (scanline
/// even-odd fill over the polygon through the contour points). Throws
/// OutOfBounds when a contour point lies outside the image.
GrayImage fill_contour(const GrayImage& img, const Contour& c, std::uint8_t value);

/// Bounding box of the largest-area contour, ties broken by earliest
/// discovery. Throws NoForeground when the image has no foreground pixel.
Rect largest_contour_bbox(const BinaryImage& img);

}  // namespace numprep
