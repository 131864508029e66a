#include "numprep/contours.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

#include "numprep/errors.hpp"

namespace numprep {

namespace {

// Clockwise Moore neighborhood with y growing downward.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

long long signed_area_2x(const std::vector<Point>& pts) {
    long long a = 0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = pts[i];
        const Point& q = pts[(i + 1) % n];
        a += static_cast<long long>(p.x) * q.y - static_cast<long long>(q.x) * p.y;
    }
    return a;
}

double sq_dist(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Perpendicular distance from p to the line through a and b; Euclidean
// distance to a when the chord is degenerate.
double chord_distance(const Point& p, const Point& a, const Point& b) {
    const double ux = b.x - a.x;
    const double uy = b.y - a.y;
    const double len = std::sqrt(ux * ux + uy * uy);
    if (len == 0.0) return std::sqrt(sq_dist(p, a));
    const double cross = ux * (p.y - a.y) - uy * (p.x - a.x);
    return std::abs(cross) / len;
}

// Open-chain Douglas-Peucker. Keeps chain[first] and chain[last]; interior
// points survive only when their distance to the current chord exceeds eps.
void simplify_chain(const std::vector<Point>& chain, double eps, std::vector<char>& keep,
                    std::size_t first, std::size_t last) {
    if (last <= first + 1) return;
    double dmax = -1.0;
    std::size_t split = first;
    for (std::size_t i = first + 1; i < last; ++i) {
        const double d = chord_distance(chain[i], chain[first], chain[last]);
        if (d > dmax) {
            dmax = d;
            split = i;
        }
    }
    if (dmax > eps) {
        keep[split] = 1;
        simplify_chain(chain, eps, keep, first, split);
        simplify_chain(chain, eps, keep, split, last);
    }
}

std::vector<Point> simplify_open(const std::vector<Point>& chain, double eps) {
    std::vector<char> keep(chain.size(), 0);
    keep.front() = 1;
    keep.back() = 1;
    simplify_chain(chain, eps, keep, 0, chain.size() - 1);
    std::vector<Point> out;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (keep[i]) out.push_back(chain[i]);
    }
    return out;
}

// Moore boundary trace of the component labeled `label`, starting at its
// topmost-leftmost pixel. The trace is deterministic, so once it stands on
// the start pixel about to repeat its first move the whole boundary would
// replay; stopping on that repeated directed edge closes the cycle exactly
// once. Stopping on mere re-entry would be wrong: when the start pixel is a
// cut vertex the boundary legitimately passes through it more than once.
std::vector<Point> trace_boundary(const std::vector<int>& labels, int w, int h, int label,
                                  Point start) {
    auto label_at = [&](int x, int y) -> int {
        if (x < 0 || y < 0 || x >= w || y >= h) return -1;
        return labels[static_cast<std::size_t>(y) * w + x];
    };
    auto dir_between = [](Point from, Point to) {
        for (int d = 0; d < 8; ++d) {
            if (from.x + kDx[d] == to.x && from.y + kDy[d] == to.y) return d;
        }
        return -1;
    };

    std::vector<Point> pts{start};
    Point p = start;
    // The start pixel is topmost-leftmost, so its west neighbor is outside
    // the component.
    Point back{start.x - 1, start.y};
    Point first_move{-1, -1};
    bool have_first_move = false;

    int d = (dir_between(p, back) + 1) % 8;
    int misses = 0;
    // Hard safety net; the directed-edge stop fires long before this does.
    long budget = 8L * (static_cast<long>(w) * h + 2) + 64;
    while (budget-- > 0) {
        const Point c{p.x + kDx[d], p.y + kDy[d]};
        if (label_at(c.x, c.y) == label) {
            if (p == start) {
                if (have_first_move && c == first_move) break;
                if (!have_first_move) {
                    first_move = c;
                    have_first_move = true;
                }
            }
            p = c;
            pts.push_back(p);
            d = (dir_between(p, back) + 1) % 8;
            misses = 0;
        } else {
            back = c;
            d = (d + 1) % 8;
            if (++misses == 8) break;  // isolated pixel
        }
    }
    // The loop learns the cycle closed one step after pushing the closing
    // start pixel; drop that duplicate so the polygon is open-ended.
    if (pts.size() > 1 && pts.back() == pts.front()) pts.pop_back();
    return pts;
}

}  // namespace

void SpotCriteria::validate() const {
    if (min_vertices < 3 || max_vertices < min_vertices) {
        throw std::invalid_argument("spot vertex window invalid");
    }
    if (min_solidity < 0.0 || min_solidity > 1.0) {
        throw std::invalid_argument("spot solidity must be in [0, 1]");
    }
    if (min_area_frac < 0.0 || max_area_frac > 1.0 || min_area_frac > max_area_frac) {
        throw std::invalid_argument("spot area fraction window invalid");
    }
    if (dp_epsilon_frac < 0.0) {
        throw std::invalid_argument("spot epsilon fraction must be >= 0");
    }
}

std::vector<Contour> find_contours(const BinaryImage& img) {
    if (img.empty()) throw std::invalid_argument("contours of empty image");
    const int w = img.width();
    const int h = img.height();
    std::vector<int> labels(static_cast<std::size_t>(w) * h, 0);
    std::vector<Point> starts;

    int next_label = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (img.at(x, y) != 255 || labels[static_cast<std::size_t>(y) * w + x] != 0) continue;
            ++next_label;
            starts.push_back(Point{x, y});
            std::queue<Point> q;
            labels[static_cast<std::size_t>(y) * w + x] = next_label;
            q.push(Point{x, y});
            while (!q.empty()) {
                const Point p = q.front();
                q.pop();
                for (int d = 0; d < 8; ++d) {
                    const int nx = p.x + kDx[d];
                    const int ny = p.y + kDy[d];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const std::size_t i = static_cast<std::size_t>(ny) * w + nx;
                    if (img.at(nx, ny) == 255 && labels[i] == 0) {
                        labels[i] = next_label;
                        q.push(Point{nx, ny});
                    }
                }
            }
        }
    }

    std::vector<Contour> out;
    out.reserve(starts.size());
    for (int label = 1; label <= next_label; ++label) {
        Contour c;
        c.points = trace_boundary(labels, w, h, label, starts[label - 1]);
        if (signed_area_2x(c.points) < 0) {
            std::reverse(c.points.begin(), c.points.end());
        }
        out.push_back(std::move(c));
    }
    return out;
}

double contour_area(const Contour& c) { return polygon_area(c.points); }

double polygon_area(const std::vector<Point>& pts) {
    if (pts.size() < 3) return 0.0;
    return std::abs(static_cast<double>(signed_area_2x(pts))) / 2.0;
}

double contour_perimeter(const Contour& c) {
    const std::size_t n = c.points.size();
    if (n < 2) return 0.0;
    double len = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        len += std::sqrt(sq_dist(c.points[i], c.points[(i + 1) % n]));
    }
    return len;
}

Rect bounding_box(const Contour& c) {
    if (c.points.empty()) throw EmptyContour("bounding box of empty contour");
    int minx = c.points[0].x, maxx = minx;
    int miny = c.points[0].y, maxy = miny;
    for (const Point& p : c.points) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    return Rect{minx, miny, maxx - minx + 1, maxy - miny + 1};
}

std::vector<Point> approx_polygon(const Contour& c, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
    const std::vector<Point>& pts = c.points;
    if (pts.size() <= 2) return pts;

    // Split the closed curve at its two mutually farthest points, first pair
    // in scan order on ties.
    std::size_t si = 0, sj = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = sq_dist(pts[i], pts[j]);
            if (d > best) {
                best = d;
                si = i;
                sj = j;
            }
        }
    }
    if (best == 0.0) return {pts[0]};  // all points coincide

    std::vector<Point> half_a(pts.begin() + si, pts.begin() + sj + 1);
    std::vector<Point> half_b(pts.begin() + sj, pts.end());
    half_b.insert(half_b.end(), pts.begin(), pts.begin() + si + 1);

    std::vector<Point> out = simplify_open(half_a, epsilon);
    const std::vector<Point> tail = simplify_open(half_b, epsilon);
    // tail starts at pts[sj] and ends at pts[si]; both are already present.
    out.insert(out.end(), tail.begin() + 1, tail.end() - 1);
    return out;
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;

    auto cross = [](const Point& o, const Point& a, const Point& b) {
        return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
               static_cast<long long>(a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

std::vector<Contour> detect_quad_spots(const GrayImage& img, const SpotCriteria& criteria) {
    criteria.validate();
    if (img.empty()) throw std::invalid_argument("spot detection on empty image");

    // Spots are dark: build a mask of pixels below the fixed mid cut. The cut
    // is independent of the later binarization level.
    GrayImage mask(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        mask.data[i] = img.data[i] < 127 ? 255 : 0;
    }

    const double frame = static_cast<double>(img.pixel_count());
    std::vector<Contour> kept;
    for (Contour& c : find_contours(BinaryImage(std::move(mask)))) {
        const double area = contour_area(c);
        const double frac = area / frame;
        if (frac < criteria.min_area_frac || frac > criteria.max_area_frac) continue;

        const double eps = criteria.dp_epsilon_frac * contour_perimeter(c);
        const std::size_t vertices = approx_polygon(c, eps).size();
        if (vertices < static_cast<std::size_t>(criteria.min_vertices) ||
            vertices > static_cast<std::size_t>(criteria.max_vertices)) {
            continue;
        }

        const double hull_area = polygon_area(convex_hull(c.points));
        const double solidity = hull_area > 0.0 ? area / hull_area : 0.0;
        if (solidity < criteria.min_solidity) continue;

        kept.push_back(std::move(c));
    }
    return kept;
}

GrayImage fill_contour(const GrayImage& img, const Contour& c, std::uint8_t value) {
    if (img.empty()) throw std::invalid_argument("fill on empty image");
    if (c.points.empty()) throw EmptyContour("fill of empty contour");
    for (const Point& p : c.points) {
        if (p.x < 0 || p.y < 0 || p.x >= img.width || p.y >= img.height) {
            throw OutOfBounds("contour point (" + std::to_string(p.x) + ", " +
                              std::to_string(p.y) + ") outside image");
        }
    }

    GrayImage out = img;
    const std::size_t n = c.points.size();
    std::vector<double> xs;
    for (int y = 0; y < img.height; ++y) {
        xs.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& p = c.points[i];
            const Point& q = c.points[(i + 1) % n];
            if (p.y == q.y) continue;
            const int y0 = std::min(p.y, q.y);
            const int y1 = std::max(p.y, q.y);
            if (y < y0 || y >= y1) continue;  // half-open span per edge
            const double t = static_cast<double>(y - p.y) / (q.y - p.y);
            xs.push_back(p.x + t * (q.x - p.x));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            const int x0 = std::max(0, static_cast<int>(std::ceil(xs[i] - 1e-9)));
            const int x1 = std::min(img.width - 1, static_cast<int>(std::floor(xs[i + 1] + 1e-9)));
            for (int x = x0; x <= x1; ++x) out.set(x, y, value);
        }
    }
    // Pixels on the contour itself count as inside.
    for (const Point& p : c.points) out.set(p.x, p.y, value);
    return out;
}

Rect largest_contour_bbox(const BinaryImage& img) {
    const std::vector<Contour> cs = find_contours(img);
    if (cs.empty()) throw NoForeground("image has no foreground pixels");
    std::size_t best = 0;
    double best_area = contour_area(cs[0]);
    for (std::size_t i = 1; i < cs.size(); ++i) {
        const double a = contour_area(cs[i]);
        if (a > best_area) {
            best_area = a;
            best = i;
        }
    }
    return bounding_box(cs[best]);
}

}  // namespace numprep
