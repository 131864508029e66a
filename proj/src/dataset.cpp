#include "numprep/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "numprep/errors.hpp"
#include "numprep/rng.hpp"

namespace numprep {

namespace {

// ---------------------------------------------------------------- CSV

// Parses comma-separated text with double-quote quoting ("" escapes a quote).
// Rows are terminated by \n, \r\n, or a lone \r outside quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;  // row has content beyond a bare newline

    auto end_field = [&] {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                field_started = true;
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                [[fallthrough]];
            case '\n':
                if (field_started || !field.empty()) end_row();
                break;
            default:
                field += c;
                field_started = true;
                break;
        }
    }
    if (in_quotes) throw MalformedCsv("unterminated quoted field");
    if (field_started || !field.empty()) end_row();
    return rows;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

bool parse_digit(const std::string& s, int& out) {
    if (s.size() != 1 || s[0] < '0' || s[0] > '9') {
        // tolerate multi-char numerics like "07"
        try {
            std::size_t used = 0;
            int v = std::stoi(s, &used);
            if (used != s.size() || v < 0 || v > 9) return false;
            out = v;
            return true;
        } catch (...) {
            return false;
        }
    }
    out = s[0] - '0';
    return true;
}

// ---------------------------------------------------------------- glyphs

using Pt = std::array<double, 2>;
using Polyline = std::vector<Pt>;

// Digits are drawn in a unit box (y down, spanning ~[0.01, 0.99] vertically)
// and squeezed horizontally by kAspect at render time. All shapes are open
// stroke paths: closed rings would read as solid blobs to the contour stage.
constexpr double kAspect = 0.62;

Polyline arc(double cx, double cy, double rx, double ry, double deg_from,
             double deg_to, int segments) {
    Polyline p;
    for (int i = 0; i <= segments; ++i) {
        double t = (deg_from + (deg_to - deg_from) * i / segments) *
                   std::numbers::pi / 180.0;
        p.push_back({cx + rx * std::cos(t), cy - ry * std::sin(t)});
    }
    return p;
}

const std::vector<std::vector<Polyline>>& glyph_templates() {
    static const std::vector<std::vector<Polyline>> t = [] {
        std::vector<std::vector<Polyline>> g(10);
        // 0: tall oval, open on the right
        g[0] = {arc(0.5, 0.5, 0.47, 0.49, 35, 325, 11)};
        // 1: vertical stem with a top-left hook
        g[1] = {{{0.68, 0.03}, {0.54, 0.01}, {0.38, 0.07}, {0.32, 0.20}},
                {{0.68, 0.03}, {0.67, 0.35}, {0.69, 0.65}, {0.60, 0.99}}};
        // 2: top bow, diagonal, base bar
        g[2] = {{{0.28, 0.20}, {0.38, 0.04}, {0.62, 0.01}, {0.77, 0.14},
                 {0.73, 0.34}, {0.46, 0.58}, {0.26, 0.78}, {0.23, 0.99}},
                {{0.23, 0.99}, {0.78, 0.96}}};
        // 3: double bump facing right
        g[3] = {{{0.26, 0.09}, {0.46, 0.01}, {0.69, 0.05}, {0.77, 0.20},
                 {0.62, 0.37}, {0.44, 0.46}, {0.63, 0.52}, {0.79, 0.67},
                 {0.70, 0.87}, {0.45, 0.99}, {0.22, 0.91}}};
        // 4: right stem crossed by a diagonal and bar
        g[4] = {{{0.72, 0.01}, {0.74, 0.50}, {0.70, 0.99}},
                {{0.72, 0.01}, {0.24, 0.62}, {0.81, 0.62}}};
        // 5: flag top, open lower bowl
        g[5] = {{{0.75, 0.01}, {0.31, 0.03}, {0.27, 0.40}, {0.55, 0.36},
                 {0.75, 0.50}, {0.77, 0.73}, {0.58, 0.94}, {0.27, 0.99}}};
        // 6: spiral, curl left open
        g[6] = {{{0.70, 0.01}, {0.45, 0.09}, {0.30, 0.30}, {0.26, 0.58},
                 {0.32, 0.84}, {0.52, 0.99}, {0.68, 0.88}, {0.70, 0.68},
                 {0.55, 0.58}}};
        // 7: roof, diagonal, crossbar
        g[7] = {{{0.22, 0.01}, {0.78, 0.03}, {0.56, 0.44}, {0.46, 0.70},
                 {0.42, 0.99}},
                {{0.30, 0.54}, {0.69, 0.54}}};
        // 8: S-snake
        g[8] = {{{0.70, 0.07}, {0.50, 0.01}, {0.31, 0.11}, {0.33, 0.30},
                 {0.55, 0.43}, {0.72, 0.58}, {0.69, 0.84}, {0.46, 0.99},
                 {0.26, 0.89}}};
        // 9: upper loop joined to a long right tail. The loop starts inside
        // the tail stroke (one connected component, so cropping keeps both)
        // and stops short of closing, leaving an escape corridor at the top
        // so the counter never becomes an enclosed hole.
        g[9] = {arc(0.52, 0.24, 0.32, 0.22, -10, 260, 10),
                {{0.84, 0.01}, {0.87, 0.45}, {0.78, 0.99}}};
        return g;
    }();
    return t;
}

double dist2_to_segment(double px, double py, const Pt& a, const Pt& b) {
    double vx = b[0] - a[0], vy = b[1] - a[1];
    double wx = px - a[0], wy = py - a[1];
    double vv = vx * vx + vy * vy;
    double t = vv > 0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
    double dx = wx - t * vx, dy = wy - t * vy;
    return dx * dx + dy * dy;
}

// Paints digit strokes (value 0) and marks `mask` where ink landed.
void render_strokes(GrayImage& img, std::vector<std::uint8_t>* mask, int d,
                    double scale, double dx, double dy) {
    if (d < 0 || d > 9) throw std::invalid_argument("digit must be 0..9");
    if (scale <= 0) throw std::invalid_argument("scale must be positive");
    double span = (std::min(img.width, img.height) - 2) * scale;
    double cx = (img.width - 1) / 2.0 + dx;
    double cy = (img.height - 1) / 2.0 + dy;
    double radius =
        3.0 * std::clamp(scale, 1.0, 1.2) * std::min(img.width, img.height) / 63.0;
    double r2 = radius * radius;

    for (const Polyline& line : glyph_templates()[d]) {
        for (std::size_t i = 0; i + 1 < line.size(); ++i) {
            Pt a{cx + (line[i][0] - 0.5) * span * kAspect,
                 cy + (line[i][1] - 0.5) * span};
            Pt b{cx + (line[i + 1][0] - 0.5) * span * kAspect,
                 cy + (line[i + 1][1] - 0.5) * span};
            int x0 = std::max(0, (int)std::floor(std::min(a[0], b[0]) - radius - 1));
            int x1 = std::min(img.width - 1,
                              (int)std::ceil(std::max(a[0], b[0]) + radius + 1));
            int y0 = std::max(0, (int)std::floor(std::min(a[1], b[1]) - radius - 1));
            int y1 = std::min(img.height - 1,
                              (int)std::ceil(std::max(a[1], b[1]) + radius + 1));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x)
                    if (dist2_to_segment(x, y, a, b) <= r2) {
                        img.set(x, y, 0);
                        if (mask) (*mask)[(std::size_t)y * img.width + x] = 1;
                    }
        }
    }
}

bool quad_hits_mask(const std::array<double, 8>& q,
                    const std::vector<std::uint8_t>& mask, int w, int h) {
    double xmin = q[0], xmax = q[0], ymin = q[1], ymax = q[1];
    for (int i = 1; i < 4; ++i) {
        xmin = std::min(xmin, q[2 * i]);
        xmax = std::max(xmax, q[2 * i]);
        ymin = std::min(ymin, q[2 * i + 1]);
        ymax = std::max(ymax, q[2 * i + 1]);
    }
    int x0 = std::max(0, (int)std::floor(xmin)), x1 = std::min(w - 1, (int)std::ceil(xmax));
    int y0 = std::max(0, (int)std::floor(ymin)), y1 = std::min(h - 1, (int)std::ceil(ymax));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (mask[(std::size_t)y * w + x] && point_in_quad(q, x, y)) return true;
    return false;
}

}  // namespace

// ---------------------------------------------------------------- loading

LoadResult load_labeled(const std::string& csv_path, const std::string& image_dir,
                        const CsvColumns& cols) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw FileNotFound("cannot open CSV: " + csv_path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto rows = parse_csv(buf.str());
    if (rows.empty()) throw MalformedCsv("CSV has no header row: " + csv_path);

    int fn_col = find_column(rows[0], cols.filename);
    int dg_col = find_column(rows[0], cols.digit);
    if (fn_col < 0) throw MissingColumn("CSV lacks column '" + cols.filename + "'");
    if (dg_col < 0) throw MissingColumn("CSV lacks column '" + cols.digit + "'");

    LoadResult result;
    std::unordered_set<std::string> seen;
    int needed = std::max(fn_col, dg_col) + 1;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        int line = static_cast<int>(r) + 1;
        const auto& row = rows[r];
        if ((int)row.size() < needed) {
            result.errors.push_back({line, "", "too few fields"});
            continue;
        }
        const std::string& fname = row[fn_col];
        if (fname.empty()) {
            result.errors.push_back({line, "", "empty filename"});
            continue;
        }
        int digit = 0;
        if (!parse_digit(row[dg_col], digit)) {
            result.errors.push_back({line, fname, "label not a digit 0..9: '" + row[dg_col] + "'"});
            continue;
        }
        if (!seen.insert(fname).second) {
            result.errors.push_back({line, fname, "duplicate filename"});
            continue;
        }
        try {
            GrayImage img = read_pgm((std::filesystem::path(image_dir) / fname).string());
            result.dataset.items.push_back(
                {ImageVariant(std::move(img)), digit, "csv;line=" + std::to_string(line), fname});
        } catch (const Error& e) {
            result.errors.push_back({line, fname, e.what()});
        }
    }
    return result;
}

// ---------------------------------------------------------------- split

void SplitSpec::validate() const {
    if (!(train_frac > 0.0) || !(train_frac <= 1.0))
        throw std::invalid_argument("train_frac must be in (0, 1]");
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds,
                                                const SplitSpec& spec) {
    spec.validate();
    const std::size_t n = ds.items.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    rng::SplitMix rng(spec.seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(idx[i - 1], idx[rng.next_below(i)]);

    // 1e-9 slack so fractions like 0.85*100 do not round up through FP error
    auto n_train = (std::size_t)std::clamp(
        std::ceil(spec.train_frac * (double)n - 1e-9), 0.0, (double)n);
    std::pair<LabeledDataset, LabeledDataset> out;
    for (std::size_t i = 0; i < n; ++i) {
        auto& side = i < n_train ? out.first : out.second;
        side.items.push_back(ds.items[idx[i]]);
    }
    return out;
}

// ---------------------------------------------------------------- synthesis

void SynthConfig::validate() const {
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    for (double p : {salt_pepper_rate, spot_probability, invert_probability,
                     grid_lines_probability})
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("probabilities must be in [0,1]");
    if (jitter_translate < 0 || jitter_scale < 0 || jitter_scale >= 1)
        throw std::invalid_argument("bad jitter configuration");
    if (!(glyph_scale > 0.0 && glyph_scale <= 1.5))
        throw std::invalid_argument("glyph_scale must be in (0, 1.5]");
}

GrayImage render_digit(int d, int canvas, double scale, double dx, double dy) {
    if (canvas < 16) throw std::invalid_argument("canvas too small");
    GrayImage img(canvas, canvas, 255);
    render_strokes(img, nullptr, d, scale, dx, dy);
    return img;
}

bool point_in_quad(const std::array<double, 8>& q, double x, double y) {
    bool inside = false;
    for (int i = 0; i < 4; ++i) {
        int j = (i + 1) % 4;
        double yi = q[2 * i + 1], yj = q[2 * j + 1];
        double xi = q[2 * i], xj = q[2 * j];
        if ((yi > y) != (yj > y) && x < xi + (y - yi) * (xj - xi) / (yj - yi))
            inside = !inside;
    }
    return inside;
}

void stamp_quad(GrayImage& img, const std::array<double, 8>& quad,
                std::uint8_t value) {
    double xmin = quad[0], xmax = quad[0], ymin = quad[1], ymax = quad[1];
    for (int i = 1; i < 4; ++i) {
        xmin = std::min(xmin, quad[2 * i]);
        xmax = std::max(xmax, quad[2 * i]);
        ymin = std::min(ymin, quad[2 * i + 1]);
        ymax = std::max(ymax, quad[2 * i + 1]);
    }
    int x0 = std::max(0, (int)std::floor(xmin));
    int x1 = std::min(img.width - 1, (int)std::ceil(xmax));
    int y0 = std::max(0, (int)std::floor(ymin));
    int y1 = std::min(img.height - 1, (int)std::ceil(ymax));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (point_in_quad(quad, x, y)) img.set(x, y, value);
}

std::optional<std::array<double, 8>> spot_from_tag(const std::string& tag) {
    auto pos = tag.find("spot=");
    if (pos == std::string::npos) return std::nullopt;
    std::string v = tag.substr(pos + 5);
    if (auto semi = v.find(';'); semi != std::string::npos) v = v.substr(0, semi);
    if (v == "none") return std::nullopt;
    std::istringstream in(v);
    std::array<double, 8> q{};
    for (double& c : q)
        if (!(in >> c)) return std::nullopt;
    return q;
}

LabeledDataset generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    const int W = kSynthCanvas;
    LabeledDataset ds;
    ds.items.reserve(cfg.count);

    for (int idx = 0; idx < cfg.count; ++idx) {
        // One independent stream per corruption so corpora generated from
        // configs differing in a single probability stay pairable per image.
        std::uint64_t base = rng::mix(cfg.seed, (std::uint64_t)idx);
        rng::SplitMix rg_glyph(rng::mix(base, 0));
        rng::SplitMix rg_grid(rng::mix(base, 1));
        rng::SplitMix rg_invert(rng::mix(base, 2));
        rng::SplitMix rg_spot(rng::mix(base, 3));
        rng::SplitMix rg_salt(rng::mix(base, 4));

        int digit = idx % 10;
        GrayImage img(W, W, 255);
        std::vector<std::uint8_t> ink((std::size_t)W * W, 0);

        double dx = rg_glyph.uniform(-cfg.jitter_translate, cfg.jitter_translate);
        double dy = rg_glyph.uniform(-cfg.jitter_translate, cfg.jitter_translate);
        double s = 1.0 + rg_glyph.uniform(-cfg.jitter_scale, cfg.jitter_scale);
        render_strokes(img, &ink, digit, cfg.glyph_scale * s, dx, dy);

        if (rg_grid.chance(cfg.grid_lines_probability)) {
            int period = 7 + (int)rg_grid.next_below(4);
            int phase_x = (int)rg_grid.next_below((std::uint64_t)period);
            int phase_y = (int)rg_grid.next_below((std::uint64_t)period);
            for (int y = 0; y < W; ++y)
                for (int x = 0; x < W; ++x)
                    if ((x % period == phase_x || y % period == phase_y) &&
                        img.at(x, y) == 255)
                        img.set(x, y, kGridValue);
        }

        if (rg_invert.chance(cfg.invert_probability)) img = invert(img);

        std::string spot_tag = "none";
        if (rg_spot.chance(cfg.spot_probability)) {
            std::array<double, 8> quad{};
            double shrink = 1.0;
            bool placed = true;
            auto rect_at = [](double cx, double cy, double hw,
                              double hh) -> std::array<double, 8> {
                return {cx - hw, cy - hh, cx + hw, cy - hh,
                        cx + hw, cy + hh, cx - hw, cy + hh};
            };
            auto zone_clear = [&](double cx, double cy, double hw, double hh) {
                // Clearance must survive downscaling: a sub-2.5px gap at
                // working resolution can close under resampling plus the
                // median blur, welding the spot to the stroke and hiding it
                // from the detector. Expand per axis, not via the diagonal,
                // so the margin holds along the edges too.
                return !quad_hits_mask(rect_at(cx, cy, hw + 6.0, hh + 6.0),
                                       ink, W, W);
            };
            for (int attempt = 0;; ++attempt) {
                // Axis-aligned rectangles with random size and aspect. Tilted
                // edges rasterize as staircases at working resolution, and a
                // single retained staircase corner already pushes the
                // simplified outline past the detector's vertex cap (the
                // blur's four 1-px corner chamfers use up the slack between 4
                // and 8). Aligned edges stay exactly straight through
                // resampling, so the outline is reliably a quadrilateral.
                double hw = rg_spot.uniform(8.0, 15.0) * shrink;
                double hh = rg_spot.uniform(8.0, 15.0) * shrink;
                // Fully on-canvas, with a small inset: a border-clipped spot
                // picks up a ragged partial-coverage column after resampling
                // and stops reading as a clean rectangle.
                double cx = rg_spot.uniform(hw + 3.0, (double)W - 3.0 - hw);
                double cy = rg_spot.uniform(hh + 3.0, (double)W - 3.0 - hh);
                quad = rect_at(cx, cy, hw, hh);
                if (!cfg.spot_avoid_glyph) break;
                if (zone_clear(cx, cy, hw, hh)) break;
                // Crowded canvases get progressively smaller candidates, but
                // never so small that the spot drops below the detector's
                // minimum area at working resolution.
                if (attempt > 0 && attempt % 40 == 0)
                    shrink = std::max(0.75, shrink * 0.85);
                if (attempt >= 300) {
                    // Random placement keeps colliding; sweep the canvas with
                    // the smallest acceptable spot and take the first clear
                    // position. Only when even that fails is the spot dropped:
                    // better no spot than one that destroys the labeled digit.
                    placed = false;
                    const double fhw = 6.0, fhh = 6.0;
                    for (double sy = fhh + 3.0; sy <= W - 3.0 - fhh && !placed;
                         sy += 1.0)
                        for (double sx = fhw + 3.0; sx <= W - 3.0 - fhw;
                             sx += 1.0)
                            if (zone_clear(sx, sy, fhw, fhh)) {
                                quad = rect_at(sx, sy, fhw, fhh);
                                placed = true;
                                break;
                            }
                    break;
                }
            }
            if (placed) {
                stamp_quad(img, quad, 0);  // drawn post-inversion: spots are dark
                // Full-ish precision: the tag is the removal ground truth, and
                // a coarser print can put boundary pixels on the wrong side.
                char buf[200];
                std::snprintf(buf, sizeof buf,
                              "%.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f", quad[0],
                              quad[1], quad[2], quad[3], quad[4], quad[5],
                              quad[6], quad[7]);
                spot_tag = buf;
            }
        }

        for (int y = 0; y < W; ++y)
            for (int x = 0; x < W; ++x)
                if (rg_salt.chance(cfg.salt_pepper_rate))
                    img.set(x, y, rg_salt.chance(0.5) ? 0 : 255);

        char fname[32];
        std::snprintf(fname, sizeof fname, "synth_%05d.pgm", idx);
        std::string tag = "synth;idx=" + std::to_string(idx) +
                          ";digit=" + std::to_string(digit) + ";spot=" + spot_tag;
        ds.items.push_back({ImageVariant(std::move(img)), digit, tag, fname});
    }
    return ds;
}

// ---------------------------------------------------------------- PGM

void write_pgm(const GrayImage& img, const std::string& path) {
    if (img.empty()) throw std::invalid_argument("cannot write empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileNotFound("cannot write: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              (std::streamsize)img.data.size());
    if (!out) throw FileNotFound("write failed: " + path);
}

namespace {

// Reads one PNM header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            tok += (char)c;
            break;
        }
    }
    while ((c = in.get()) != EOF && !std::isspace(c)) tok += (char)c;
    return tok;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound("cannot open: " + path);
    std::string magic = pnm_token(in);
    if (magic != "P5") throw UnsupportedFormat("not a binary PGM (P5): " + path);
    auto parse_dim = [&](const char* what) {
        std::string t = pnm_token(in);
        try {
            std::size_t used = 0;
            long v = std::stol(t, &used);
            if (used != t.size() || v < 1 || v > 1 << 20)
                throw std::invalid_argument("");
            return (int)v;
        } catch (...) {
            throw UnsupportedFormat(std::string("bad ") + what + ": " + path);
        }
    };
    int w = parse_dim("width");
    int h = parse_dim("height");
    std::string maxval = pnm_token(in);
    if (maxval != "255") throw UnsupportedFormat("maxval must be 255: " + path);
    // pnm_token consumed exactly one trailing whitespace byte via get(); the
    // raster starts right here.
    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), (std::streamsize)img.data.size());
    if (in.gcount() != (std::streamsize)img.data.size())
        throw Truncated("raster shorter than promised: " + path);
    return img;
}

}  // namespace numprep
