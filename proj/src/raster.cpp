#include "numprep/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "numprep/errors.hpp"

namespace numprep {

namespace {

void require_dims(int w, int h) {
    if (w < 1 || h < 1) {
        throw std::invalid_argument("image dimensions must be >= 1, got " +
                                    std::to_string(w) + "x" + std::to_string(h));
    }
}

void require_nonempty(const GrayImage& img) {
    if (img.empty()) throw std::invalid_argument("operation on empty image");
}

long round_half_away(double v) {
    // std::lround rounds halfway cases away from zero, which is the project
    // wide rounding rule.
    return std::lround(v);
}

std::uint8_t clamp_byte(long v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

double lerp(double a, double b, double t) { return a + t * (b - a); }

// Source coordinate for an output index under pixel-center mapping, clamped
// to the valid source range.
double src_coord(int dst, int in_size, int out_size) {
    double s = (dst + 0.5) * (static_cast<double>(in_size) / out_size) - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(in_size - 1));
}

}  // namespace

RGBImage::RGBImage(int w, int h, std::uint8_t fill) {
    require_dims(w, h);
    width = w;
    height = h;
    data.assign(static_cast<std::size_t>(w) * h * 3, fill);
}

RGBImage::RGBImage(int w, int h, std::vector<std::uint8_t> bytes) {
    require_dims(w, h);
    if (bytes.size() != static_cast<std::size_t>(w) * h * 3) {
        throw std::invalid_argument("RGB byte count does not match dimensions");
    }
    width = w;
    height = h;
    data = std::move(bytes);
}

void RGBImage::set(int x, int y, std::uint8_t rv, std::uint8_t gv, std::uint8_t bv) {
    const std::size_t i = index(x, y);
    data[i] = rv;
    data[i + 1] = gv;
    data[i + 2] = bv;
}

GrayImage::GrayImage(int w, int h, std::uint8_t fill) {
    require_dims(w, h);
    width = w;
    height = h;
    data.assign(static_cast<std::size_t>(w) * h, fill);
}

GrayImage::GrayImage(int w, int h, std::vector<std::uint8_t> bytes) {
    require_dims(w, h);
    if (bytes.size() != static_cast<std::size_t>(w) * h) {
        throw std::invalid_argument("gray byte count does not match dimensions");
    }
    width = w;
    height = h;
    data = std::move(bytes);
}

BinaryImage::BinaryImage(GrayImage img) {
    for (std::uint8_t v : img.data) {
        if (v != 0 && v != 255) {
            throw std::invalid_argument("binary image pixel outside {0, 255}");
        }
    }
    img_ = std::move(img);
}

GrayImage to_grayscale(const RGBImage& img) {
    if (img.empty()) throw std::invalid_argument("operation on empty image");
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            // round(0.299 R + 0.587 G + 0.114 B) with exact decimal weights:
            // (299 R + 587 G + 114 B + 500) / 1000 truncated is half away
            // from zero for the non-negative range.
            const long v = (299L * img.r(x, y) + 587L * img.g(x, y) +
                            114L * img.b(x, y) + 500L) / 1000L;
            out.set(x, y, clamp_byte(v));
        }
    }
    return out;
}

GrayImage resize(const GrayImage& img, int out_w, int out_h) {
    require_nonempty(img);
    if (out_w < 1 || out_h < 1) {
        throw ZeroDimension("resize target must be >= 1x1");
    }
    GrayImage out(out_w, out_h);
    for (int oy = 0; oy < out_h; ++oy) {
        const double sy = src_coord(oy, img.height, out_h);
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = sy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
            const double sx = src_coord(ox, img.width, out_w);
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = sx - x0;
            const double top = lerp(img.at(x0, y0), img.at(x1, y0), fx);
            const double bot = lerp(img.at(x0, y1), img.at(x1, y1), fx);
            out.set(ox, oy, clamp_byte(round_half_away(lerp(top, bot, fy))));
        }
    }
    return out;
}

RGBImage resize(const RGBImage& img, int out_w, int out_h) {
    if (img.empty()) throw std::invalid_argument("operation on empty image");
    if (out_w < 1 || out_h < 1) {
        throw ZeroDimension("resize target must be >= 1x1");
    }
    RGBImage out(out_w, out_h);
    for (int oy = 0; oy < out_h; ++oy) {
        const double sy = src_coord(oy, img.height, out_h);
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = sy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
            const double sx = src_coord(ox, img.width, out_w);
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = sx - x0;
            std::array<std::uint8_t, 3> px{};
            for (int c = 0; c < 3; ++c) {
                auto ch = [&](int x, int y) -> double {
                    const std::size_t i = (static_cast<std::size_t>(y) * img.width + x) * 3;
                    return img.data[i + c];
                };
                const double top = lerp(ch(x0, y0), ch(x1, y0), fx);
                const double bot = lerp(ch(x0, y1), ch(x1, y1), fx);
                px[c] = clamp_byte(round_half_away(lerp(top, bot, fy)));
            }
            out.set(ox, oy, px[0], px[1], px[2]);
        }
    }
    return out;
}

GrayImage resize_nearest(const GrayImage& img, int out_w, int out_h) {
    require_nonempty(img);
    if (out_w < 1 || out_h < 1) {
        throw ZeroDimension("resize target must be >= 1x1");
    }
    GrayImage out(out_w, out_h);
    for (int oy = 0; oy < out_h; ++oy) {
        const int sy = static_cast<int>(round_half_away(src_coord(oy, img.height, out_h)));
        for (int ox = 0; ox < out_w; ++ox) {
            const int sx = static_cast<int>(round_half_away(src_coord(ox, img.width, out_w)));
            out.set(ox, oy, img.at(sx, sy));
        }
    }
    return out;
}

GrayImage median_blur(const GrayImage& img, int k) {
    require_nonempty(img);
    if (k < 1) throw std::invalid_argument("kernel size must be >= 1");
    if (k % 2 == 0) throw EvenKernel("median kernel must be odd, got " + std::to_string(k));
    if (k > std::min(img.width, img.height)) {
        throw KernelTooLarge("median kernel " + std::to_string(k) +
                             " exceeds image extent " + std::to_string(img.width) + "x" +
                             std::to_string(img.height));
    }
    if (k == 1) return img;

    GrayImage out(img.width, img.height);
    const int r = k / 2;
    const int mid = (k * k) / 2;  // k*k is odd, element index of the median
    std::array<int, 256> counts{};
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            counts.fill(0);
            for (int dy = -r; dy <= r; ++dy) {
                const int sy = std::clamp(y + dy, 0, img.height - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    const int sx = std::clamp(x + dx, 0, img.width - 1);
                    ++counts[img.at(sx, sy)];
                }
            }
            int seen = 0;
            int v = 0;
            while (v < 256) {
                seen += counts[v];
                if (seen > mid) break;
                ++v;
            }
            out.set(x, y, static_cast<std::uint8_t>(v));
        }
    }
    return out;
}

GrayImage invert(const GrayImage& img) {
    require_nonempty(img);
    GrayImage out = img;
    for (auto& v : out.data) v = static_cast<std::uint8_t>(255 - v);
    return out;
}

}  // namespace numprep
