// Independent reference implementations used to cross-check the library.
// Everything here is deliberately naive: straight transcriptions of the
// definitions, with none of the library's shortcuts, so agreement between
// the two is meaningful.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "numprep/binarize.hpp"
#include "numprep/raster.hpp"
#include "numprep/rng.hpp"

namespace oracles {

// Median filter: per-pixel window gather + sort, clamped borders.
inline numprep::GrayImage naive_median(const numprep::GrayImage& img, int k) {
    const int r = k / 2;
    numprep::GrayImage out(img.width, img.height);
    std::vector<std::uint8_t> window;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            window.clear();
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    int sx = std::clamp(x + dx, 0, img.width - 1);
                    int sy = std::clamp(y + dy, 0, img.height - 1);
                    window.push_back(img.at(sx, sy));
                }
            }
            std::sort(window.begin(), window.end());
            out.set(x, y, window[window.size() / 2]);
        }
    }
    return out;
}

// Otsu by brute force: evaluate the between-class variance at all 255 cut
// points with exact integer arithmetic and return the lowest maximizer.
// sigma_b^2(t) ~ (S0*n1 - S1*n0)^2 / (n0*n1), constant factors dropped.
// Returns -1 when every cut leaves one side empty (constant histogram).
inline int brute_force_otsu(const numprep::Histogram256& hist) {
    long long total_n = 0, total_s = 0;
    for (int v = 0; v < 256; ++v) {
        total_n += hist.counts[v];
        total_s += static_cast<long long>(hist.counts[v]) * v;
    }
    int best_t = -1;
    __int128 best_num = -1, best_den = 1;
    long long n0 = 0, s0 = 0;
    for (int t = 0; t < 255; ++t) {
        n0 += hist.counts[t];
        s0 += static_cast<long long>(hist.counts[t]) * t;
        const long long n1 = total_n - n0;
        const long long s1 = total_s - s0;
        if (n0 == 0 || n1 == 0) continue;
        const __int128 diff = static_cast<__int128>(s0) * n1 -
                              static_cast<__int128>(s1) * n0;
        const __int128 num = diff * diff;
        const __int128 den = static_cast<__int128>(n0) * n1;
        // num/den > best_num/best_den  <=>  num*best_den > best_num*den
        if (best_t < 0 || num * best_den > best_num * den) {
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }
    return best_t;
}

// 8-connected component count of the foreground via BFS flood fill.
inline int flood_fill_components(const numprep::BinaryImage& img) {
    const numprep::GrayImage& g = img.gray();
    std::vector<char> seen(g.data.size(), 0);
    int components = 0;
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * g.width + x;
            if (g.data[i] != 255 || seen[i]) continue;
            ++components;
            std::queue<std::pair<int, int>> q;
            q.push({x, y});
            seen[i] = 1;
            while (!q.empty()) {
                auto [cx, cy] = q.front();
                q.pop();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= g.width || ny >= g.height)
                            continue;
                        const std::size_t j =
                            static_cast<std::size_t>(ny) * g.width + nx;
                        if (g.data[j] == 255 && !seen[j]) {
                            seen[j] = 1;
                            q.push({nx, ny});
                        }
                    }
                }
            }
        }
    }
    return components;
}

// Pixel set of the 8-connected component containing (sx, sy).
inline std::vector<std::pair<int, int>> flood_fill_pixels(
    const numprep::GrayImage& g, int sx, int sy, std::uint8_t value) {
    std::vector<char> seen(g.data.size(), 0);
    std::vector<std::pair<int, int>> pixels;
    if (g.at(sx, sy) != value) return pixels;
    std::queue<std::pair<int, int>> q;
    q.push({sx, sy});
    seen[static_cast<std::size_t>(sy) * g.width + sx] = 1;
    while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        pixels.push_back({cx, cy});
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = cx + dx, ny = cy + dy;
                if (nx < 0 || ny < 0 || nx >= g.width || ny >= g.height) continue;
                const std::size_t j = static_cast<std::size_t>(ny) * g.width + nx;
                if (g.at(nx, ny) == value && !seen[j]) {
                    seen[j] = 1;
                    q.push({nx, ny});
                }
            }
        }
    }
    return pixels;
}

// Eigenvalues of a symmetric matrix by the classical Jacobi rotation method.
// Returns eigenvalues sorted descending. Row-major n x n input.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n) {
    auto at = [&](int r, int c) -> double& { return a[r * n + c]; };
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        if (off < 1e-24) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(at(p, q)) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = at(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

// ------------------------------------------------------------ test inputs

inline numprep::GrayImage random_gray(numprep::rng::SplitMix& rng, int w, int h) {
    numprep::GrayImage img(w, h);
    for (auto& p : img.data)
        p = static_cast<std::uint8_t>(rng.next_below(256));
    return img;
}

inline numprep::BinaryImage random_binary(numprep::rng::SplitMix& rng, int w,
                                          int h, double density) {
    numprep::GrayImage img(w, h);
    for (auto& p : img.data) p = rng.chance(density) ? 255 : 0;
    return numprep::BinaryImage(std::move(img));
}

}  // namespace oracles
