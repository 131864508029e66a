#include "numprep/binarize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "numprep/errors.hpp"

namespace numprep {

namespace {

using U128 = unsigned __int128;

// Exact comparison of d_a^2 / den_a > d_b^2 / den_b via cross-multiplication.
// With N <= 400k pixels every product stays below 2^127.
bool score_greater(U128 num_a, std::uint64_t den_a, U128 num_b, std::uint64_t den_b) {
    return num_a * den_b > num_b * den_a;
}

}  // namespace

std::uint64_t Histogram256::total() const {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

int Histogram256::distinct_values() const {
    int d = 0;
    for (auto c : counts) {
        if (c > 0) ++d;
    }
    return d;
}

Histogram256 histogram(const GrayImage& img) {
    if (img.empty()) throw std::invalid_argument("histogram of empty image");
    Histogram256 h;
    for (std::uint8_t v : img.data) ++h.counts[v];
    return h;
}

int otsu_threshold(const Histogram256& hist) {
    if (hist.distinct_values() < 2) {
        throw DegenerateHistogram("need at least two distinct values");
    }
    const std::uint64_t n = hist.total();
    std::uint64_t sum = 0;
    for (int v = 0; v < 256; ++v) sum += static_cast<std::uint64_t>(v) * hist.counts[v];

    const bool exact = n <= 400000;
    int best_t = -1;
    U128 best_num = 0;
    std::uint64_t best_den = 1;
    long double best_fp = -1.0L;

    std::uint64_t n0 = 0;
    std::uint64_t s0 = 0;
    for (int t = 0; t <= 254; ++t) {
        n0 += hist.counts[t];
        s0 += static_cast<std::uint64_t>(t) * hist.counts[t];
        const std::uint64_t n1 = n - n0;
        if (n0 == 0 || n1 == 0) continue;
        const std::uint64_t s1 = sum - s0;

        // Between-class variance, up to the constant 1/N^2:
        //   w0 w1 (mu0 - mu1)^2 = (s0 n1 - s1 n0)^2 / (N^2 n0 n1)
        if (exact) {
            const __int128 d = static_cast<__int128>(s0) * n1 - static_cast<__int128>(s1) * n0;
            const U128 num = static_cast<U128>(d < 0 ? -d : d) * static_cast<U128>(d < 0 ? -d : d);
            const std::uint64_t den = n0 * n1;
            if (best_t < 0 || score_greater(num, den, best_num, best_den)) {
                best_t = t;
                best_num = num;
                best_den = den;
            }
        } else {
            const long double d = static_cast<long double>(s0) * n1 - static_cast<long double>(s1) * n0;
            const long double score = d * d / (static_cast<long double>(n0) * n1);
            if (best_t < 0 || score > best_fp) {
                best_t = t;
                best_fp = score;
            }
        }
    }
    return best_t;
}

ThresholdDecision decide_polarity(const GrayImage& img, int level) {
    if (img.empty()) throw std::invalid_argument("polarity of empty image");
    if (level < 0 || level > 255) {
        throw std::invalid_argument("threshold level out of range: " + std::to_string(level));
    }
    std::size_t low = 0;
    for (std::uint8_t v : img.data) {
        if (v < level) ++low;
    }
    const std::size_t high = img.pixel_count() - low;
    // An exact tie counts as a high-side majority.
    return ThresholdDecision{level, low > high};
}

BinaryImage polarity_binarize(const GrayImage& img, int level) {
    const ThresholdDecision d = decide_polarity(img, level);
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const bool is_low = img.data[i] < d.level;
        const bool is_background = (is_low == d.majority_low);
        out.data[i] = is_background ? 0 : 255;
    }
    return BinaryImage(std::move(out));
}

}  // namespace numprep
