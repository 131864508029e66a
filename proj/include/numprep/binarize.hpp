#pragma once

#include <array>
#include <cstdint>

#include "numprep/raster.hpp"

namespace numprep {

/// 256-bin intensity histogram.
struct Histogram256 {
    std::array<std::uint64_t, 256> counts{};

    std::uint64_t total() const;
    int distinct_values() const;
};

Histogram256 histogram(const GrayImage& img);

/// Otsu's threshold: the smallest t in [0, 254] maximizing the between-class
/// variance w0 * w1 * (mu0 - mu1)^2, where class 0 holds values <= t. The
/// argmax comparison is exact (integer cross-multiplication) for images up to
/// 400k pixels, so equal-score plateaus always resolve to the smallest t.
/// Throws DegenerateHistogram when fewer than two distinct values are present.
int otsu_threshold(const Histogram256& hist);

/// Which side of a threshold the majority of pixels fall on.
/// The low side holds pixels with value < level.
struct ThresholdDecision {
    int level = 0;
    bool majority_low = false;
};

ThresholdDecision decide_polarity(const GrayImage& img, int level);

/// Majority-polarity binarization: pixels are split at `level` (low side
/// strictly below), the majority side becomes background 0 and the minority
/// side becomes foreground 255. An exact tie sends the high side to 0.
/// The result therefore always has foreground <= half the pixels.
BinaryImage polarity_binarize(const GrayImage& img, int level);

}  // namespace numprep
