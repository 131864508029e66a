#pragma once

#include <optional>
#include <string>
#include <vector>

#include "numprep/binarize.hpp"
#include "numprep/contours.hpp"
#include "numprep/raster.hpp"

namespace numprep {

enum class ThresholdMode { fixed_level, otsu };

/**
 * @brief Knobs for the cleaning pipeline.
 *
 * The stage order itself is fixed: resize, grayscale, median blur, spot
 * removal, majority-polarity binarization, crop to the largest blob, pad to
 * square, nearest resize back to target_size. Only the knobs below vary.
 * The final interpolation is always nearest-neighbor so the output stays
 * binary.
 */
struct PipelineConfig {
    int target_size = 28;
    int median_k = 3;
    ThresholdMode threshold_mode = ThresholdMode::fixed_level;
    int fixed_level = 127;
    SpotCriteria spot_criteria{};
    bool spot_removal_enabled = true;
    int crop_margin = 2;

    void validate() const;  // throws std::invalid_argument
};

/**
 * @brief Per-stage record of one preprocess run.
 *
 * The scalar fields (threshold level, crop geometry, detected spots) are
 * always filled on success. Image snapshots are captured only when requested;
 * post_resize holds the grayscale view of the resized input.
 */
struct StageTrace {
    std::optional<GrayImage> post_resize;
    std::optional<GrayImage> post_gray;
    std::optional<GrayImage> post_blur;
    std::optional<GrayImage> post_spot_removal;
    std::optional<GrayImage> post_binarize;

    int threshold_level = -1;
    std::vector<Contour> spots;     // contours removed, in post-blur coordinates
    Rect crop_rect{};               // in target_size x target_size coordinates
    int pad_left = 0;               // crop placement inside the padded square
    int pad_top = 0;
    int square_side = 0;
};

struct PreprocessResult {
    BinaryImage image;
    StageTrace trace;
};

/// Runs the full cleaning pipeline. Throws BlankImage when no foreground
/// survives binarization (the caller is expected to skip such inputs).
PreprocessResult preprocess(const GrayImage& img, const PipelineConfig& cfg,
                            bool snapshots = false);
PreprocessResult preprocess(const RGBImage& img, const PipelineConfig& cfg,
                            bool snapshots = false);
PreprocessResult preprocess(const ImageVariant& img, const PipelineConfig& cfg,
                            bool snapshots = false);

/// One batch slot: either a cleaned image or the error that skipped it.
struct BatchItem {
    std::optional<BinaryImage> image;
    std::string error;

    bool ok() const { return image.has_value(); }
};

/// Preprocesses every input independently; failures are recorded per slot and
/// never abort the batch. Output order matches input order.
std::vector<BatchItem> preprocess_batch(const std::vector<ImageVariant>& imgs,
                                        const PipelineConfig& cfg);

/// Comparison pathway: resize to target_size square and convert to grayscale,
/// nothing else.
GrayImage raw_baseline(const GrayImage& img, const PipelineConfig& cfg);
GrayImage raw_baseline(const RGBImage& img, const PipelineConfig& cfg);
GrayImage raw_baseline(const ImageVariant& img, const PipelineConfig& cfg);

}  // namespace numprep
