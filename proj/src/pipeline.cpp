#include "numprep/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "numprep/errors.hpp"

namespace numprep {

void PipelineConfig::validate() const {
    if (target_size < 8) throw std::invalid_argument("target_size must be >= 8");
    if (fixed_level < 0 || fixed_level > 255)
        throw std::invalid_argument("fixed_level must be in [0,255]");
    if (median_k < 1 || median_k % 2 == 0)
        throw std::invalid_argument("median_k must be odd and >= 1");
    if (crop_margin < 0) throw std::invalid_argument("crop_margin must be >= 0");
    spot_criteria.validate();
}

namespace {

// Stages 2..8, shared by both input flavours. `gray` is the resized grayscale
// image; the stage order below is fixed and must not be rearranged.
PreprocessResult finish(GrayImage gray, const PipelineConfig& cfg, bool snapshots) {
    StageTrace trace;
    if (snapshots) {
        trace.post_resize = gray;
        trace.post_gray = gray;
    }

    GrayImage blurred = median_blur(gray, cfg.median_k);
    if (snapshots) trace.post_blur = blurred;

    GrayImage cleaned = blurred;
    if (cfg.spot_removal_enabled) {
        trace.spots = detect_quad_spots(blurred, cfg.spot_criteria);
        for (const Contour& c : trace.spots) cleaned = fill_contour(cleaned, c, 255);
    }
    if (snapshots) trace.post_spot_removal = cleaned;

    int level = cfg.fixed_level;
    if (cfg.threshold_mode == ThresholdMode::otsu) {
        try {
            level = otsu_threshold(histogram(cleaned));
        } catch (const DegenerateHistogram&) {
            // A constant image cannot be thresholded; treat it like any other
            // input with nothing to crop.
            throw BlankImage("constant image, no separable foreground");
        }
    }
    trace.threshold_level = level;

    BinaryImage bin = polarity_binarize(cleaned, level);
    if (snapshots) trace.post_binarize = bin.gray();

    Rect box{};
    try {
        box = largest_contour_bbox(bin);
    } catch (const NoForeground&) {
        throw BlankImage("no foreground after binarization");
    }
    const GrayImage& bg = bin.gray();
    int x0 = std::max(0, box.x - cfg.crop_margin);
    int y0 = std::max(0, box.y - cfg.crop_margin);
    int x1 = std::min(bg.width, box.x + box.w + cfg.crop_margin);
    int y1 = std::min(bg.height, box.y + box.h + cfg.crop_margin);
    trace.crop_rect = Rect{x0, y0, x1 - x0, y1 - y0};

    GrayImage crop(x1 - x0, y1 - y0);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) crop.set(x - x0, y - y0, bg.at(x, y));

    int side = std::max(crop.width, crop.height);
    trace.square_side = side;
    trace.pad_left = (side - crop.width) / 2;
    trace.pad_top = (side - crop.height) / 2;
    GrayImage square(side, side, 0);
    for (int y = 0; y < crop.height; ++y)
        for (int x = 0; x < crop.width; ++x)
            square.set(x + trace.pad_left, y + trace.pad_top, crop.at(x, y));

    GrayImage final_gray = resize_nearest(square, cfg.target_size, cfg.target_size);
    return PreprocessResult{BinaryImage(std::move(final_gray)), std::move(trace)};
}

}  // namespace

PreprocessResult preprocess(const GrayImage& img, const PipelineConfig& cfg,
                            bool snapshots) {
    cfg.validate();
    return finish(resize(img, cfg.target_size, cfg.target_size), cfg, snapshots);
}

PreprocessResult preprocess(const RGBImage& img, const PipelineConfig& cfg,
                            bool snapshots) {
    cfg.validate();
    return finish(to_grayscale(resize(img, cfg.target_size, cfg.target_size)), cfg,
                  snapshots);
}

PreprocessResult preprocess(const ImageVariant& img, const PipelineConfig& cfg,
                            bool snapshots) {
    return std::visit([&](const auto& im) { return preprocess(im, cfg, snapshots); },
                      img);
}

std::vector<BatchItem> preprocess_batch(const std::vector<ImageVariant>& imgs,
                                        const PipelineConfig& cfg) {
    cfg.validate();
    std::vector<BatchItem> out;
    out.reserve(imgs.size());
    for (const ImageVariant& im : imgs) {
        BatchItem item;
        try {
            item.image = preprocess(im, cfg).image;
        } catch (const BlankImage& e) {
            item.error = e.what();
        }
        out.push_back(std::move(item));
    }
    return out;
}

GrayImage raw_baseline(const GrayImage& img, const PipelineConfig& cfg) {
    cfg.validate();
    return resize(img, cfg.target_size, cfg.target_size);
}

GrayImage raw_baseline(const RGBImage& img, const PipelineConfig& cfg) {
    cfg.validate();
    return to_grayscale(resize(img, cfg.target_size, cfg.target_size));
}

GrayImage raw_baseline(const ImageVariant& img, const PipelineConfig& cfg) {
    return std::visit([&](const auto& im) { return raw_baseline(im, cfg); }, img);
}

}  // namespace numprep
