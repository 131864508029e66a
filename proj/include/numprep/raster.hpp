#pragma once

#include <cstdint>
#include <variant>
#include <vector>

namespace numprep {

/**
 * @brief 8-bit interleaved RGB image, row-major.
 *
 * data holds width*height*3 bytes ordered R,G,B per pixel. A default
 * constructed image is empty; any image passed to an operation must have
 * width >= 1 and height >= 1.
 */
struct RGBImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    RGBImage() = default;
    RGBImage(int w, int h, std::uint8_t fill = 0);
    RGBImage(int w, int h, std::vector<std::uint8_t> bytes);

    bool empty() const { return width == 0 || height == 0; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    std::uint8_t r(int x, int y) const { return data[index(x, y)]; }
    std::uint8_t g(int x, int y) const { return data[index(x, y) + 1]; }
    std::uint8_t b(int x, int y) const { return data[index(x, y) + 2]; }
    void set(int x, int y, std::uint8_t rv, std::uint8_t gv, std::uint8_t bv);

    bool operator==(const RGBImage&) const = default;

private:
    std::size_t index(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * 3;
    }
};

/**
 * @brief 8-bit single channel image, row-major.
 */
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0);
    GrayImage(int w, int h, std::vector<std::uint8_t> bytes);

    bool empty() const { return width == 0 || height == 0; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    std::uint8_t at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    void set(int x, int y, std::uint8_t v) {
        data[static_cast<std::size_t>(y) * width + x] = v;
    }

    bool operator==(const GrayImage&) const = default;
};

/**
 * @brief Grayscale image whose pixels are restricted to {0, 255}.
 *
 * The constructor validates the restriction, so holding a BinaryImage is
 * proof that every pixel is either 0 or 255.
 */
class BinaryImage {
public:
    BinaryImage() = default;
    explicit BinaryImage(GrayImage img);  // throws std::invalid_argument otherwise

    const GrayImage& gray() const { return img_; }
    int width() const { return img_.width; }
    int height() const { return img_.height; }
    bool empty() const { return img_.empty(); }
    std::uint8_t at(int x, int y) const { return img_.at(x, y); }

    bool operator==(const BinaryImage&) const = default;

private:
    GrayImage img_;
};

using ImageVariant = std::variant<GrayImage, RGBImage>;

/// Luma conversion: round(0.299 R + 0.587 G + 0.114 B), rounding half away
/// from zero. Computed in integer arithmetic so the decimal weights are exact.
GrayImage to_grayscale(const RGBImage& img);

/// Bilinear resize with pixel-center mapping src = (dst + 0.5) * in/out - 0.5,
/// source coordinates clamped to the image. Output values are rounded half
/// away from zero. Resizing to the identical size is byte-exact.
/// Throws ZeroDimension when out_w or out_h is < 1.
GrayImage resize(const GrayImage& img, int out_w, int out_h);
RGBImage resize(const RGBImage& img, int out_w, int out_h);

/// Nearest-neighbor resize with the same pixel-center mapping. A BinaryImage
/// fed through this keeps its {0, 255} value set.
GrayImage resize_nearest(const GrayImage& img, int out_w, int out_h);

/// Median filter with a k x k window, k odd, borders handled by edge
/// replication. Throws EvenKernel for even k and KernelTooLarge when
/// k > min(width, height).
GrayImage median_blur(const GrayImage& img, int k);

/// Per-pixel inversion v -> 255 - v.
GrayImage invert(const GrayImage& img);

}  // namespace numprep
