#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "numprep/raster.hpp"

namespace numprep {

/// Canvas side of generated synthetic images.
inline constexpr int kSynthCanvas = 63;

/// Pixel value used for synthetic gridline clutter.
inline constexpr std::uint8_t kGridValue = 217;

struct DatasetItem {
    ImageVariant image;
    int label = 0;               // digit 0..9
    std::string source_tag;      // provenance metadata, machine-parseable
    std::string filename;        // unique within a dataset
};

struct LabeledDataset {
    std::vector<DatasetItem> items;

    std::size_t size() const { return items.size(); }
};

/// One CSV row that could not be turned into a dataset item.
struct RowError {
    int line = 0;                // 1-based line number in the CSV
    std::string filename;        // as given in the row, may be empty
    std::string message;
};

struct LoadResult {
    LabeledDataset dataset;
    std::vector<RowError> errors;
};

/// Column names expected in the label CSV.
struct CsvColumns {
    std::string filename = "filename";
    std::string digit = "digit";
};

/**
 * @brief Loads a CSV-labeled PGM corpus.
 *
 * The CSV must have a header row naming at least the two configured columns.
 * Row-level problems (missing file, bad digit, duplicate filename, wrong
 * field count) become RowError records; only structural problems abort:
 * MissingColumn for an incomplete header, MalformedCsv for unparseable text,
 * FileNotFound when the CSV itself is absent.
 */
LoadResult load_labeled(const std::string& csv_path, const std::string& image_dir,
                        const CsvColumns& cols = {});

struct SplitSpec {
    double train_frac = 0.85;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument unless 0 < frac <= 1
};

/**
 * @brief Deterministic shuffled split.
 *
 * Shuffles by the seed, then takes the first ceil(train_frac * N) items as
 * train and the rest as test. The same seed always yields the same partition.
 */
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds,
                                                const SplitSpec& spec);

/**
 * @brief Synthetic corpus knobs.
 *
 * Each image draws from independent per-image random streams, so two configs
 * differing only in one corruption's probability produce pairable corpora:
 * image i shares its glyph, jitter, and remaining corruptions across both.
 */
struct SynthConfig {
    int count = 100;
    std::uint64_t seed = 0;
    double salt_pepper_rate = 0.05;
    double spot_probability = 0.3;
    double invert_probability = 0.3;
    double jitter_translate = 2.0;   // max |dx|,|dy| in pixels
    double jitter_scale = 0.03;      // max relative scale perturbation
    double grid_lines_probability = 0.1;
    double glyph_scale = 1.0;        // shrinks the digit inside the canvas
    // Keep spots clear of the digit's strokes. On by default: a blot across
    // the glyph destroys the very feature the label names, and removing it
    // leaves fragments whose largest piece no longer spans the digit. Set to
    // false to stress-test overlapping corruption deliberately.
    bool spot_avoid_glyph = true;

    void validate() const;  // throws std::invalid_argument
};

/**
 * @brief Generates `count` noisy digit images, labels round-robin 0..9.
 *
 * Filenames are synth_00000.pgm, synth_00001.pgm, ... The source_tag records
 * the drawn spot quadrilateral ("spot=x0 y0 ... y3") or "spot=none".
 * Fully deterministic for a given config.
 */
LabeledDataset generate_synthetic(const SynthConfig& cfg);

/// Writes binary PGM (P5, maxval 255). Throws FileNotFound when the path is
/// not writable.
void write_pgm(const GrayImage& img, const std::string& path);

/// Reads binary PGM. Throws FileNotFound, UnsupportedFormat (not P5 or
/// maxval != 255), or Truncated (header promises more bytes than present).
GrayImage read_pgm(const std::string& path);

// Building blocks of the generator, exposed so fixtures can compose scenes
// with hand-picked geometry.

/// Renders digit `d` (0..9) onto a fresh white canvas. `scale` multiplies the
/// template size, (dx, dy) shifts it off-center. No corruption of any kind.
GrayImage render_digit(int d, int canvas = kSynthCanvas, double scale = 1.0,
                       double dx = 0.0, double dy = 0.0);

/// Paints the quadrilateral x0 y0 .. x3 y3 (even-odd fill) in `value`.
void stamp_quad(GrayImage& img, const std::array<double, 8>& quad,
                std::uint8_t value);

/// Parses the spot quadrilateral out of a generator source_tag, if present.
std::optional<std::array<double, 8>> spot_from_tag(const std::string& tag);

/// True for points inside the quadrilateral under the even-odd rule (the same
/// test stamp_quad fills by).
bool point_in_quad(const std::array<double, 8>& quad, double x, double y);

}  // namespace numprep
