#pragma once

#include <string>

#include "numprep/learners.hpp"

namespace numprep {

/**
 * @brief Versioned binary model container.
 *
 * Layout: magic "NPML", u16 version (currently 1), u16 model kind, then a
 * kind-specific payload. All integers and IEEE doubles are little-endian.
 * Wall-clock fit time is deliberately not stored, so identical fits produce
 * byte-identical files.
 */
void save_model(const Model& model, const std::string& path);

/// Throws FormatError on bad magic/version/kind, Truncated on short files,
/// FileNotFound when unreadable. Loaded models report fit_seconds = 0.
Model load_model(const std::string& path);

}  // namespace numprep
