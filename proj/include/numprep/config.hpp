#pragma once

#include <cstdint>
#include <string>

#include "numprep/dataset.hpp"
#include "numprep/learners.hpp"
#include "numprep/pipeline.hpp"

namespace numprep {

/**
 * @brief Everything the CLI can configure, with library defaults baked in.
 *
 * The on-disk form is flat `key=value` text: blank lines and lines starting
 * with '#' are ignored, keys are namespaced (pipeline.median_k,
 * spot.min_solidity, knn.k, ...). Unknown keys and unparseable values are
 * hard errors so typos cannot silently change an experiment.
 */
struct ToolConfig {
    PipelineConfig pipeline{};
    SplitSpec split{};
    SynthConfig synth{};
    LearnerParams learners{};
    CsvColumns csv{};

    void validate() const;
};

/// Applies one key=value assignment. Throws ConfigError on unknown keys or
/// bad values.
void config_set(ToolConfig& cfg, const std::string& key, const std::string& value);

/// Parses a config file into `cfg` (later lines win). Throws ConfigError or
/// FileNotFound.
void load_config_file(ToolConfig& cfg, const std::string& path);

/// Every key in sorted order with its current value, one per line. Stable
/// across runs, suitable for hashing and for writing next to results.
std::string canonical_dump(const ToolConfig& cfg);

/// FNV-1a 64-bit hash of canonical_dump, as 16 hex digits. Identifies the
/// exact configuration a report was produced under.
std::string config_hash(const ToolConfig& cfg);

/// FNV-1a 64-bit hash of arbitrary text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace numprep
