#pragma once

#include <stdexcept>
#include <string>

namespace numprep {

/// Base class for all library-specific failures.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// raster
struct ZeroDimension : Error {
    explicit ZeroDimension(const std::string& what) : Error(what) {}
};
struct EvenKernel : Error {
    explicit EvenKernel(const std::string& what) : Error(what) {}
};
struct KernelTooLarge : Error {
    explicit KernelTooLarge(const std::string& what) : Error(what) {}
};

// binarize
struct DegenerateHistogram : Error {
    explicit DegenerateHistogram(const std::string& what) : Error(what) {}
};

// contours
struct EmptyContour : Error {
    explicit EmptyContour(const std::string& what) : Error(what) {}
};
struct OutOfBounds : Error {
    explicit OutOfBounds(const std::string& what) : Error(what) {}
};
struct NoForeground : Error {
    explicit NoForeground(const std::string& what) : Error(what) {}
};

// pipeline
struct BlankImage : Error {
    explicit BlankImage(const std::string& what) : Error(what) {}
};

// dataset
struct MalformedCsv : Error {
    explicit MalformedCsv(const std::string& what) : Error(what) {}
};
struct MissingColumn : Error {
    explicit MissingColumn(const std::string& what) : Error(what) {}
};
struct FileNotFound : Error {
    explicit FileNotFound(const std::string& what) : Error(what) {}
};
struct UnsupportedFormat : Error {
    explicit UnsupportedFormat(const std::string& what) : Error(what) {}
};
struct Truncated : Error {
    explicit Truncated(const std::string& what) : Error(what) {}
};

// learners
struct EmptyTrainingSet : Error {
    explicit EmptyTrainingSet(const std::string& what) : Error(what) {}
};
struct EmptyTestSet : Error {
    explicit EmptyTestSet(const std::string& what) : Error(what) {}
};
struct SingleClass : Error {
    explicit SingleClass(const std::string& what) : Error(what) {}
};

// model files
struct FormatError : Error {
    explicit FormatError(const std::string& what) : Error(what) {}
};

// configuration
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace numprep
