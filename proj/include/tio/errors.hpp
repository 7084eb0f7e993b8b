#pragma once

#include <stdexcept>
#include <string>

namespace tio {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/kernel dimensions do not line up (channel mismatch, template
// larger than search, wrong response size, ...).
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// A box with non-positive extent where a real region is required.
struct DegenerateBoxError : Error {
    explicit DegenerateBoxError(const std::string& msg) : Error(msg) {}
};

// Search-region expansion produced nothing inside the image.
struct EmptyRegionError : Error {
    explicit EmptyRegionError(const std::string& msg) : Error(msg) {}
};

// An argument violates a documented precondition (index out of range, ...).
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// Malformed input file. Carries the 1-based line number when known.
struct ParseError : Error {
    ParseError(const std::string& msg, long line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_number(line) {}
    long line_number;
};

// Frame indices out of order or provider/consumer index mismatch.
struct SequencingError : Error {
    explicit SequencingError(const std::string& msg) : Error(msg) {}
};

// Bad pipeline configuration or inconsistent frame/feature geometry.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Invalid synthetic scene specification (trajectory out of bounds, ...).
struct SceneSpecError : Error {
    explicit SceneSpecError(const std::string& msg) : Error(msg) {}
};

}  // namespace tio
