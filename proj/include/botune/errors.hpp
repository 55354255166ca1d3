#pragma once

#include <stdexcept>
#include <string>

namespace botune {

// Feature index or vector length does not match the model dimension.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parallel per-sentence structures disagree on sentence ids.
struct AlignmentError : std::runtime_error {
    explicit AlignmentError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; message carries the offending line number.
struct ParseError : std::runtime_error {
    ParseError(const std::string& file, int line, const std::string& msg)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg), line_number(line) {}
    int line_number;
};

// Kernel matrix stayed non-positive-definite through the whole jitter ladder.
struct ConditioningError : std::runtime_error {
    explicit ConditioningError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParameterError : std::invalid_argument {
    explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace botune
