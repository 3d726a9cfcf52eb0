#pragma once

#include <stdexcept>
#include <string>

namespace topoal {

// Bad user-supplied parameter or configuration value. The CLI maps these to
// exit code 1.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation invoked on an object whose state cannot support it (empty
// candidate pool, matrix-free operator asked for its matrix, ...).
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// A size or memory budget was exceeded (densifying operator powers).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values or solver breakdown.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the offending line number when known.
struct ParseError : std::runtime_error {
    ParseError(const std::string& path, long line, const std::string& message)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + message),
          path(path),
          line(line) {}

    std::string path;
    long line;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace topoal
