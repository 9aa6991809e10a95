#pragma once

#include <stdexcept>
#include <string>

namespace dcmbqc {

/// Bad command line or missing input file. CLI exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input that could not be parsed at all. CLI exit code 2.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Structurally invalid data (cycle, dangling edge, broken contract).
/// Invalid inputs are rejected, never repaired. CLI exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A condition the pipeline itself must never produce. CLI exit code 3.
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dcmbqc
