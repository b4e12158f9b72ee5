#pragma once

#include <stdexcept>
#include <string>

namespace oscillakdv {

// Invalid construction parameters, mismatched meshes, or bad run configs.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// API misuse: wrong representation access, non-integer integer-order, ...
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Too few snapshots/rows for the requested reduction or fit.
struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File and serialization problems.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Experiment-level precondition violated at run time
// (e.g. the limiting run hits the growth detector before the sweep horizon).
struct ExperimentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace oscillakdv
