#pragma once

#include <stdexcept>
#include <string>

namespace stormrisk {

inline constexpr const char* kVersion = "0.1.0";

/// Malformed or inconsistent input data (files, schemas, cross-references).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An optimization backend failed or returned an unusable result.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A violated internal invariant; indicates a bug, not bad input.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace stormrisk
