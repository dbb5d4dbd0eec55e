#pragma once

#include <stdexcept>
#include <string>

namespace jacobiwvn {

// Error taxonomy, mirrored by the CLI exit codes:
//   ValidationError -> 2   malformed input (bad config, a_i <= 0, window bounds, ...)
//   DomainError     -> 3   mathematically inadmissible request (non-elliptic point,
//                          wrong resonance case, vanishing resonance function, ...)
//   NumericalError  -> 4   computation failed or lost meaning (overflow without
//                          rescale, unresolved bands, zero amplitude in a fit window)
//   DegeneracyError -> 5   pair embedding degenerate after all retry branches

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct DegeneracyError : std::runtime_error {
    explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jacobiwvn
