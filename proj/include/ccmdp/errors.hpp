#pragma once

#include <stdexcept>
#include <string>

namespace ccmdp {

// Instance data violates a model invariant (bad probabilities, ranges, ids).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Text input could not be parsed; message carries a line number.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Instance structure does not meet a solver's precondition
// (non-disjoint clusters, branching over cap, cluster size over cap).
struct StructureError : std::runtime_error {
    explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

// Problem exceeds a configured enumeration guard.
struct SizeError : std::runtime_error {
    explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

// Covering demand cannot be met by any choice combination.
struct DemandUnsatisfiableError : std::runtime_error {
    explicit DemandUnsatisfiableError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ccmdp
