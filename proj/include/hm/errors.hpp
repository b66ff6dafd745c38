#pragma once

#include <stdexcept>
#include <string>

namespace hm {

struct FactorizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InitializationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateVarianceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ObjectiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Every probed sample scored zero: the non-implausible region is empty at
/// this sampling resolution.
struct FlatObjectiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientCandidatesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LookupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hm
