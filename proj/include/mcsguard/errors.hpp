#pragma once

#include <stdexcept>
#include <string>

namespace mcsguard {

/// Invalid generation or experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of an operation.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operation called on an object in the wrong lifecycle state
/// (e.g. partitioning with an untrained map).
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file; the message names the offending line/field.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Training diverged or could not proceed.
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pipeline stage failed; the message carries the stage tag.
struct PipelineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Index bookkeeping violated (overlap or gap in a partition/prediction).
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem failure; the message carries the path.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mcsguard
