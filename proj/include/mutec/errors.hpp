#pragma once

#include <stdexcept>
#include <string>

namespace mutec {

// Error taxonomy used across the toolkit. Every throw site names the
// offending entity (dialogue id, emotion label, ...) in the message.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AnnotationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MappingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AlignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SpanLostError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WeightingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SampleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mutec
