#pragma once

#include <stdexcept>
#include <string>

namespace gsim {

// Geometry that cannot be realized on the given grid / bench layout.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampling insufficient for the requested propagation distance.
struct AliasingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Estimator fed data it cannot produce a meaningful answer from.
struct DegenerateDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Peak fit did not find a significant peak.
struct NoPeakError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Histogram lacks enough baseline bins for normalization.
struct InsufficientBaselineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gsim
