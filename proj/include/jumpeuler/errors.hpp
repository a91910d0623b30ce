#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace jumpeuler {

// All library errors derive from Error so callers can catch the family at once.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A named argument or config field is out of its admissible range.
struct InvalidParameter : Error {
    std::string field;
    InvalidParameter(std::string field_, const std::string& detail)
        : Error("invalid parameter '" + field_ + "': " + detail), field(std::move(field_)) {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// A coefficient returned NaN/Inf at a probe point, or failed the purity spot check.
struct NonFiniteCoefficient : Error {
    std::string coefficient;
    NonFiniteCoefficient(std::string coefficient_, const std::string& detail)
        : Error("non-finite coefficient '" + coefficient_ + "': " + detail),
          coefficient(std::move(coefficient_)) {}
};

// The scheme state blew up; step index is the step whose output was non-finite.
struct NonFiniteState : Error {
    std::int64_t step;
    explicit NonFiniteState(std::int64_t step_)
        : Error("non-finite state after step " + std::to_string(step_)), step(step_) {}
};

struct MissingReference : Error {
    MissingReference() : Error("model has no exact_reference; use the coupled estimator") {}
};

// A Monte Carlo estimate aborted because one trajectory failed. Estimates never
// drop trajectories silently (that would bias the mean).
struct TrajectoryFailure : Error {
    std::int64_t trajectory_index;
    TrajectoryFailure(std::int64_t index, const std::string& cause)
        : Error("trajectory " + std::to_string(index) + " failed: " + cause),
          trajectory_index(index) {}
};

}  // namespace jumpeuler
