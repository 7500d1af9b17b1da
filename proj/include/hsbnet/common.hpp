#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace hsbnet {

using Scalar = double;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Tail mass discarded when truncating a PMF support.
inline constexpr double kPmfTailEps = 1e-12;
// Tolerance on probability normalization and stationary residuals.
inline constexpr double kProbTol = 1e-10;

// M/G/1 offered load reaches or exceeds 1.
struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampled scenario parameters violate the M/G/1 stability precondition.
struct StabilityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Effective arrival rate is zero, Little's law does not apply.
struct DegenerateLink : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A user has no feasible (BS, mode) option at all.
struct NoFeasibleLink : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sum of bandwidth lower bounds exceeds the BS budget.
struct InfeasibleBudget : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hsbnet
