#pragma once

#include <stdexcept>
#include <string>

namespace procrust {

// Base of everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad inputs: malformed parameters, violated construction invariants,
// unsupported requests.  CLI maps these to exit code 2.
struct ValidationError : Error {
    using Error::Error;
};

// Legal inputs that land in a physically meaningless regime at run time.
// CLI maps these to exit code 3.
struct PhysicalRegimeError : Error {
    using Error::Error;
};

// Truncated state fails the tail-mass guard at the requested cutoff.
struct CutoffTooSmall : ValidationError {
    using ValidationError::ValidationError;
};

// |lambda| outside [0, 1) where a two-mode squeezed vacuum must live.
struct UnphysicalSqueezing : ValidationError {
    using ValidationError::ValidationError;
};

// Schmidt coefficients do not sum (in square) to 1 where a normalized
// state is required.
struct NotNormalized : ValidationError {
    using ValidationError::ValidationError;
};

// Closed form requested for a scheme that has none.
struct UnsupportedScheme : ValidationError {
    using ValidationError::ValidationError;
};

// success_condition is only defined for kappa_T > 0.
struct NonPositiveCoupling : ValidationError {
    using ValidationError::ValidationError;
};

// |<post|pre>| below threshold: the weak value is numerically meaningless.
struct NearOrthogonalPostSelection : PhysicalRegimeError {
    using PhysicalRegimeError::PhysicalRegimeError;
};

// Filtered output has (numerically) zero norm: nothing is post-selected.
struct VanishingPostSelection : PhysicalRegimeError {
    using PhysicalRegimeError::PhysicalRegimeError;
};

// Predicted |lambda'| >= 1: the first-order transformation law leaves the
// physical family and no prediction can be reported.
struct UnphysicalOutput : PhysicalRegimeError {
    using PhysicalRegimeError::PhysicalRegimeError;
};

} // namespace procrust
