#pragma once

#include <stdexcept>
#include <string>

namespace cas {

// Root of every error thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed model or configuration (bad shapes, non-normalized laws, bad JSON).
class ConfigError : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

// Numerical or feasibility failures raised by the solvers.
class SolverError : public Error
{
public:
    using Error::Error;
};

// The pair (x, z) has zero probability under the prior and sensing law.
class ZeroProbabilityObservation : public SolverError
{
public:
    using SolverError::SolverError;
};

// The feasible set of input distributions is empty.
class InfeasibleConstraint : public SolverError
{
public:
    using SolverError::SolverError;
};

// Requested distortion is below the smallest achievable one.
class UnreachableDistortion : public SolverError
{
public:
    using SolverError::SolverError;
};

// The prior covariance is rank deficient but its inverse was requested.
class SingularPrior : public SolverError
{
public:
    using SolverError::SolverError;
};

class NonFiniteObjective : public SolverError
{
public:
    using SolverError::SolverError;
};

} // namespace cas
