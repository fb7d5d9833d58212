#pragma once

#include <stdexcept>
#include <string>

namespace urf {

/// Invalid input: out-of-range lags, dimension mismatches, malformed configs.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A series with zero sample variance where a correlation is required.
class DegenerateSeriesError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical failure that is not the caller's fault (singular systems, etc.).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// V2'U1 too close to singular to recover the stationary factors.
class IllConditionedRecoveryError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace urf
