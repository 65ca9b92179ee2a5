#pragma once

#include <stdexcept>
#include <string>

namespace fbma {

/// Invalid user-supplied parameters (bad radius, too few nodes, unknown keys).
/// The CLI maps this to exit status 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input data (duplicate curve points, mismatched shapes, bad files).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base class for failures of a numerical procedure on valid input.
/// The CLI maps every subclass to exit status 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RankError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularDataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A certification or verification step whose hypotheses fail on the data.
class NotCertifiableError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InconsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IllConditionedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace fbma
