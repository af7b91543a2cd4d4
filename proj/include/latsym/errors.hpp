#pragma once

#include <stdexcept>
#include <string>

namespace latsym {

/// Failure of a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularJacobian : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A Lie bracket (or other derived field) does not lie in the ansatz span.
class SpanEscape : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace latsym
