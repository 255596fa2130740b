#pragma once

#include <stdexcept>
#include <string>

namespace bitrans {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by caller-supplied data (bad grid size, mismatched grids, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Numerical precondition violated inside a computation (non-finite values,
/// non-Hermitian spectra, vanishing symbol at a retained mode).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The a = 0 orthogonality condition on the kernel does not hold.
class SolvabilityError : public Error {
public:
    using Error::Error;
};

/// 2*sqrt(pi)*N*l exceeds 1 - epsilon; the fixed-point map is not a certified contraction.
class ContractionError : public Error {
public:
    using Error::Error;
};

/// Picard iteration hit max_iter, or its steps grew (mis-declared Lipschitz constant).
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace bitrans
