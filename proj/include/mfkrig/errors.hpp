#ifndef MFKRIG_ERRORS_HPP
#define MFKRIG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mfkrig {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A precondition on arguments was violated (dimension mismatch, bad level,
/// nonpositive budget, out-of-domain input, ...).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// Two design points coincide within the dataset duplicate tolerance.
class DuplicatePoint : public InvalidArgument {
public:
    explicit DuplicatePoint(const std::string& what) : InvalidArgument(what) {}
};

/// A multi-fidelity dataset violates the nested-design requirement
/// X_T subset-of X_{T-1} subset-of ... subset-of X_1.
class NestingViolation : public InvalidArgument {
public:
    explicit NestingViolation(const std::string& what) : InvalidArgument(what) {}
};

/// Linear algebra gave up: correlation matrix not positive definite even
/// after nugget escalation, or a factorization failed.
class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& what) : Error(what) {}
};

/// Every restart of the hyperparameter search failed; carries diagnostics.
class FitFailure : public NumericalFailure {
public:
    explicit FitFailure(const std::string& what) : NumericalFailure(what) {}
};

}  // namespace mfkrig

#endif  // MFKRIG_ERRORS_HPP
