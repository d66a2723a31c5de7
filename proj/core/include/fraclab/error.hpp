#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative or refining procedure ran out of refinement levels.
/// Carries the best estimate reached and the discrepancy it achieved.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_estimate, double achieved)
        : Error(what), best_estimate_(best_estimate), achieved_(achieved) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double achieved() const noexcept { return achieved_; }

private:
    double best_estimate_;
    double achieved_;
};

}  // namespace fraclab
