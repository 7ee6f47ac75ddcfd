#pragma once

#include <stdexcept>
#include <string>

namespace qctl {

// Base of every error raised by the library. Callers that only need to
// report a failure can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on the arguments was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonHermitian : public Error {
public:
    explicit NonHermitian(double max_deviation);
    double max_deviation() const noexcept { return max_deviation_; }

private:
    double max_deviation_;
};

class EigenFailure : public Error {
public:
    using Error::Error;
};

// Forward propagation lost unit norm; indicates a propagator defect.
class NormDrift : public Error {
public:
    explicit NormDrift(double drift);
    double drift() const noexcept { return drift_; }

private:
    double drift_;
};

class NotOrthonormal : public Error {
public:
    explicit NotOrthonormal(double max_gram_deviation);
    double max_gram_deviation() const noexcept { return deviation_; }

private:
    double deviation_;
};

class NotProjector : public Error {
public:
    using Error::Error;
};

// The gradient line search exhausted its trials without a strict decrease.
class NoImprovement : public Error {
public:
    NoImprovement(double gradient_norm, double max_abs_k1, int trials);
    double gradient_norm() const noexcept { return gradient_norm_; }
    double max_abs_k1() const noexcept { return max_abs_k1_; }
    int trials() const noexcept { return trials_; }

private:
    double gradient_norm_;
    double max_abs_k1_;
    int trials_;
};

// The Krotov sweep increased the cost even after all damping trials.
class MonotonicityFailure : public Error {
public:
    MonotonicityFailure(double j_before, double j_after, double last_theta);
    double j_before() const noexcept { return j_before_; }
    double j_after() const noexcept { return j_after_; }
    double last_theta() const noexcept { return last_theta_; }

private:
    double j_before_;
    double j_after_;
    double last_theta_;
};

class SingularUnavailable : public Error {
public:
    using Error::Error;
};

class BracketFailure : public Error {
public:
    using Error::Error;
};

// An inner optimization of the budget loop ended on an improver failure.
class InnerFailure : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class StepOutOfBounds : public Error {
public:
    using Error::Error;
};

}  // namespace qctl
