#pragma once

#include <stdexcept>
#include <string>

namespace spiral {

// Base class for all errors raised by this library. Everything thrown on a
// violated precondition or a failed numerical procedure derives from here, so
// callers can catch spiral::error to intercept library failures as a group.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain of the operation (e.g. z <= 0).
class domain_error : public error {
public:
    explicit domain_error(const std::string& msg) : error(msg) {}
};

// Argument inside the domain but beyond the representable range of the result
// (overflow/underflow caps).
class range_error : public error {
public:
    explicit range_error(const std::string& msg) : error(msg) {}
};

// Structural precondition on the input data violated (wrong grid, missing
// boundary compatibility, too few nodes for the requested stencil, ...).
class precondition_error : public error {
public:
    explicit precondition_error(const std::string& msg) : error(msg) {}
};

// Grid resolution insufficient for the requested computation.
class resolution_error : public error {
public:
    explicit resolution_error(const std::string& msg) : error(msg) {}
};

// A numerical procedure failed: singular linear solve, iteration that did not
// converge, or a result whose estimated accuracy misses the requested bar.
class numerical_error : public error {
public:
    explicit numerical_error(const std::string& msg) : error(msg) {}
};

// An eigenvalue/root search could not bracket a solution.
class bracket_error : public error {
public:
    explicit bracket_error(const std::string& msg) : error(msg) {}
};

// Intermediate quantities fell below representable magnitude; the message
// suggests a rescaling when one is known.
class underflow_error : public error {
public:
    explicit underflow_error(const std::string& msg) : error(msg) {}
};

// A requested quantity is mathematically undefined for the given input
// (e.g. a decay exponent of the zero function).
class undefined_error : public error {
public:
    explicit undefined_error(const std::string& msg) : error(msg) {}
};

// An ODE solution blew up at a finite location; carries where.
class pole_error : public error {
public:
    pole_error(const std::string& msg, double where)
        : error(msg + " (at x = " + std::to_string(where) + ")"), location(where) {}
    double location;
};

// Two data sets that were supposed to be joined/compared do not match up.
class join_error : public error {
public:
    explicit join_error(const std::string& msg) : error(msg) {}
};

// Bad run configuration (CLI arguments, config files, sweep definitions).
class config_error : public error {
public:
    explicit config_error(const std::string& msg) : error(msg) {}
};

// On-disk data whose layout or metadata does not match what was expected
// (snapshot shape mismatch, corrupted sidecar, wrong format version).
class format_error : public error {
public:
    explicit format_error(const std::string& msg) : error(msg) {}
};

// A time integration produced non-finite values; carries the step index.
class blowup_error : public error {
public:
    blowup_error(const std::string& msg, long step)
        : error(msg + " (step " + std::to_string(step) + ")"), at_step(step) {}
    long at_step;
};

// An iterative solver diverged or stalled; the message reports the state of
// the last iterate (iteration count, residual) for diagnosis.
class solver_error : public error {
public:
    explicit solver_error(const std::string& msg) : error(msg) {}
};

// A computed result violates a structural property it is guaranteed to have
// (monotonicity, sign, bounds). Indicates the computation left its regime of
// validity even though no step failed outright.
class invariant_error : public error {
public:
    explicit invariant_error(const std::string& msg) : error(msg) {}
};

// A closed-form prediction was requested outside the parameter regime where
// the underlying reduction is valid (distinct from precondition_error: the
// inputs are well-formed, the regime is not).
class breakdown_error : public error {
public:
    explicit breakdown_error(const std::string& msg) : error(msg) {}
};

} // namespace spiral
