#pragma once

#include <stdexcept>
#include <string>

namespace cbf {

/// Raised when an evaluation time or window falls outside a sampled range.
class RangeError : public std::out_of_range {
public:
    explicit RangeError(const std::string& msg) : std::out_of_range(msg) {}
};

/// Invalid parameter or configuration value, detected before any computation.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Convective CFL guard tripped; carries the offending step data in the message.
class CflViolation : public std::runtime_error {
public:
    CflViolation(const std::string& msg, double time) : std::runtime_error(msg), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// Non-finite value detected while integrating; time() is the last valid time.
class NumericsError : public std::runtime_error {
public:
    NumericsError(const std::string& msg, double time) : std::runtime_error(msg), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// A diagnostic quadrature failed to converge (e.g. non-dissipative exponent).
class DiagnosticFailure : public std::runtime_error {
public:
    explicit DiagnosticFailure(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cbf
