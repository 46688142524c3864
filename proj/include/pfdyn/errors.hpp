#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pfdyn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user configuration. Carries every violation found, not only the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}
    explicit ConfigError(const std::string& violation)
        : ConfigError(std::vector<std::string>{violation}) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

/// Field or grid sizes that do not match.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. p < 1).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Nonpositive temperature reached a place where 1/theta or log(theta) is needed.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// A linear or nonlinear solver failed.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Requested operation exceeds a documented capability (e.g. spectral node cap).
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// A time step could not be completed after all dt halvings.
class StepFailure : public Error {
public:
    StepFailure(const std::string& what, double time, double last_residual, double min_theta)
        : Error(what), time_(time), last_residual_(last_residual), min_theta_(min_theta) {}
    double time() const noexcept { return time_; }
    double last_residual() const noexcept { return last_residual_; }
    double min_theta() const noexcept { return min_theta_; }

private:
    double time_;
    double last_residual_;
    double min_theta_;
};

/// Missing, unreadable or corrupt files.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pfdyn
