#pragma once

#include <stdexcept>
#include <string>

namespace sla {

/// Base of every error raised by the library. Carries the name of the
/// module that raised it so the CLI can print a single `module: cause` line.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Malformed or inconsistent input (bad file contents, bad arguments).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure: missing file, unreadable, truncated, unwritable.
class IoError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown, e.g. a singular covariance.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace sla
