#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hazcomm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A value violated a domain invariant (out-of-range risk, bad weights, ...).
struct ValidationError : Error {
    using Error::Error;
};

/// Missing or inconsistent configuration: template gaps, sink registry holes,
/// malformed rule tables, unknown backend names.
struct ConfigError : Error {
    using Error::Error;
};

/// Any failure inside a perception backend. The pipeline routes these to the
/// fallback policy; they never mean "no hazard".
struct BackendError : Error {
    using Error::Error;
};

struct TimeoutError : BackendError {
    using BackendError::BackendError;
};

struct TransportError : BackendError {
    using BackendError::BackendError;
};

struct MalformedResponseError : BackendError {
    using BackendError::BackendError;
};

struct InjectedFailure : BackendError {
    using BackendError::BackendError;
};

/// A structured-text document that does not follow its schema.
struct FormatError : Error {
    using Error::Error;
};

/// Trace log input that cannot be interpreted.
struct TraceFormatError : FormatError {
    using FormatError::FormatError;
};

struct ScenarioFormatError : Error {
    ScenarioFormatError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

} // namespace hazcomm
