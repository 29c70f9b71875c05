#pragma once

#include <stdexcept>
#include <string>

namespace echoq {

// Exception hierarchy. The CLI maps each kind onto its own exit code.
enum class ErrorKind { Input, Validation, Invariant };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Malformed or unusable input data (bad file, empty region, degenerate sample).
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

/// Inputs that are individually well formed but inconsistent with each other.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

/// An internal postcondition failed.
class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& what) : Error(ErrorKind::Invariant, what) {}
};

} // namespace echoq
