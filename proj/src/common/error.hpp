#pragma once

#include <stdexcept>
#include <string>

namespace seirdmon {

// Error categories. The C API maps each to a status code and the CLI maps
// them onto exit codes (data errors vs numeric errors).
enum class ErrorKind {
    InvalidArgument,
    NotFound,
    Format,
    DataIntegrity,
    Io,
    Domain,
    Integration,
    Depletion,
    SingularCovariance,
    UndefinedMetric,
    Dimension,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace seirdmon
