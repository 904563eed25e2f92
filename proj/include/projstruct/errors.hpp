#pragma once

#include <stdexcept>
#include <string>

namespace projstruct {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (dimension mismatch, invalid structure, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

// Enumeration or exhaustive search would exceed the configured cap.
class CapExceeded : public Error {
public:
    CapExceeded(const std::string& what, double projected)
        : Error(what + " (projected count " + std::to_string(projected) + ")"),
          projected_(projected) {}
    double projected() const noexcept { return projected_; }

private:
    double projected_;
};

// Operation is not defined for the given family (e.g. union witness for clustering).
class Unsupported : public Error {
public:
    using Error::Error;
};

// Malformed or incomplete configuration document.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace projstruct
