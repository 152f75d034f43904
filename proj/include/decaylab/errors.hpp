#pragma once

#include <stdexcept>
#include <string>

namespace decaylab {

/// Datum mass (or integrand support) reaches outside the quadrature box.
class SupportOverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A requested index window (dyadic k-range, derivative order, ...) is empty or unresolvable.
class RangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The commutation condition on symbols has no solution for the requested operator shape.
class NoSolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonPositiveValueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fewer than the minimum number of usable samples remain in a fit window.
class InsufficientWindowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration problem; `key_path()` names the offending field, e.g. "params.theta".
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string key_path, const std::string& what)
        : std::runtime_error(key_path + ": " + what), key_path_(std::move(key_path)) {}
    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

}  // namespace decaylab
