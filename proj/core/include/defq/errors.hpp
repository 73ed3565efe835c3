#pragma once

#include <stdexcept>
#include <string>

namespace defq {

/// Bad input data: malformed spec files, mismatched dimensions or truncation
/// orders, violated symmetry constraints.  CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A request exceeds an implemented capacity (arity cap, hbar order cap,
/// truncation margin).  Capacity limits fail loudly, never silently
/// truncate.  CLI exit code 2.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// An identity that must hold by construction failed; indicates a bug or a
/// violated precondition that was not detectable earlier.  CLI exit code 3.
class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace defq
