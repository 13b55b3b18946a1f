#pragma once

#include <stdexcept>
#include <string>

namespace saddlescope {

/// A point violates a function's domain guard (e.g. evaluation at a
/// singularity). Raised instead of returning NaN.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation produced a non-finite value or an iteration failed to
/// converge within its cap.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// An operation was requested that the object does not support
/// (e.g. Hessians of a function declared C1).
struct CapabilityError : std::runtime_error {
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Caller broke a documented precondition (dimension mismatch, asymmetric
/// matrix where symmetry is required, ...).
struct ContractError : std::runtime_error {
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

/// Name lookup failed (unknown scenario, unknown monitor).
struct LookupError : std::runtime_error {
  explicit LookupError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace saddlescope
