#pragma once
#include <stdexcept>
#include <string>

namespace qtherm {

/// Parameter outside its mathematical domain (non-positive temperature, ...).
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Parameter valid in principle but outside the representable range.
struct RangeError : std::out_of_range {
  explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

/// Singular or degenerate linear system (vacuum mode, rank-deficient matrix).
struct SingularError : std::runtime_error {
  explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};

/// Series or quadrature failed to reach the requested tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Misuse of an interface (bad enum tag, null handle).
struct UsageError : std::logic_error {
  explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace qtherm
