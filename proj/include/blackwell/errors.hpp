#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace blackwell {

/// Malformed input: bad file contents, broken invariants, out-of-range arguments.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A policy enumeration (or similar combinatorial sweep) would exceed its cap.
class CapExceededError : public std::runtime_error {
  public:
    CapExceededError(const std::string& message, std::uint64_t count)
        : std::runtime_error(message), count_(count) {}

    /// Exact size of the set that was refused (saturates at UINT64_MAX).
    std::uint64_t count() const { return count_; }

  private:
    std::uint64_t count_;
};

/// A numerically degenerate linear system or a failed internal consistency check.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace blackwell
