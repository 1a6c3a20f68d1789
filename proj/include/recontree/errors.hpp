#pragma once

#include <stdexcept>
#include <string>

namespace recontree {

inline constexpr const char* kVersion = "0.1.0";

/// Boundary assigns probability zero to every root colour.
class ZeroProbabilityBoundary : public std::runtime_error {
 public:
  explicit ZeroProbabilityBoundary(const std::string& what)
      : std::runtime_error(what) {}
};

/// Exact enumeration would exceed the configured term cap.
class InstanceTooLarge : public std::runtime_error {
 public:
  explicit InstanceTooLarge(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace recontree
