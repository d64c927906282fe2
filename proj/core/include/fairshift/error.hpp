#pragma once

#include <stdexcept>
#include <string>

namespace fairshift {

// A (y, s) subgroup is empty or would become empty. The audit harness treats
// this as a degenerate grid cell rather than a fatal error.
class DegenerateSubgroupError : public std::runtime_error {
 public:
  explicit DegenerateSubgroupError(const std::string& what)
      : std::runtime_error(what) {}
};

// Malformed input file or configuration.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairshift
