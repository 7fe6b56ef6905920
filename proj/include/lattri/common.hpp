#pragma once
// Shared error types and version tag.

#include <stdexcept>
#include <string>
#include <string_view>

namespace lattri {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kFormatTag = "lattice-tri";

// Bad user input: malformed files, configs, incompatible arguments.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configured resource limit hit (enumeration cap, mixing horizon, ...).
struct cap_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken internal invariant: stale flip, stuck monotone path, corrupt apex
// table. Indicates a bug rather than bad input.
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace lattri
