#pragma once

#include <stdexcept>
#include <string>

namespace mhk {

// Invalid scenario/schedule/trajectory data supplied by the caller or a file.
// The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mhk
