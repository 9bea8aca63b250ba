#pragma once
#include <stdexcept>
#include <string>

namespace irml {

// Error categories map onto the CLI exit codes: config -> 2, data -> 3,
// anything numerical/runtime -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace irml
