#pragma once

#include <stdexcept>
#include <string>

namespace edi {

// Bad user input: missing/malformed files, violated preconditions.
// The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure inside an otherwise valid problem: rank deficiency,
// divergence, degenerate geometry. The CLI maps this to exit code 1.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace edi
