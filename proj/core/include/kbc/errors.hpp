#pragma once

#include <stdexcept>

namespace kbc {

// Bad input data: missing files, malformed lines, unknown names, shape mismatches.
class DataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Undefined or non-finite numeric state (zero-vector cosine, NaN gradients, ...).
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kbc
