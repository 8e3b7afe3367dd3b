#pragma once

#include <stdexcept>
#include <string>

namespace depsrl {

// Shape or index misuse inside numeric code.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input files, inconsistent corpora, bad checkpoints.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric failures: gradient checks over tolerance, non-finite values.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace depsrl
