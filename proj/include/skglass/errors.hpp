#pragma once

// skglass: error taxonomy shared by all modules.

#include <stdexcept>
#include <string>

namespace skglass {

// Input violates a documented model assumption (normalization, probabilities,
// parameter ranges). Messages name the violated assumption.
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Objects passed together do not share the required dimensions (n, p).
struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Problem size exceeds the exact engine's configured limits or the index range.
struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quantity requiring extra moment assumptions was requested for an
// environment that does not satisfy them.
struct assumption_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to reach its tolerance.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace skglass
