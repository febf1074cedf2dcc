#pragma once

#include <stdexcept>
#include <string>

namespace dimer {

// Validation failures (bad shapes, out-of-range parameters, violated
// preconditions) derive from std::invalid_argument so callers can map them
// to usage errors; numerical failures derive from std::runtime_error.

struct shape_too_large_error : std::invalid_argument {
  explicit shape_too_large_error(const std::string& what) : std::invalid_argument(what) {}
};

struct singular_matrix_error : std::runtime_error {
  explicit singular_matrix_error(const std::string& what) : std::runtime_error(what) {}
};

// A Fourier denominator or kernel denominator vanished (message names the mode).
struct pole_error : std::runtime_error {
  explicit pole_error(const std::string& what) : std::runtime_error(what) {}
};

struct zero_partition_error : std::runtime_error {
  explicit zero_partition_error(const std::string& what) : std::runtime_error(what) {}
};

// Bead point sets that do not form a valid configuration where one is required.
struct invalid_config_error : std::runtime_error {
  explicit invalid_config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dimer
