#pragma once

// skglass: dense coupling tensors (one quenched disorder realization).

#include <cstdint>
#include <string>
#include <vector>

#include "skglass/errors.hpp"

namespace skglass {

// Number of entries of an order-p tensor over n sites, with overflow check.
inline std::int64_t tensor_entry_count(int n, int p) {
  if (n < 1) throw validation_error("coupling tensor: n must be >= 1");
  if (p < 2) throw validation_error("coupling tensor: p must be >= 2");
  std::int64_t count = 1;
  for (int q = 0; q < p; ++q) {
    if (count > (std::int64_t{1} << 40) / n) {
      throw capacity_error("coupling tensor: n^p exceeds the index range (n=" +
                           std::to_string(n) + ", p=" + std::to_string(p) +
                           ")");
    }
    count *= n;
  }
  return count;
}

// One disorder realization: n^p i.i.d. draws in row-major order over
// (i_1, ..., i_p), tagged with the environment and the stream seed that
// produced it. Immutable by convention after construction.
struct CouplingTensor {
  int n = 0;
  int p = 2;
  std::vector<double> values;
  std::string env_id;
  std::uint64_t seed = 0;

  std::int64_t entry_count() const {
    return static_cast<std::int64_t>(values.size());
  }

  double at2(int i, int j) const {
    return values[static_cast<std::size_t>(i) * n + j];
  }

  double at3(int i, int j, int k) const {
    return values[(static_cast<std::size_t>(i) * n + j) * n + k];
  }
};

// The environment -xi (used by the negative-beta device).
inline CouplingTensor negated(const CouplingTensor& t) {
  CouplingTensor out = t;
  out.env_id = "-" + t.env_id;
  for (auto& v : out.values) v = -v;
  return out;
}

}  // namespace skglass
