#pragma once

#include <cstddef>
#include <vector>

#include "cpdp/data.hpp"

namespace cpdp {

struct FilterParams {
  std::size_t k = 10;
};

struct FilterResult {
  /// Selected pool rows in pool order, each at most once.
  Dataset data;
  std::vector<std::size_t> pool_rows;
  /// k exceeded the pool size and was clamped.
  bool k_clamped = false;
};

/// NN relevancy filter: for every target instance take its k nearest pool
/// instances (Euclidean, ties by origin), then keep the union. Target labels
/// are never read. `jobs` only affects speed.
FilterResult nn_filter(const SourcePool& pool, const Dataset& target, FilterParams params = {},
                       unsigned jobs = 1);

}  // namespace cpdp
