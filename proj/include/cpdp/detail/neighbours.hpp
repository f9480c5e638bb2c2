#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cpdp/types.hpp"

namespace cpdp::detail {

/// Squared Euclidean distance between two rows. The element order is fixed,
/// so d(a, b) and d(b, a) are bit-identical.
template <typename DA, typename DB>
double squared_distance(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double d = a(j) - b(j);
    s += d * d;
  }
  return s;
}

struct Neighbour {
  double distance;     // squared
  std::size_t rank;    // tie-break key
  std::size_t row;
  friend bool operator<(const Neighbour& a, const Neighbour& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.rank < b.rank;
  }
};

/// The k nearest candidates of `query`, nearest first, ties broken by
/// tiebreak[row]. `exclude` drops one row (the query itself) from the search.
template <typename DQ>
std::vector<std::size_t> k_nearest(const FeatureMatrix& x, std::span<const std::size_t> candidates,
                                   const Eigen::MatrixBase<DQ>& query, std::size_t k,
                                   std::span<const std::size_t> tiebreak,
                                   std::size_t exclude = static_cast<std::size_t>(-1)) {
  std::vector<Neighbour> all;
  all.reserve(candidates.size());
  for (std::size_t row : candidates) {
    if (row == exclude) continue;
    all.push_back({squared_distance(x.row(static_cast<Eigen::Index>(row)), query), tiebreak[row], row});
  }
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = all[i].row;
  return out;
}

/// Rank of each row when rows are ordered by `key` (stable for equal keys).
template <typename Key>
std::vector<std::size_t> rank_by(const std::vector<Key>& key) {
  std::vector<std::size_t> order(key.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  std::vector<std::size_t> rank(key.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

}  // namespace cpdp::detail
