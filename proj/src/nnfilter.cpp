#include "cpdp/nnfilter.hpp"

#include <numeric>

#include "cpdp/detail/neighbours.hpp"
#include "cpdp/parallel.hpp"

namespace cpdp {

FilterResult nn_filter(const SourcePool& pool, const Dataset& target, FilterParams params,
                       unsigned jobs) {
  if (params.k == 0) throw std::invalid_argument("nn_filter: k must be at least 1");
  const Dataset& source = pool.data;
  if (source.schema() != target.schema()) {
    throw SchemaError("nn_filter: pool and target '" + target.name() + "' schemas differ");
  }
  const std::size_t k = std::min(params.k, source.size());

  std::vector<std::size_t> candidates(source.size());
  std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  const auto tiebreak = detail::rank_by(source.origins());

  std::vector<std::vector<std::size_t>> picks(target.size());
  parallel_for(target.size(), jobs, [&](std::size_t t) {
    picks[t] = detail::k_nearest(source.features(), candidates,
                                 target.features().row(static_cast<Eigen::Index>(t)), k, tiebreak);
  });

  std::vector<char> selected(source.size(), 0);
  for (const auto& p : picks) {
    for (std::size_t row : p) selected[row] = 1;
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (selected[i]) rows.push_back(i);
  }
  return FilterResult{source.subset(rows, target.name()), rows, params.k > source.size()};
}

}  // namespace cpdp
