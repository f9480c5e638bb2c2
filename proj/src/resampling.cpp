#include "cpdp/resampling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "cpdp/detail/neighbours.hpp"
#include "cpdp/rng.hpp"

namespace cpdp {

std::string_view to_string(ResamplerKind kind) {
  switch (kind) {
    case ResamplerKind::nos: return "NOS";
    case ResamplerKind::ros: return "ROS";
    case ResamplerKind::rus: return "RUS";
    case ResamplerKind::smote: return "SMOTE";
    case ResamplerKind::borderline_smote: return "BORDERLINE";
    case ResamplerKind::adasyn: return "ADASYN";
    case ResamplerKind::mahakil: return "MAHAKIL";
    case ResamplerKind::tomek: return "TOMEK";
    case ResamplerKind::oss: return "OSS";
  }
  return "?";
}

std::optional<ResamplerKind> parse_resampler(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  std::replace(up.begin(), up.end(), '_', '-');
  if (up == "BORDERLINE-SMOTE" || up == "BSMOTE") return ResamplerKind::borderline_smote;
  if (up == "TOMEK-LINKS") return ResamplerKind::tomek;
  for (auto kind : kAllResamplers) {
    if (up == to_string(kind)) return kind;
  }
  return std::nullopt;
}

bool is_oversampler(ResamplerKind kind) {
  return kind == ResamplerKind::ros || kind == ResamplerKind::smote ||
         kind == ResamplerKind::borderline_smote || kind == ResamplerKind::adasyn ||
         kind == ResamplerKind::mahakil;
}

std::size_t ResampleResult::n_synthetic() const {
  return static_cast<std::size_t>(std::count(synthetic.begin(), synthetic.end(), true));
}

ClassSplit split_classes(const Dataset& data) {
  ClassSplit split;
  std::vector<std::size_t> defective, clean;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (data.label(i) == Label::defective ? defective : clean).push_back(i);
  }
  split.balanced = defective.size() == clean.size();
  if (defective.size() <= clean.size()) {
    split.minority = Label::defective;
    split.minority_rows = std::move(defective);
    split.majority_rows = std::move(clean);
  } else {
    split.minority = Label::clean;
    split.minority_rows = std::move(clean);
    split.majority_rows = std::move(defective);
  }
  return split;
}

std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(sum > 0)) throw std::invalid_argument("largest_remainder: no weight");
  std::vector<std::size_t> parts(weights.size());
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] / sum * static_cast<double>(total);
    parts[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(parts[i]);
    assigned += parts[i];
  }
  // Rounding in `exact` can overshoot by a unit in pathological cases.
  while (assigned > total) {
    auto it = std::max_element(parts.begin(), parts.end());
    --*it;
    --assigned;
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t r = 0; assigned < total; r = (r + 1) % order.size()) {
    ++parts[order[r]];
    ++assigned;
  }
  return parts;
}

namespace {

ResampleResult unchanged(const Dataset& data, std::vector<std::string> notes = {}) {
  return ResampleResult{data, std::vector<bool>(data.size(), false), {}, std::move(notes)};
}

ResampleResult keep_rows(const Dataset& data, std::vector<std::size_t> rows,
                         std::vector<std::string> notes = {}) {
  std::sort(rows.begin(), rows.end());
  const std::size_t n = rows.size();
  return ResampleResult{data.subset(rows, data.name()), std::vector<bool>(n, false), {},
                        std::move(notes)};
}

/// Collects generated rows and appends them after the untouched input.
class Oversampler {
 public:
  Oversampler(const Dataset& data, Label label, std::string_view tag)
      : data_(data), label_(label), tag_("synthetic:" + std::string(tag)) {}

  /// Appends a + gap * (b - a); a and b index the output dataset.
  void interpolate(std::size_t a, std::size_t b, double gap, int generation = 0) {
    const FeatureVector pa = row(a);
    const FeatureVector pb = row(b);
    FeatureVector x(pa.size());
    if (generation > 0) {
      x = (pa + pb) * 0.5;
    } else {
      x = pa + gap * (pb - pa);
    }
    traces_.push_back({data_.size() + rows_.size(), a, b, gap, generation});
    rows_.push_back(std::move(x));
  }

  /// Duplicates an input row; the copy keeps the original's provenance.
  void replicate(std::size_t a) { replicas_.push_back(a); }

  std::size_t added() const { return rows_.size() + replicas_.size(); }

  ResampleResult finish(std::vector<std::string> notes) {
    const auto n_in = static_cast<Eigen::Index>(data_.size());
    const auto n_out = n_in + static_cast<Eigen::Index>(replicas_.size() + rows_.size());
    FeatureMatrix x(n_out, data_.features().cols());
    x.topRows(n_in) = data_.features();
    std::vector<int> defects = data_.defect_counts();
    std::vector<Origin> origins = data_.origins();
    std::vector<std::vector<std::string>> extras;
    extras.reserve(static_cast<std::size_t>(n_out));
    for (std::size_t i = 0; i < data_.size(); ++i) extras.push_back(data_.extra_values(i));
    std::vector<bool> synthetic(data_.size(), false);

    Eigen::Index at = n_in;
    for (std::size_t r : replicas_) {
      x.row(at++) = data_.features().row(static_cast<Eigen::Index>(r));
      defects.push_back(data_.defect_count(r));
      origins.push_back(data_.origin(r));
      extras.push_back(data_.extra_values(r));
      synthetic.push_back(false);
    }
    // Traces were recorded assuming synthetics follow the input directly.
    const std::size_t shift = replicas_.size();
    for (std::size_t s = 0; s < rows_.size(); ++s) {
      x.row(at++) = rows_[s].transpose();
      defects.push_back(label_ == Label::defective ? 1 : 0);
      origins.push_back(Origin{tag_, s});
      extras.emplace_back(data_.extra_columns().size());
      synthetic.push_back(true);
    }
    for (auto& t : traces_) {
      t.row += shift;
      if (t.a >= data_.size()) t.a += shift;
      if (t.b >= data_.size()) t.b += shift;
    }
    Dataset out(data_.name(), data_.release(), data_.schema(), std::move(x), std::move(defects),
                std::move(origins), data_.extra_columns(), std::move(extras));
    return ResampleResult{std::move(out), std::move(synthetic), std::move(traces_),
                          std::move(notes)};
  }

 private:
  FeatureVector row(std::size_t i) const {
    if (i < data_.size()) return data_.features().row(static_cast<Eigen::Index>(i)).transpose();
    return rows_.at(i - data_.size());
  }

  const Dataset& data_;
  Label label_;
  std::string tag_;
  std::vector<FeatureVector> rows_;
  std::vector<std::size_t> replicas_;
  std::vector<SyntheticTrace> traces_;
};

std::vector<std::size_t> all_rows(const Dataset& data) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

/// k nearest minority neighbours (self excluded) of each minority row,
/// indexed by position in split.minority_rows.
std::vector<std::vector<std::size_t>> minority_neighbours(const Dataset& data,
                                                          const ClassSplit& split, std::size_t k,
                                                          const std::vector<std::size_t>& rank) {
  std::vector<std::vector<std::size_t>> nn(split.minority_rows.size());
  for (std::size_t i = 0; i < split.minority_rows.size(); ++i) {
    const std::size_t r = split.minority_rows[i];
    nn[i] = detail::k_nearest(data.features(), split.minority_rows,
                              data.features().row(static_cast<Eigen::Index>(r)), k, rank, r);
  }
  return nn;
}

/// Number of majority-class rows among the k nearest neighbours (whole set,
/// self excluded) of each minority row.
std::vector<std::size_t> majority_neighbour_counts(const Dataset& data, const ClassSplit& split,
                                                   std::size_t k,
                                                   const std::vector<std::size_t>& rank) {
  const auto everyone = all_rows(data);
  std::vector<std::size_t> counts(split.minority_rows.size());
  for (std::size_t i = 0; i < split.minority_rows.size(); ++i) {
    const std::size_t r = split.minority_rows[i];
    const auto nn = detail::k_nearest(data.features(), everyone,
                                      data.features().row(static_cast<Eigen::Index>(r)), k, rank, r);
    counts[i] = static_cast<std::size_t>(std::count_if(
        nn.begin(), nn.end(), [&](std::size_t j) { return data.label(j) != split.minority; }));
  }
  return counts;
}

/// Shared SMOTE synthesis: `seeds` are positions in split.minority_rows,
/// visited round-robin after a seeded shuffle.
ResampleResult smote_from_seeds(const Dataset& data, const ClassSplit& split,
                                std::vector<std::size_t> seeds, std::size_t k, Rng& rng,
                                std::string_view tag, std::vector<std::string> notes) {
  const auto rank = detail::rank_by(data.origins());
  const std::size_t kk = std::min(k, split.minority_rows.size() - 1);
  if (kk < k) notes.push_back("k clamped to " + std::to_string(kk) + " (minority size)");
  const auto nn = minority_neighbours(data, split, kk, rank);
  const std::size_t needed = split.majority_rows.size() - split.minority_rows.size();

  rng.shuffle(seeds);
  Oversampler out(data, split.minority, tag);
  for (std::size_t g = 0; g < needed; ++g) {
    const std::size_t s = seeds[g % seeds.size()];
    const std::size_t q = nn[s][rng.uniform_index(nn[s].size())];
    const double gap = rng.uniform01();
    out.interpolate(split.minority_rows[s], q, gap);
  }
  return out.finish(std::move(notes));
}

std::vector<std::size_t> positions(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

}  // namespace

ResampleResult ros(const Dataset& data, std::uint64_t seed) {
  const auto split = split_classes(data);
  if (split.minority_rows.empty()) return unchanged(data, {"ROS: no minority instances"});
  Rng rng(seed);
  Oversampler out(data, split.minority, "ros");
  const std::size_t needed = split.majority_rows.size() - split.minority_rows.size();
  for (std::size_t g = 0; g < needed; ++g) {
    out.replicate(split.minority_rows[rng.uniform_index(split.minority_rows.size())]);
  }
  return out.finish({});
}

ResampleResult rus(const Dataset& data, std::uint64_t seed) {
  const auto split = split_classes(data);
  if (split.minority_rows.empty()) return unchanged(data, {"RUS: no minority instances"});
  Rng rng(seed);
  auto keep = rng.sample_without_replacement(split.majority_rows.size(), split.minority_rows.size());
  std::vector<std::size_t> rows = split.minority_rows;
  for (std::size_t i : keep) rows.push_back(split.majority_rows[i]);
  return keep_rows(data, std::move(rows));
}

ResampleResult smote(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("smote: k must be at least 1");
  const auto split = split_classes(data);
  if (split.minority_rows.empty()) return unchanged(data, {"SMOTE: no minority instances"});
  if (split.balanced) return unchanged(data);
  if (split.minority_rows.size() == 1) {
    auto r = ros(data, seed);
    r.notes.push_back("SMOTE: single minority instance, fell back to ROS");
    return r;
  }
  Rng rng(seed);
  return smote_from_seeds(data, split, positions(split.minority_rows.size()), k, rng, "smote", {});
}

ResampleResult borderline_smote(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("borderline_smote: k must be at least 1");
  const auto split = split_classes(data);
  if (split.minority_rows.empty()) return unchanged(data, {"BORDERLINE: no minority instances"});
  if (split.balanced) return unchanged(data);
  if (split.minority_rows.size() == 1) {
    auto r = ros(data, seed);
    r.notes.push_back("BORDERLINE: single minority instance, fell back to ROS");
    return r;
  }
  const auto rank = detail::rank_by(data.origins());
  const std::size_t m = std::min(k, data.size() - 1);
  const auto majority = majority_neighbour_counts(data, split, m, rank);
  std::vector<std::size_t> danger;
  for (std::size_t i = 0; i < majority.size(); ++i) {
    // DANGER: at least half the neighbours are majority, but not all (NOISE).
    if (2 * majority[i] >= m && majority[i] < m) danger.push_back(i);
  }
  Rng rng(seed);
  if (danger.empty()) {
    return smote_from_seeds(data, split, positions(split.minority_rows.size()), k, rng,
                            "borderline", {"BORDERLINE: empty DANGER set, fell back to SMOTE"});
  }
  return smote_from_seeds(data, split, std::move(danger), k, rng, "borderline", {});
}

ResampleResult adasyn(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("adasyn: k must be at least 1");
  const auto split = split_classes(data);
  if (split.minority_rows.empty()) return unchanged(data, {"ADASYN: no minority instances"});
  if (split.balanced) return unchanged(data);
  if (split.minority_rows.size() == 1) {
    auto r = ros(data, seed);
    r.notes.push_back("ADASYN: single minority instance, fell back to ROS");
    return r;
  }
  std::vector<std::string> notes;
  const auto rank = detail::rank_by(data.origins());
  const std::size_t m = std::min(k, data.size() - 1);
  const auto majority = majority_neighbour_counts(data, split, m, rank);
  std::vector<double> ratio(majority.size());
  for (std::size_t i = 0; i < majority.size(); ++i) {
    ratio[i] = static_cast<double>(majority[i]) / static_cast<double>(m);
  }
  if (std::accumulate(ratio.begin(), ratio.end(), 0.0) == 0.0) {
    notes.push_back("ADASYN: no minority instance has majority neighbours, uniform quotas");
    std::fill(ratio.begin(), ratio.end(), 1.0);
  }
  const std::size_t needed = split.majority_rows.size() - split.minority_rows.size();
  const auto quota = largest_remainder(ratio, needed);

  const std::size_t kk = std::min(k, split.minority_rows.size() - 1);
  if (kk < k) notes.push_back("k clamped to " + std::to_string(kk) + " (minority size)");
  const auto nn = minority_neighbours(data, split, kk, rank);
  Rng rng(seed);
  Oversampler out(data, split.minority, "adasyn");
  for (std::size_t i = 0; i < quota.size(); ++i) {
    for (std::size_t g = 0; g < quota[i]; ++g) {
      const std::size_t q = nn[i][rng.uniform_index(nn[i].size())];
      const double gap = rng.uniform01();
      out.interpolate(split.minority_rows[i], q, gap);
    }
  }
  return out.finish(std::move(notes));
}

ResampleResult mahakil(const Dataset& data, std::uint64_t seed) {
  const auto split = split_classes(data);
  if (split.minority_rows.empty()) return unchanged(data, {"MAHAKIL: no minority instances"});
  if (split.balanced) return unchanged(data);
  const std::size_t n = split.minority_rows.size();
  if (n < 4) {
    auto r = ros(data, seed);
    r.notes.push_back("MAHAKIL: fewer than 4 minority instances, fell back to ROS");
    return r;
  }
  std::vector<std::string> notes;
  const Eigen::Index p = data.features().cols();
  FeatureMatrix minority(static_cast<Eigen::Index>(n), p);
  for (std::size_t i = 0; i < n; ++i) {
    minority.row(static_cast<Eigen::Index>(i)) =
        data.features().row(static_cast<Eigen::Index>(split.minority_rows[i]));
  }
  const RowVector<double> mean = minority.colwise().mean();
  const FeatureMatrix centred = minority.rowwise() - mean;
  Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    const double trace = cov.trace();
    const double lambda = trace > 0 ? 1e-6 * trace / static_cast<double>(p) : 1e-6;
    cov.diagonal().array() += lambda;
    llt.compute(cov);
    notes.push_back("MAHAKIL: singular minority covariance, shrinkage applied");
  }
  std::vector<double> distance(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd d = centred.row(static_cast<Eigen::Index>(i)).transpose();
    distance[i] = d.dot(llt.solve(d));
  }

  const auto rank = detail::rank_by(data.origins());
  std::vector<std::size_t> order = positions(n);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (distance[a] != distance[b]) return distance[a] > distance[b];
    return rank[split.minority_rows[a]] < rank[split.minority_rows[b]];
  });
  const std::size_t bin1 = (n + 1) / 2;

  // Each generation emits one child per (parent, parent) edge; the child then
  // forms new edges with both of its parents.
  struct Edge {
    std::size_t a, b;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + bin1 < n; ++i) {
    edges.push_back({split.minority_rows[order[i]], split.minority_rows[order[bin1 + i]]});
  }
  const std::size_t needed = split.majority_rows.size() - n;
  Oversampler out(data, split.minority, "mahakil");
  for (int generation = 1; out.added() < needed; ++generation) {
    std::vector<Edge> next;
    next.reserve(edges.size() * 2);
    for (const auto& e : edges) {
      if (out.added() == needed) break;
      const std::size_t child = data.size() + out.added();
      out.interpolate(e.a, e.b, 0.5, generation);
      next.push_back({e.a, child});
      next.push_back({e.b, child});
    }
    edges = std::move(next);
  }
  return out.finish(std::move(notes));
}

std::vector<std::pair<std::size_t, std::size_t>> find_tomek_links(
    const Dataset& data, const std::vector<std::size_t>& rows) {
  const auto& x = data.features();
  // nearest[i]: every row at the minimum distance from rows[i].
  std::vector<std::vector<std::size_t>> nearest(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (i == j) continue;
      const double d = detail::squared_distance(x.row(static_cast<Eigen::Index>(rows[i])),
                                                x.row(static_cast<Eigen::Index>(rows[j])));
      if (d < best) {
        best = d;
        nearest[i].assign(1, j);
      } else if (d == best) {
        nearest[i].push_back(j);
      }
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j : nearest[i]) {
      if (j <= i || data.label(rows[i]) == data.label(rows[j])) continue;
      const auto& back = nearest[j];
      if (std::find(back.begin(), back.end(), i) != back.end()) {
        links.emplace_back(rows[i], rows[j]);
      }
    }
  }
  return links;
}

ResampleResult tomek_links(const Dataset& data) {
  const auto split = split_classes(data);
  if (split.minority_rows.empty()) return unchanged(data, {"TOMEK: no minority instances"});
  const Label majority = other(split.minority);
  std::vector<std::size_t> rows = all_rows(data);
  for (;;) {
    const auto links = find_tomek_links(data, rows);
    if (links.empty()) break;
    std::vector<char> drop(data.size(), 0);
    for (auto [a, b] : links) {
      drop[data.label(a) == majority ? a : b] = 1;
    }
    std::erase_if(rows, [&](std::size_t r) { return drop[r] != 0; });
  }
  return keep_rows(data, std::move(rows));
}

ResampleResult one_sided_selection(const Dataset& data, std::uint64_t seed) {
  const auto split = split_classes(data);
  if (split.minority_rows.empty()) return unchanged(data, {"OSS: no minority instances"});
  const Label majority = other(split.minority);
  const auto rank = detail::rank_by(data.origins());
  Rng rng(seed);

  std::vector<std::size_t> store = split.minority_rows;
  const std::size_t pivot = split.majority_rows[rng.uniform_index(split.majority_rows.size())];
  store.push_back(pivot);
  std::vector<char> in_store(data.size(), 0);
  for (std::size_t r : store) in_store[r] = 1;

  const std::vector<std::size_t> initial = store;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (in_store[i]) continue;
    const auto nn = detail::k_nearest(data.features(), initial,
                                      data.features().row(static_cast<Eigen::Index>(i)), 1, rank);
    if (data.label(nn.front()) != data.label(i)) store.push_back(i);
  }
  std::sort(store.begin(), store.end());

  std::vector<char> drop(data.size(), 0);
  for (auto [a, b] : find_tomek_links(data, store)) {
    drop[data.label(a) == majority ? a : b] = 1;
  }
  std::erase_if(store, [&](std::size_t r) { return drop[r] != 0; });
  return keep_rows(data, std::move(store));
}

ResampleResult resample(const Dataset& data, ResamplerKind kind, const ResampleParams& params) {
  if (params.k_smote == 0) throw std::invalid_argument("resample: k_smote must be at least 1");
  if (kind == ResamplerKind::nos) return unchanged(data);
  const auto split = split_classes(data);
  if (split.minority_rows.empty()) {
    return unchanged(data, {std::string(to_string(kind)) +
                            ": training data has a single class, left unchanged"});
  }
  switch (kind) {
    case ResamplerKind::ros: return ros(data, params.seed);
    case ResamplerKind::rus: return rus(data, params.seed);
    case ResamplerKind::smote: return smote(data, params.k_smote, params.seed);
    case ResamplerKind::borderline_smote:
      return borderline_smote(data, params.k_smote, params.seed);
    case ResamplerKind::adasyn: return adasyn(data, params.k_smote, params.seed);
    case ResamplerKind::mahakil: return mahakil(data, params.seed);
    case ResamplerKind::tomek: return tomek_links(data);
    case ResamplerKind::oss: return one_sided_selection(data, params.seed);
    case ResamplerKind::nos: break;
  }
  return unchanged(data);
}

}  // namespace cpdp
