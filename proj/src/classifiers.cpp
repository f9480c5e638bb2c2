#include "cpdp/classifiers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include "cpdp/detail/neighbours.hpp"
#include "cpdp/rng.hpp"

namespace cpdp {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::nb: return "NB";
    case ModelKind::knn: return "KNN";
    case ModelKind::rf: return "RF";
  }
  return "?";
}

std::optional<ModelKind> parse_model(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto kind : {ModelKind::nb, ModelKind::knn, ModelKind::rf}) {
    if (up == to_string(kind)) return kind;
  }
  return std::nullopt;
}

std::uint64_t schema_fingerprint(const std::vector<std::string>& schema) {
  std::uint64_t h = stable_hash("schema");
  for (const auto& col : schema) h = stable_hash(col, splitmix64(h));
  return h;
}

std::vector<double> TrainedModel::predict_scores(const Dataset& data) const {
  return predict_scores(data.features(), schema_fingerprint(data.schema()));
}

std::vector<double> TrainedModel::predict_scores(const FeatureMatrix& x,
                                                 std::uint64_t fingerprint) const {
  if (fingerprint != fingerprint_) {
    throw SchemaError(kind_ + ": scoring data schema differs from training schema");
  }
  return scorer_->scores(x);
}

std::vector<Label> TrainedModel::predict(const Dataset& data) const {
  const auto s = predict_scores(data);
  std::vector<Label> out(s.size());
  std::transform(s.begin(), s.end(), out.begin(), classify);
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

GaussianNaiveBayes::GaussianNaiveBayes(const Dataset& data, double var_smoothing) {
  const auto& x = data.features();
  const Eigen::Index p = x.cols();
  mean_.setZero(2, p);
  var_.setZero(2, p);
  Eigen::Vector2d count = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int c = data.label(i) == Label::defective ? 1 : 0;
    mean_.row(c) += x.row(static_cast<Eigen::Index>(i));
    count[c] += 1;
  }
  mean_.row(0) /= count[0];
  mean_.row(1) /= count[1];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int c = data.label(i) == Label::defective ? 1 : 0;
    var_.row(c).array() += (x.row(static_cast<Eigen::Index>(i)) - mean_.row(c)).array().square();
  }
  var_.row(0) /= count[0];
  var_.row(1) /= count[1];

  const RowVector<double> overall = x.colwise().mean();
  const double max_var = (x.rowwise() - overall).array().square().colwise().mean().maxCoeff();
  epsilon_ = var_smoothing * (max_var > 0 ? max_var : 1.0);
  var_.array() += epsilon_;
  log_prior_ = (count / static_cast<double>(data.size())).array().log();
}

std::pair<double, double> GaussianNaiveBayes::posterior(
    const Eigen::Ref<const RowVector<double>>& x) const {
  Eigen::Vector2d joint;
  for (int c = 0; c < 2; ++c) {
    const auto v = var_.row(c).array();
    joint[c] = log_prior_[c] - 0.5 * (2.0 * std::numbers::pi * v).log().sum() -
               0.5 * ((x.array() - mean_.row(c).array()).square() / v).sum();
  }
  const double top = joint.maxCoeff();
  const double log_norm = top + std::log((joint.array() - top).exp().sum());
  return {std::exp(joint[0] - log_norm), std::exp(joint[1] - log_norm)};
}

std::vector<double> GaussianNaiveBayes::scores(const FeatureMatrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = std::clamp(posterior(x.row(i)).second, 0.0, 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// k nearest neighbours

NearestNeighbours::NearestNeighbours(const Dataset& data, std::size_t k)
    : x_(data.features()), y_(data.labels()), tiebreak_(detail::rank_by(data.origins())), k_(k) {
  if (k_ == 0) throw std::invalid_argument("KNN: n_neighbours must be at least 1");
}

std::vector<double> NearestNeighbours::scores(const FeatureMatrix& x) const {
  std::vector<std::size_t> candidates(y_.size());
  std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto nn = detail::k_nearest(x_, candidates, x.row(i), k_, tiebreak_);
    const auto hits = std::count_if(nn.begin(), nn.end(),
                                    [&](std::size_t j) { return y_[j] == Label::defective; });
    out[static_cast<std::size_t>(i)] = static_cast<double>(hits) / static_cast<double>(nn.size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// CART tree and random forest

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = -1.0;  // larger is better
};

Label majority_vote(std::size_t clean, std::size_t defective) {
  return defective >= clean ? Label::defective : Label::clean;
}

}  // namespace

DecisionTree::DecisionTree(const FeatureMatrix& x, const std::vector<Label>& y,
                           std::vector<std::size_t> rows, std::size_t max_features,
                           std::size_t min_split, std::uint64_t seed) {
  Rng rng(seed);
  const auto p = static_cast<std::size_t>(x.cols());
  struct Pending {
    int node;
    std::vector<std::size_t> rows;
  };
  std::vector<Pending> stack;
  nodes_.push_back({});
  stack.push_back({0, std::move(rows)});

  std::vector<std::size_t> features(p);
  std::vector<std::pair<double, std::size_t>> sorted;
  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    const auto& idx = job.rows;
    std::size_t n1 = 0;
    for (auto r : idx) n1 += y[r] == Label::defective;
    const std::size_t n0 = idx.size() - n1;
    nodes_[static_cast<std::size_t>(job.node)].vote = majority_vote(n0, n1);
    if (n0 == 0 || n1 == 0 || idx.size() < min_split) continue;

    // Visit features in random order until max_features non-constant ones
    // have been examined.
    std::iota(features.begin(), features.end(), std::size_t{0});
    rng.shuffle(features);
    SplitChoice best;
    std::size_t examined = 0;
    for (std::size_t f : features) {
      if (examined == max_features) break;
      sorted.clear();
      for (auto r : idx) sorted.emplace_back(x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)), r);
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;
      ++examined;
      std::size_t left0 = 0, left1 = 0;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        (y[sorted[i].second] == Label::defective ? left1 : left0) += 1;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = static_cast<double>(idx.size() - i - 1);
        const double r0 = static_cast<double>(n0 - left0), r1 = static_cast<double>(n1 - left1);
        const double l0 = static_cast<double>(left0), l1 = static_cast<double>(left1);
        // Minimising weighted Gini == maximising this purity sum.
        const double score = (l0 * l0 + l1 * l1) / nl + (r0 * r0 + r1 * r1) / nr;
        if (score > best.score) {
          const double a = sorted[i].first, b = sorted[i + 1].first;
          double mid = a + (b - a) / 2;
          if (!(mid < b)) mid = a;
          best = {static_cast<int>(f), mid, score};
        }
      }
    }
    if (best.feature < 0) continue;

    std::vector<std::size_t> left, right;
    for (auto r : idx) {
      (x(static_cast<Eigen::Index>(r), best.feature) <= best.threshold ? left : right).push_back(r);
    }
    const int l = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_.push_back({});
    auto& node = nodes_[static_cast<std::size_t>(job.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = l + 1;
    stack.push_back({l + 1, std::move(right)});
    stack.push_back({l, std::move(left)});
  }
}

Label DecisionTree::predict(const Eigen::Ref<const RowVector<double>>& x) const {
  std::size_t at = 0;
  while (nodes_[at].feature >= 0) {
    const auto& n = nodes_[at];
    at = static_cast<std::size_t>(x(n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes_[at].vote;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

RandomForest::RandomForest(const Dataset& data, const ModelParams& params) {
  if (params.rf_trees == 0) throw std::invalid_argument("RF: n_estimators must be at least 1");
  const auto p = data.dims();
  const std::size_t mtry = std::clamp<std::size_t>(
      params.rf_max_features.value_or(static_cast<std::size_t>(std::sqrt(static_cast<double>(p)))),
      1, p);
  const auto y = data.labels();
  trees_.reserve(params.rf_trees);
  for (std::size_t t = 0; t < params.rf_trees; ++t) {
    const std::uint64_t seed = derive_seed(params.rf_seed, {"tree", std::to_string(t)});
    Rng rng(seed);
    std::vector<std::size_t> bootstrap(data.size());
    for (auto& r : bootstrap) r = rng.uniform_index(data.size());
    trees_.emplace_back(data.features(), y, std::move(bootstrap), mtry, params.rf_min_split,
                        rng.next());
  }
}

std::vector<double> RandomForest::scores(const FeatureMatrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::size_t votes = 0;
    for (const auto& tree : trees_) votes += tree.predict(x.row(i)) == Label::defective;
    out[static_cast<std::size_t>(i)] = static_cast<double>(votes) / static_cast<double>(trees_.size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, Trainer>& registry() {
  static std::map<std::string, Trainer> r{
      {"NB",
       [](const Dataset& d, const ModelParams& p) -> std::shared_ptr<const Scorer> {
         return std::make_shared<GaussianNaiveBayes>(d, p.nb_var_smoothing);
       }},
      {"KNN",
       [](const Dataset& d, const ModelParams& p) -> std::shared_ptr<const Scorer> {
         return std::make_shared<NearestNeighbours>(d, p.knn_neighbours);
       }},
      {"RF",
       [](const Dataset& d, const ModelParams& p) -> std::shared_ptr<const Scorer> {
         return std::make_shared<RandomForest>(d, p);
       }},
  };
  return r;
}

}  // namespace

void register_model(const std::string& name, Trainer trainer) {
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(trainer);
}

bool has_model(const std::string& name) {
  std::lock_guard lock(registry_mutex());
  return registry().contains(name);
}

TrainedModel train(const std::string& name, const Dataset& data, const ModelParams& params) {
  Trainer trainer;
  {
    std::lock_guard lock(registry_mutex());
    auto it = registry().find(name);
    if (it == registry().end()) throw std::invalid_argument("unknown model kind '" + name + "'");
    trainer = it->second;
  }
  if (data.n_defective() == 0 || data.n_clean() == 0) {
    throw TrainingError(name + ": training data for '" + data.name() + "' has a single class");
  }
  return TrainedModel(name, schema_fingerprint(data.schema()), trainer(data, params));
}

TrainedModel train(ModelKind kind, const Dataset& data, const ModelParams& params) {
  return train(std::string(to_string(kind)), data, params);
}

}  // namespace cpdp
