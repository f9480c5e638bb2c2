#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpdp/data.hpp"

namespace cpdp {

enum class ModelKind { nb, knn, rf };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model(std::string_view name);

/// Built-in model settings. Defaults follow the reference configuration:
/// KNN n_neighbours=3, RF n_estimators=1000 with random state 42.
///
/// The reference study also ran NNET (hidden layers {30, 30, 30}), SVM
/// (linear kernel) and XGBoost (library defaults). These are not built in;
/// register them through register_model().
struct ModelParams {
  /// NB variance smoothing, relative to the largest feature variance.
  double nb_var_smoothing = 1e-9;
  std::size_t knn_neighbours = 3;
  std::size_t rf_trees = 1000;
  std::uint64_t rf_seed = 42;
  /// Candidate features per split; floor(sqrt(p)) when unset.
  std::optional<std::size_t> rf_max_features;
  std::size_t rf_min_split = 2;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fitted model's scoring function: one defect score in [0, 1] per row.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> scores(const FeatureMatrix& x) const = 0;
};

std::uint64_t schema_fingerprint(const std::vector<std::string>& schema);

/// Immutable trained model. Scoring checks the schema fingerprint.
class TrainedModel {
 public:
  TrainedModel(std::string kind, std::uint64_t fingerprint, std::shared_ptr<const Scorer> scorer)
      : kind_(std::move(kind)), fingerprint_(fingerprint), scorer_(std::move(scorer)) {}

  const std::string& kind() const { return kind_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  const Scorer& scorer() const { return *scorer_; }

  std::vector<double> predict_scores(const Dataset& data) const;
  std::vector<double> predict_scores(const FeatureMatrix& x, std::uint64_t fingerprint) const;
  std::vector<Label> predict(const Dataset& data) const;

 private:
  std::string kind_;
  std::uint64_t fingerprint_;
  std::shared_ptr<const Scorer> scorer_;
};

/// score >= 0.5 -> defective.
inline Label classify(double score) { return score >= 0.5 ? Label::defective : Label::clean; }

using Trainer = std::function<std::shared_ptr<const Scorer>(const Dataset&, const ModelParams&)>;

/// Adds or replaces a model kind available to train(name, ...).
void register_model(const std::string& name, Trainer trainer);
bool has_model(const std::string& name);

/// Throws TrainingError when the data holds a single class.
TrainedModel train(ModelKind kind, const Dataset& data, const ModelParams& params = {});
TrainedModel train(const std::string& name, const Dataset& data, const ModelParams& params = {});

// Built-in scorers, exposed for inspection in tests.

class GaussianNaiveBayes final : public Scorer {
 public:
  GaussianNaiveBayes(const Dataset& data, double var_smoothing);
  std::vector<double> scores(const FeatureMatrix& x) const override;
  /// P(clean | x), P(defective | x).
  std::pair<double, double> posterior(const Eigen::Ref<const RowVector<double>>& x) const;

  const FeatureMatrix& means() const { return mean_; }
  const FeatureMatrix& variances() const { return var_; }
  double epsilon() const { return epsilon_; }

 private:
  FeatureMatrix mean_;  // 2 x p, row = class
  FeatureMatrix var_;
  Eigen::Vector2d log_prior_;
  double epsilon_ = 0.0;
};

class NearestNeighbours final : public Scorer {
 public:
  NearestNeighbours(const Dataset& data, std::size_t k);
  std::vector<double> scores(const FeatureMatrix& x) const override;
  const FeatureMatrix& training_features() const { return x_; }
  const std::vector<Label>& training_labels() const { return y_; }

 private:
  FeatureMatrix x_;
  std::vector<Label> y_;
  std::vector<std::size_t> tiebreak_;
  std::size_t k_;
};

class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Label vote = Label::clean;
  };

  /// Grows a CART tree on `rows` (duplicates allowed, i.e. a bootstrap).
  DecisionTree(const FeatureMatrix& x, const std::vector<Label>& y, std::vector<std::size_t> rows,
               std::size_t max_features, std::size_t min_split, std::uint64_t seed);

  Label predict(const Eigen::Ref<const RowVector<double>>& x) const;
  std::size_t depth() const;
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
};

class RandomForest final : public Scorer {
 public:
  RandomForest(const Dataset& data, const ModelParams& params);
  std::vector<double> scores(const FeatureMatrix& x) const override;
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

}  // namespace cpdp
