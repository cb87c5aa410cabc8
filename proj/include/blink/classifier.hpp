#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "blink/dataset.hpp"
#include "blink/json_format.hpp"

namespace blink {

enum class Algorithm { kDecisionTree, kRandomForest, kKnn, kLogisticRegression, kSvmLinear };

inline constexpr std::array<Algorithm, 5> kAllAlgorithms = {
    Algorithm::kSvmLinear, Algorithm::kKnn, Algorithm::kLogisticRegression,
    Algorithm::kDecisionTree, Algorithm::kRandomForest};

const char* to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

struct Hyperparams {
  // decision_tree / random_forest
  std::size_t min_leaf = 1;
  std::size_t max_depth = 0;  // 0: unlimited
  std::size_t n_trees = 100;
  std::size_t max_features = 0;  // 0: floor(sqrt(columns))
  bool bootstrap = true;
  // knn
  std::size_t k = 5;
  // logistic_regression
  double logistic_l2 = 1e-4;
  double logistic_tolerance = 1e-6;
  std::size_t logistic_max_iter = 10000;
  // svm_linear
  double svm_l2 = 1e-3;
  std::size_t svm_epochs = 50;

  // Throws InvalidConfig outside the documented ranges.
  void validate() const;
  ordered_json to_json() const;
  static Hyperparams from_json(const ordered_json& j);

  bool operator==(const Hyperparams&) const = default;
};

// z-score parameters captured at training time. Zero-variance columns keep
// sd = 1 so they pass through centred.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> sd;

  void apply(std::span<const double> in, std::span<double> out) const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  std::size_t n0 = 0;  // training rows of each class reaching this node
  std::size_t n1 = 0;

  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> x) const;
  // Fraction of class-1 training rows in the leaf x falls in.
  double score(std::span<const double> x) const;
  // Leaf majority; an even split votes 0.
  int vote(std::span<const double> x) const;
};

struct ForestParams {
  std::vector<DecisionTree> trees;
};

struct KnnParams {
  Matrix points;  // standardized training rows
  std::vector<int> labels;
};

struct LinearParams {
  std::vector<double> weights;
  double bias = 0.0;
};

using ModelParams = std::variant<DecisionTree, ForestParams, KnnParams, LinearParams>;

inline constexpr int kModelSchemaVersion = 1;

struct Model {
  Algorithm algorithm = Algorithm::kDecisionTree;
  FeatureSet feature_set = FeatureSet::kAll;
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
  Standardization standardization;  // empty for tree models
  ModelParams params;

  std::size_t n_features() const { return column_count(feature_set); }
};

struct Prediction {
  int label = 0;
  double score = 0.0;  // class-1 affinity in [0, 1]; label is 1 iff score > 0.5
};

// Deterministic in (rows, labels, hyperparams, seed). Throws DegenerateLabels
// for a single-class input and InvalidFeature for a non-finite cell.
Model train(const Matrix& x, std::span<const int> y, FeatureSet feature_set, Algorithm algorithm,
            const Hyperparams& hyperparams, std::uint64_t seed);
Model train(const Dataset& data, Algorithm algorithm, const Hyperparams& hyperparams,
            std::uint64_t seed);

// x must hold exactly the model's active columns (SchemaMismatch otherwise).
Prediction predict_row(const Model& model, std::span<const double> x);
Prediction predict(const Model& model, const FeatureVector& v);

// Throws SchemaMismatch unless the model was trained on `set`.
void require_feature_set(const Model& model, FeatureSet set);

std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

}  // namespace blink
