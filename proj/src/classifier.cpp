#include "blink/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "blink/error.hpp"
#include "classify_internal.hpp"

namespace blink {

namespace {

struct AlgorithmName {
  Algorithm algorithm;
  const char* name;
};

constexpr AlgorithmName kAlgorithmNames[] = {
    {Algorithm::kDecisionTree, "decision_tree"},
    {Algorithm::kRandomForest, "random_forest"},
    {Algorithm::kKnn, "knn"},
    {Algorithm::kLogisticRegression, "logistic_regression"},
    {Algorithm::kSvmLinear, "svm_linear"},
};

bool uses_standardization(Algorithm a) {
  return a == Algorithm::kKnn || a == Algorithm::kLogisticRegression ||
         a == Algorithm::kSvmLinear;
}

}  // namespace

const char* to_string(Algorithm algorithm) {
  for (const auto& entry : kAlgorithmNames) {
    if (entry.algorithm == algorithm) return entry.name;
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  for (const auto& entry : kAlgorithmNames) {
    if (name == entry.name) return entry.algorithm;
  }
  throw InvalidConfig("unknown classifier '" + name + "'");
}

void Hyperparams::validate() const {
  if (min_leaf < 1) throw InvalidConfig("min_leaf must be >= 1");
  if (n_trees < 1) throw InvalidConfig("n_trees must be >= 1");
  if (k < 1) throw InvalidConfig("k must be >= 1");
  if (!(logistic_l2 >= 0.0) || !(logistic_tolerance > 0.0) || logistic_max_iter < 1) {
    throw InvalidConfig("logistic_regression needs l2 >= 0, tolerance > 0, max_iter >= 1");
  }
  if (!(svm_l2 > 0.0) || svm_epochs < 1) {
    throw InvalidConfig("svm_linear needs l2 > 0 and epochs >= 1");
  }
}

ordered_json Hyperparams::to_json() const {
  ordered_json j;
  j["min_leaf"] = min_leaf;
  j["max_depth"] = max_depth;
  j["n_trees"] = n_trees;
  j["max_features"] = max_features;
  j["bootstrap"] = bootstrap;
  j["k"] = k;
  j["logistic_l2"] = logistic_l2;
  j["logistic_tolerance"] = logistic_tolerance;
  j["logistic_max_iter"] = logistic_max_iter;
  j["svm_l2"] = svm_l2;
  j["svm_epochs"] = svm_epochs;
  return j;
}

Hyperparams Hyperparams::from_json(const ordered_json& j) {
  Hyperparams h;
  try {
    h.min_leaf = j.value("min_leaf", h.min_leaf);
    h.max_depth = j.value("max_depth", h.max_depth);
    h.n_trees = j.value("n_trees", h.n_trees);
    h.max_features = j.value("max_features", h.max_features);
    h.bootstrap = j.value("bootstrap", h.bootstrap);
    h.k = j.value("k", h.k);
    h.logistic_l2 = j.value("logistic_l2", h.logistic_l2);
    h.logistic_tolerance = j.value("logistic_tolerance", h.logistic_tolerance);
    h.logistic_max_iter = j.value("logistic_max_iter", h.logistic_max_iter);
    h.svm_l2 = j.value("svm_l2", h.svm_l2);
    h.svm_epochs = j.value("svm_epochs", h.svm_epochs);
  } catch (const ordered_json::exception& e) {
    throw InvalidConfig(std::string("hyperparams: ") + e.what());
  }
  h.validate();
  return h;
}

void Standardization::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - mean[j]) / sd[j];
}

namespace detail {

Standardization fit_standardization(const Matrix& x) {
  Standardization st;
  const std::size_t n = x.rows();
  st.mean.assign(x.cols(), 0.0);
  st.sd.assign(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += x.at(i, j);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (x.at(i, j) - mean) * (x.at(i, j) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    st.mean[j] = mean;
    st.sd[j] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
  }
  return st;
}

Matrix standardize(const Matrix& x, const Standardization& st) {
  Matrix z(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) st.apply(x.row(i), z.row(i));
  return z;
}

}  // namespace detail

Model train(const Matrix& x, std::span<const int> y, FeatureSet feature_set, Algorithm algorithm,
            const Hyperparams& hyperparams, std::uint64_t seed) {
  hyperparams.validate();
  if (x.cols() != column_count(feature_set)) {
    throw SchemaMismatch("training matrix has " + std::to_string(x.cols()) +
                         " columns, feature set " + to_string(feature_set) + " has " +
                         std::to_string(column_count(feature_set)));
  }
  if (y.size() != x.rows()) throw SchemaMismatch("label count differs from row count");
  std::array<std::size_t, 2> counts{0, 0};
  for (int label : y) {
    if (label != 0 && label != 1) throw SchemaMismatch("labels must be 0 or 1");
    ++counts[static_cast<std::size_t>(label)];
  }
  if (counts[0] == 0 || counts[1] == 0) {
    throw DegenerateLabels("training data holds a single class");
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (!std::isfinite(x.at(i, j))) throw InvalidFeature(i, j);
    }
  }

  Model m;
  m.algorithm = algorithm;
  m.feature_set = feature_set;
  m.hyperparams = hyperparams;
  m.seed = seed;

  if (uses_standardization(algorithm)) m.standardization = detail::fit_standardization(x);

  switch (algorithm) {
    case Algorithm::kDecisionTree: {
      std::vector<std::size_t> rows(x.rows());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      m.params = detail::grow_tree(x, y, rows, hyperparams, x.cols(), nullptr);
      break;
    }
    case Algorithm::kRandomForest:
      m.params = detail::grow_forest(x, y, hyperparams, seed);
      break;
    case Algorithm::kKnn:
      m.params = KnnParams{detail::standardize(x, m.standardization), {y.begin(), y.end()}};
      break;
    case Algorithm::kLogisticRegression:
      m.params = detail::fit_logistic(detail::standardize(x, m.standardization), y, hyperparams);
      break;
    case Algorithm::kSvmLinear:
      m.params = detail::fit_svm(detail::standardize(x, m.standardization), y, hyperparams, seed);
      break;
  }
  return m;
}

Model train(const Dataset& data, Algorithm algorithm, const Hyperparams& hyperparams,
            std::uint64_t seed) {
  data.validate();
  const auto y = data.labels();
  return train(data.matrix(), y, data.feature_set, algorithm, hyperparams, seed);
}

namespace {

double knn_score(const KnnParams& p, std::span<const double> z, std::size_t k) {
  const std::size_t n = p.points.rows();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = p.points.row(i);
    double d2 = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) d2 += (row[j] - z[j]) * (row[j] - z[j]);
    dist[i] = {d2, i};
  }
  const std::size_t kk = std::min(k, n);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < kk; ++i) ones += static_cast<std::size_t>(p.labels[dist[i].second]);
  return static_cast<double>(ones) / static_cast<double>(kk);
}

}  // namespace

Prediction predict_row(const Model& model, std::span<const double> x) {
  if (x.size() != model.n_features()) {
    throw SchemaMismatch("model expects " + std::to_string(model.n_features()) +
                         " columns, got " + std::to_string(x.size()));
  }
  std::vector<double> z;
  if (uses_standardization(model.algorithm)) {
    z.resize(x.size());
    model.standardization.apply(x, z);
  }
  double score = 0.0;
  switch (model.algorithm) {
    case Algorithm::kDecisionTree:
      score = std::get<DecisionTree>(model.params).score(x);
      break;
    case Algorithm::kRandomForest: {
      const auto& trees = std::get<ForestParams>(model.params).trees;
      std::size_t votes = 0;
      for (const auto& t : trees) votes += static_cast<std::size_t>(t.vote(x));
      score = static_cast<double>(votes) / static_cast<double>(trees.size());
      break;
    }
    case Algorithm::kKnn:
      score = knn_score(std::get<KnnParams>(model.params), z, model.hyperparams.k);
      break;
    case Algorithm::kLogisticRegression:
    case Algorithm::kSvmLinear: {
      const auto& lp = std::get<LinearParams>(model.params);
      score = detail::sigmoid(std::inner_product(z.begin(), z.end(), lp.weights.begin(), lp.bias));
      break;
    }
  }
  return Prediction{score > 0.5 ? 1 : 0, score};
}

Prediction predict(const Model& model, const FeatureVector& v) {
  const auto cols = active_columns(v, model.feature_set);
  return predict_row(model, cols);
}

void require_feature_set(const Model& model, FeatureSet set) {
  if (model.feature_set != set) {
    throw SchemaMismatch(std::string("model was trained on feature set '") +
                         to_string(model.feature_set) + "', input uses '" + to_string(set) + "'");
  }
}

// ---- serialization ----

namespace {

ordered_json tree_to_json(const DecisionTree& tree) {
  ordered_json nodes = ordered_json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back(ordered_json::array({n.feature, n.threshold, n.left, n.right, n.n0, n.n1}));
  }
  ordered_json j;
  j["nodes"] = std::move(nodes);
  return j;
}

DecisionTree tree_from_json(const ordered_json& j, std::size_t n_features) {
  DecisionTree tree;
  for (const auto& a : j.at("nodes")) {
    TreeNode n;
    n.feature = a.at(0).get<int>();
    n.threshold = a.at(1).get<double>();
    n.left = a.at(2).get<int>();
    n.right = a.at(3).get<int>();
    n.n0 = a.at(4).get<std::size_t>();
    n.n1 = a.at(5).get<std::size_t>();
    tree.nodes.push_back(n);
  }
  const auto count = static_cast<int>(tree.nodes.size());
  if (count == 0) throw SchemaMismatch("model tree has no nodes");
  for (const auto& n : tree.nodes) {
    if (n.feature >= 0 && (n.feature >= static_cast<int>(n_features) || n.left <= 0 ||
                           n.right <= 0 || n.left >= count || n.right >= count)) {
      throw SchemaMismatch("model tree node out of range");
    }
    if (n.feature < 0 && n.n0 + n.n1 == 0) throw SchemaMismatch("empty model tree leaf");
  }
  return tree;
}

}  // namespace

std::string model_to_json(const Model& m) {
  ordered_json j;
  j["schema_version"] = kModelSchemaVersion;
  j["algorithm"] = to_string(m.algorithm);
  j["feature_set"] = to_string(m.feature_set);
  j["seed"] = m.seed;
  j["hyperparams"] = m.hyperparams.to_json();
  j["standardization"] = {{"mean", m.standardization.mean}, {"sd", m.standardization.sd}};
  ordered_json params;
  switch (m.algorithm) {
    case Algorithm::kDecisionTree:
      params = tree_to_json(std::get<DecisionTree>(m.params));
      break;
    case Algorithm::kRandomForest: {
      params["trees"] = ordered_json::array();
      for (const auto& t : std::get<ForestParams>(m.params).trees) {
        params["trees"].push_back(tree_to_json(t));
      }
      break;
    }
    case Algorithm::kKnn: {
      const auto& p = std::get<KnnParams>(m.params);
      params["labels"] = p.labels;
      params["points"] = ordered_json::array();
      for (std::size_t i = 0; i < p.points.rows(); ++i) {
        const auto row = p.points.row(i);
        params["points"].push_back(std::vector<double>(row.begin(), row.end()));
      }
      break;
    }
    case Algorithm::kLogisticRegression:
    case Algorithm::kSvmLinear: {
      const auto& p = std::get<LinearParams>(m.params);
      params["weights"] = p.weights;
      params["bias"] = p.bias;
      break;
    }
  }
  j["parameters"] = std::move(params);
  return dump_json(j);
}

Model model_from_json(const std::string& text) {
  const auto j = parse_json(text, "model");
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion) {
      throw SchemaMismatch("unsupported model schema_version");
    }
    Model m;
    m.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    m.feature_set = feature_set_from_string(j.at("feature_set").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.hyperparams = Hyperparams::from_json(j.at("hyperparams"));
    m.standardization.mean = j.at("standardization").at("mean").get<std::vector<double>>();
    m.standardization.sd = j.at("standardization").at("sd").get<std::vector<double>>();
    const std::size_t d = m.n_features();
    if (uses_standardization(m.algorithm) &&
        (m.standardization.mean.size() != d || m.standardization.sd.size() != d)) {
      throw SchemaMismatch("model standardization does not match its feature set");
    }
    const auto& p = j.at("parameters");
    switch (m.algorithm) {
      case Algorithm::kDecisionTree:
        m.params = tree_from_json(p, d);
        break;
      case Algorithm::kRandomForest: {
        ForestParams f;
        for (const auto& t : p.at("trees")) f.trees.push_back(tree_from_json(t, d));
        if (f.trees.empty()) throw SchemaMismatch("forest has no trees");
        m.params = std::move(f);
        break;
      }
      case Algorithm::kKnn: {
        KnnParams k;
        k.labels = p.at("labels").get<std::vector<int>>();
        const auto& pts = p.at("points");
        if (pts.size() != k.labels.size() || pts.empty()) {
          throw SchemaMismatch("knn points and labels disagree");
        }
        k.points = Matrix(pts.size(), d);
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const auto row = pts[i].get<std::vector<double>>();
          if (row.size() != d) throw SchemaMismatch("knn point has wrong width");
          std::copy(row.begin(), row.end(), k.points.row(i).begin());
        }
        m.params = std::move(k);
        break;
      }
      case Algorithm::kLogisticRegression:
      case Algorithm::kSvmLinear: {
        LinearParams lp;
        lp.weights = p.at("weights").get<std::vector<double>>();
        lp.bias = p.at("bias").get<double>();
        if (lp.weights.size() != d) throw SchemaMismatch("linear weights have wrong width");
        m.params = std::move(lp);
        break;
      }
    }
    return m;
  } catch (const ordered_json::exception& e) {
    throw SchemaMismatch(std::string("model: ") + e.what());
  } catch (const InvalidConfig& e) {
    throw SchemaMismatch(std::string("model: ") + e.what());
  }
}

}  // namespace blink
