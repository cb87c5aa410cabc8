#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "classify_internal.hpp"

namespace blink {

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  const TreeNode* node = &nodes.front();
  while (node->feature >= 0) {
    const auto f = static_cast<std::size_t>(node->feature);
    node = &nodes[static_cast<std::size_t>(x[f] <= node->threshold ? node->left : node->right)];
  }
  return *node;
}

double DecisionTree::score(std::span<const double> x) const {
  const TreeNode& leaf = leaf_for(x);
  return static_cast<double>(leaf.n1) / static_cast<double>(leaf.n0 + leaf.n1);
}

int DecisionTree::vote(std::span<const double> x) const {
  const TreeNode& leaf = leaf_for(x);
  return leaf.n1 > leaf.n0 ? 1 : 0;
}

namespace detail {
namespace {

double gini(double n0, double n1) {
  const double n = n0 + n1;
  if (n == 0.0) return 0.0;
  const double p0 = n0 / n;
  const double p1 = n1 / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

class TreeGrower {
 public:
  TreeGrower(const Matrix& x, std::span<const int> y, const Hyperparams& hp,
             std::size_t max_features, std::mt19937_64* rng)
      : x_(x), y_(y), hp_(hp), max_features_(max_features), rng_(rng) {
    order_.resize(x.cols());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  DecisionTree run(std::vector<std::size_t> rows) {
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t>& rows, std::size_t depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::size_t n1 = 0;
    for (auto r : rows) n1 += static_cast<std::size_t>(y_[r]);
    const std::size_t n0 = rows.size() - n1;
    tree_.nodes[static_cast<std::size_t>(id)].n0 = n0;
    tree_.nodes[static_cast<std::size_t>(id)].n1 = n1;

    const bool pure = n0 == 0 || n1 == 0;
    const bool depth_cap = hp_.max_depth > 0 && depth >= hp_.max_depth;
    if (pure || depth_cap || rows.size() < 2 * hp_.min_leaf) return id;

    const Split split = best_split(rows);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    const auto f = static_cast<std::size_t>(split.feature);
    for (auto r : rows) (x_.at(r, f) <= split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(left, depth + 1);
    const int rgt = grow(right, depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = rgt;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& rows) {
    if (rng_) std::shuffle(order_.begin(), order_.end(), *rng_);
    Split best;
    std::size_t tried = 0;
    for (auto f : order_) {
      if (rng_ && tried >= max_features_ && best.feature >= 0) break;
      ++tried;
      scan_feature(rows, f, best);
    }
    return best;
  }

  void scan_feature(const std::vector<std::size_t>& rows, std::size_t f, Split& best) {
    sorted_.assign(rows.begin(), rows.end());
    std::sort(sorted_.begin(), sorted_.end(), [&](std::size_t a, std::size_t b) {
      const double va = x_.at(a, f);
      const double vb = x_.at(b, f);
      return va < vb || (va == vb && a < b);
    });
    const std::size_t n = sorted_.size();
    double total1 = 0.0;
    for (auto r : sorted_) total1 += y_[r];
    const double total0 = static_cast<double>(n) - total1;
    double left1 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left1 += y_[sorted_[i]];
      const double v = x_.at(sorted_[i], f);
      if (v == x_.at(sorted_[i + 1], f)) continue;
      const std::size_t n_left = i + 1;
      if (n_left < hp_.min_leaf || n - n_left < hp_.min_leaf) continue;
      const double left0 = static_cast<double>(n_left) - left1;
      const double right1 = total1 - left1;
      const double right0 = total0 - left0;
      const double impurity = (static_cast<double>(n_left) * gini(left0, left1) +
                               static_cast<double>(n - n_left) * gini(right0, right1)) /
                              static_cast<double>(n);
      if (best.feature < 0 || impurity < best.impurity) {
        best = Split{static_cast<int>(f), v, impurity};
      }
    }
  }

  const Matrix& x_;
  std::span<const int> y_;
  const Hyperparams& hp_;
  std::size_t max_features_;
  std::mt19937_64* rng_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> sorted_;
  DecisionTree tree_;
};

}  // namespace

DecisionTree grow_tree(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                       const Hyperparams& hp, std::size_t max_features, std::mt19937_64* rng) {
  TreeGrower grower(x, y, hp, max_features, rng);
  return grower.run(std::vector<std::size_t>(rows.begin(), rows.end()));
}

ForestParams grow_forest(const Matrix& x, std::span<const int> y, const Hyperparams& hp,
                         std::uint64_t seed) {
  const std::size_t n = x.rows();
  std::size_t max_features = hp.max_features;
  if (max_features == 0) {
    max_features =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
  }
  std::mt19937_64 master(seed);
  ForestParams forest;
  forest.trees.reserve(hp.n_trees);
  std::vector<std::size_t> rows(n);
  for (std::size_t t = 0; t < hp.n_trees; ++t) {
    std::mt19937_64 rng(master());
    if (hp.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& r : rows) r = pick(rng);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    forest.trees.push_back(grow_tree(x, y, rows, hp, max_features, &rng));
  }
  return forest;
}

}  // namespace detail
}  // namespace blink
