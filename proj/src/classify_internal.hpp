#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "blink/classifier.hpp"

namespace blink::detail {

double sigmoid(double z);

Standardization fit_standardization(const Matrix& x);
Matrix standardize(const Matrix& x, const Standardization& st);

// CART with Gini impurity. With `rng`, each split draws candidate columns in
// a random order and stops after `max_features` once one yields a split.
DecisionTree grow_tree(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                       const Hyperparams& hp, std::size_t max_features, std::mt19937_64* rng);

ForestParams grow_forest(const Matrix& x, std::span<const int> y, const Hyperparams& hp,
                         std::uint64_t seed);

LinearParams fit_logistic(const Matrix& z, std::span<const int> y, const Hyperparams& hp);
LinearParams fit_svm(const Matrix& z, std::span<const int> y, const Hyperparams& hp,
                     std::uint64_t seed);

}  // namespace blink::detail
