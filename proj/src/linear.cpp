#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "classify_internal.hpp"

namespace blink::detail {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Full-batch gradient descent on mean log-loss + (l2 / 2) |w|^2 (bias
// unpenalised). On z-scored columns the loss is L-smooth with
// L <= (d + 1) / 4 + l2, which fixes the step at 1 / L.
LinearParams fit_logistic(const Matrix& z, std::span<const int> y, const Hyperparams& hp) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  const double lambda = hp.logistic_l2;
  const double step = 1.0 / (0.25 * static_cast<double>(d + 1) + lambda);
  const double inv_n = 1.0 / static_cast<double>(n);

  LinearParams p;
  p.weights.assign(d, 0.0);
  std::vector<double> grad(d);
  for (std::size_t iter = 0; iter < hp.logistic_max_iter; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = z.row(i);
      const double margin = std::inner_product(row.begin(), row.end(), p.weights.begin(), p.bias);
      const double residual = sigmoid(margin) - static_cast<double>(y[i]);
      for (std::size_t j = 0; j < d; ++j) grad[j] += residual * row[j];
      grad_b += residual;
    }
    double norm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      grad[j] = grad[j] * inv_n + lambda * p.weights[j];
      norm2 += grad[j] * grad[j];
    }
    grad_b *= inv_n;
    norm2 += grad_b * grad_b;
    if (std::sqrt(norm2) < hp.logistic_tolerance) break;
    for (std::size_t j = 0; j < d; ++j) p.weights[j] -= step * grad[j];
    p.bias -= step * grad_b;
  }
  return p;
}

// Pegasos: stochastic subgradient on hinge loss + (l2 / 2) |w|^2 with step
// 1 / (l2 t) and projection onto the ball of radius 1 / sqrt(l2). The bias
// is the weight of an appended constant column.
LinearParams fit_svm(const Matrix& z, std::span<const int> y, const Hyperparams& hp,
                     std::uint64_t seed) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  const double lambda = hp.svm_l2;
  const double radius = 1.0 / std::sqrt(lambda);

  std::vector<double> w(d + 1, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < hp.svm_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto row = z.row(i);
      const double label = y[i] == 1 ? 1.0 : -1.0;
      const double margin = std::inner_product(row.begin(), row.end(), w.begin(), w[d]);
      const double shrink = 1.0 - eta * lambda;
      for (auto& wj : w) wj *= shrink;
      if (label * margin < 1.0) {
        for (std::size_t j = 0; j < d; ++j) w[j] += eta * label * row[j];
        w[d] += eta * label;
      }
      double norm2 = 0.0;
      for (auto wj : w) norm2 += wj * wj;
      const double norm = std::sqrt(norm2);
      if (norm > radius) {
        const double scale = radius / norm;
        for (auto& wj : w) wj *= scale;
      }
    }
  }
  LinearParams p;
  p.bias = w[d];
  w.pop_back();
  p.weights = std::move(w);
  return p;
}

}  // namespace blink::detail
