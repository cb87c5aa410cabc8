#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blink/features.hpp"

namespace blink {

// Active feature columns: blink_set1 (features 1-10) or all thirteen.
enum class FeatureSet { kSet1, kAll };

std::size_t column_count(FeatureSet set);
const char* to_string(FeatureSet set);
FeatureSet feature_set_from_string(const std::string& name);

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Labeled rows plus the active column subset.
struct Dataset {
  std::vector<FeatureVector> rows;
  FeatureSet feature_set = FeatureSet::kAll;

  // Throws SchemaMismatch on an unlabeled row or a label outside {0, 1}.
  void validate() const;
  std::array<std::size_t, 2> class_counts() const;
  Matrix matrix() const;
  std::vector<int> labels() const;
};

// Active columns of one vector.
std::vector<double> active_columns(const FeatureVector& v, FeatureSet set);

}  // namespace blink
