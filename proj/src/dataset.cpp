#include "blink/dataset.hpp"

#include <algorithm>

#include "blink/error.hpp"

namespace blink {

std::size_t column_count(FeatureSet set) {
  return set == FeatureSet::kSet1 ? kSet1Count : kFeatureCount;
}

const char* to_string(FeatureSet set) { return set == FeatureSet::kSet1 ? "set1" : "all"; }

FeatureSet feature_set_from_string(const std::string& name) {
  if (name == "set1") return FeatureSet::kSet1;
  if (name == "all") return FeatureSet::kAll;
  throw InvalidConfig("unknown feature set '" + name + "' (expected set1 or all)");
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& label = rows[i].label;
    if (!label) {
      throw SchemaMismatch("row " + std::to_string(i) + " (" + rows[i].video_id + ") is unlabeled");
    }
    if (*label != 0 && *label != 1) {
      throw SchemaMismatch("row " + std::to_string(i) + " has label " + std::to_string(*label) +
                           ", expected 0 or 1");
    }
  }
}

std::array<std::size_t, 2> Dataset::class_counts() const {
  std::array<std::size_t, 2> counts{0, 0};
  for (const auto& r : rows) {
    if (r.label && (*r.label == 0 || *r.label == 1)) ++counts[static_cast<std::size_t>(*r.label)];
  }
  return counts;
}

Matrix Dataset::matrix() const {
  const std::size_t cols = column_count(feature_set);
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(rows[i].values.begin(), cols, m.row(i).begin());
  }
  return m;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> y;
  y.reserve(rows.size());
  for (const auto& r : rows) y.push_back(r.label.value_or(-1));
  return y;
}

std::vector<double> active_columns(const FeatureVector& v, FeatureSet set) {
  return {v.values.begin(), v.values.begin() + static_cast<std::ptrdiff_t>(column_count(set))};
}

}  // namespace blink
