#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "blink/classifier.hpp"
#include "blink/dataset.hpp"

namespace blink {

enum class F1Mode { kBinary, kMacro };

const char* to_string(F1Mode mode);
F1Mode f1_mode_from_string(const std::string& name);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  Confusion& operator+=(const Confusion& o);
  bool operator==(const Confusion&) const = default;
};

Confusion confusion(std::span<const int> y_true, std::span<const int> y_pred);

struct Metrics {
  double accuracy = 0.0;
  double f1 = 0.0;
};

// Accuracy and F1 of the drowsy class (binary) or the unweighted mean of
// both per-class F1 scores (macro). An F1 with precision + recall = 0 is 0.
// Throws SchemaMismatch on empty or unequal inputs.
Metrics metrics(std::span<const int> y_true, std::span<const int> y_pred,
                F1Mode mode = F1Mode::kBinary);

struct CvOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  F1Mode f1_mode = F1Mode::kBinary;
  // Keep every video's rows in one fold (stratified by video label).
  bool group_by_video = false;
};

struct FoldResult {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

struct CvReport {
  Algorithm algorithm = Algorithm::kDecisionTree;
  FeatureSet feature_set = FeatureSet::kAll;
  Hyperparams hyperparams;
  CvOptions options;
  std::vector<std::size_t> fold_of_row;
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  double mean_f1 = 0.0;
  Confusion total;
  // Out-of-fold prediction for every row.
  std::vector<int> predictions;
};

// Stratified fold assignment: within each class, rows are shuffled with
// `seed` and dealt round-robin, the deal continuing from class 0 into class 1.
// Throws InsufficientPerClass when a class has fewer rows than folds.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds,
                                          std::uint64_t seed);

// The same over videos: each video (all rows sharing a video_id, which must
// share one label) goes to a single fold.
std::vector<std::size_t> grouped_folds(const Dataset& data, std::size_t folds, std::uint64_t seed);

CvReport cross_validate(const Dataset& data, Algorithm algorithm, const Hyperparams& hyperparams,
                        const CvOptions& options);

ordered_json cv_report_to_json(const CvReport& report);

// Every classifier against both feature sets.
struct AblationReport {
  std::vector<CvReport> set1;
  std::vector<CvReport> all;
};

AblationReport run_ablation(const std::vector<FeatureVector>& rows, const Hyperparams& hyperparams,
                            const CvOptions& options);

ordered_json ablation_to_json(const AblationReport& report);

// Plain-text table, one row per classifier, accuracy and F1 (percent) for
// blink_set1 and blink_set1+blink_set2.
std::string ablation_table(const AblationReport& report);

}  // namespace blink
