#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blink/calibration.hpp"
#include "blink/classifier.hpp"
#include "blink/cross_validation.hpp"
#include "blink/features.hpp"
#include "blink/json_format.hpp"
#include "blink/segmenter.hpp"

namespace blink {

struct PipelineConfig {
  CalibrationConfig calibration;
  Algorithm algorithm = Algorithm::kRandomForest;
  Hyperparams hyperparams;
  FeatureSet feature_set = FeatureSet::kAll;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  F1Mode f1_mode = F1Mode::kBinary;
  bool group_by_video = false;
  // Also emit features for a trailing cycle that reopened but saw no
  // following blink start.
  bool include_incomplete = false;
  // Causal majority vote over the last N blink labels; 0 disables it.
  std::size_t smoothing_window = 0;

  void validate() const;  // InvalidConfig
  ordered_json to_json() const;
  // Missing keys keep their defaults.
  static PipelineConfig from_json(const ordered_json& j);
  static PipelineConfig load(const std::string& path);

  CvOptions cv_options() const;
};

// Frame bookkeeping: records = calibration_frames + segmented_frames + dropped_frames.
struct Diagnostics {
  std::size_t records = 0;
  std::size_t calibration_frames = 0;
  std::size_t segmented_frames = 0;
  std::size_t dropped_frames = 0;
  std::int64_t gap_resets = 0;
  std::int64_t discarded_partials = 0;
  std::vector<std::string> warnings;

  bool balanced() const { return records == calibration_frames + segmented_frames + dropped_frames; }
  ordered_json to_json() const;
};

struct ExtractResult {
  CalibrationProfile profile;
  // Cycles starting after the calibration window, trailing incomplete last.
  std::vector<BlinkCycle> cycles;
  std::vector<FeatureVector> features;
  Diagnostics diagnostics;
};

// Calibrates on the leading window, segments the whole stream with the
// resulting thresholds and extracts features for complete cycles that start
// after the window. `records`/`dropped` describe the raw input for the
// frame-accounting check.
ExtractResult extract_session(std::span<const EarSample> samples, const PipelineConfig& config,
                              const std::string& video_id, std::optional<int> label,
                              std::size_t records, std::size_t dropped);

FeatureVector extract_features_allow_incomplete(const BlinkCycle& cycle,
                                                const CalibrationProfile& profile);

struct BlinkPrediction {
  std::int64_t blink_index = 0;
  std::int64_t frame = 0;  // frame at which the cycle completed
  int label = 0;
  double score = 0.0;
  std::optional<int> smoothed_label;
};

ordered_json prediction_to_json(const BlinkPrediction& p);

struct SessionReport {
  std::string video_id;
  std::size_t n_blinks = 0;
  std::vector<BlinkPrediction> predictions;
  double fraction_non_drowsy = 0.0;
  double fraction_drowsy = 0.0;
  std::optional<double> smoothed_fraction_drowsy;
  std::optional<CalibrationProfile> calibration;
  Diagnostics diagnostics;

  ordered_json to_json() const;
};

// Fractions of label 0 / label 1 over the predictions (both 0 when empty).
void summarize(SessionReport& report, std::size_t smoothing_window);

// Streaming monitor. Buffers the calibration window, calibrates, replays the
// buffer through the segmenter and from then on predicts each cycle the
// moment the segmenter completes it.
class MonitorSession {
 public:
  // Throws SchemaMismatch when the model's feature set differs from the
  // configured one.
  MonitorSession(Model model, PipelineConfig config, std::string video_id);

  // Appends predictions produced by this sample.
  void push(const EarSample& sample, std::vector<BlinkPrediction>& out);
  // Throws InsufficientBlinks / InvalidCalibration if the stream never
  // calibrated.
  SessionReport finish(std::size_t records, std::size_t dropped);

  bool calibrated() const { return profile_.has_value(); }

 private:
  void calibrate_and_replay(std::vector<BlinkPrediction>& out);
  void feed(const EarSample& sample, std::vector<BlinkPrediction>& out);

  Model model_;
  PipelineConfig config_;
  std::string video_id_;
  std::vector<EarSample> buffer_;
  std::optional<CalibrationProfile> profile_;
  std::optional<BlinkSegmenter> segmenter_;
  std::int64_t boundary_frame_ = 0;
  std::size_t calibration_frames_ = 0;
  std::size_t segmented_frames_ = 0;
  std::vector<BlinkEvent> events_;
  SessionReport report_;
};

}  // namespace blink
