#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "blink/ear.hpp"
#include "blink/segmenter.hpp"

namespace blink {

struct CalibrationConfig {
  double band_fraction = 0.2;
  double window_ms = 120000.0;
  std::size_t min_calibration_blinks = 3;
  std::int64_t gap_tolerance = kDefaultGapTolerance;
};

// Per-driver baseline taken from the leading window, which is assumed to be
// non-drowsy. Immutable once built.
struct CalibrationProfile {
  double ear_ref = 0.0;
  double th_low = 0.0;
  double th_high = 0.0;
  double band_fraction = 0.2;
  double window_ms = 120000.0;
  // Means over the complete calibration cycles of the per-cycle open-region
  // mean EAR, closed-region mean EAR, and min-to-reopen frame count.
  double ref_open_mean = 0.0;
  double ref_close_mean = 0.0;
  double ref_reopen_mean = 0.0;
  std::size_t n_calibration_blinks = 0;

  bool operator==(const CalibrationProfile&) const = default;
};

inline constexpr int kProfileSchemaVersion = 1;

struct Thresholds {
  double th_low = 0.0;
  double th_high = 0.0;
};

// (ear_ref (1 - band), ear_ref (1 + band)). InvalidCalibration unless
// ear_ref > 0 and 0 < band < 1.
Thresholds thresholds(double ear_ref, double band_fraction);

// Number of leading samples inside the calibration window, i.e. with
// t_ms - samples[0].t_ms < window_ms.
std::size_t calibration_window_size(std::span<const EarSample> samples, double window_ms);

// Two passes over the leading window: the mean EAR fixes the thresholds, then
// segmenting the same window with them yields the cycle-level baselines.
// Throws InvalidCalibration if the stream does not cover the window or has no
// positive mean, InsufficientBlinks below min_calibration_blinks cycles.
CalibrationProfile calibrate(std::span<const EarSample> samples, const CalibrationConfig& config);

std::string profile_to_json(const CalibrationProfile& profile);
CalibrationProfile profile_from_json(const std::string& text);

}  // namespace blink
