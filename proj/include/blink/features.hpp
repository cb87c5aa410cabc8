#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "blink/calibration.hpp"
#include "blink/segmenter.hpp"

namespace blink {

inline constexpr std::size_t kFeatureCount = 13;
inline constexpr std::size_t kSet1Count = 10;
inline constexpr std::size_t kSet2Count = 3;

// The thirteen per-cycle features, stored 0-based (values[0] is feature 1).
//   1  open-region frame count          6  closed-region frame count
//   2  open-region min EAR              7  closed-region min EAR
//   3  open-region max EAR              8  closed-region max EAR
//   4  open-region mean EAR             9  closed-region mean EAR
//   5  (4) minus baseline open mean    10  (9) minus baseline closed mean
//  11  frames start -> fully closed
//  12  frames fully closed -> reopen
//  13  baseline reopen frames minus (12)
// Features 1-10 form blink_set1, 11-13 blink_set2.
struct FeatureVector {
  std::string video_id;
  std::int64_t blink_index = 0;
  std::array<double, kFeatureCount> values{};
  std::optional<int> label;  // 0 non-drowsy, 1 drowsy

  // 1-based access matching the feature numbering above.
  double f(std::size_t number) const { return values.at(number - 1); }

  bool operator==(const FeatureVector&) const = default;
};

struct RegionStats {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

// Min/max/mean EAR over a non-empty region.
RegionStats region_stats(std::span<const EarSample> region);

// Throws IncompleteCycle for an unfinished cycle and InvalidCalibration when
// the profile has no reopen baseline.
FeatureVector extract_features(const BlinkCycle& cycle, const CalibrationProfile& profile);

struct FeatureSets {
  std::array<double, kSet1Count> set1{};
  std::array<double, kSet2Count> set2{};
};

FeatureSets split_sets(const FeatureVector& v);

}  // namespace blink
