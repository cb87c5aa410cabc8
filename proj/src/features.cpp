#include "blink/features.hpp"

#include <algorithm>
#include <cmath>

#include "blink/error.hpp"

namespace blink {

RegionStats region_stats(std::span<const EarSample> region) {
  RegionStats st;
  if (region.empty()) return st;
  st.count = region.size();
  st.min = region.front().ear;
  st.max = region.front().ear;
  double sum = 0.0;
  for (const auto& s : region) {
    st.min = std::min(st.min, s.ear);
    st.max = std::max(st.max, s.ear);
    sum += s.ear;
  }
  st.mean = sum / static_cast<double>(region.size());
  return st;
}

FeatureVector extract_features(const BlinkCycle& cycle, const CalibrationProfile& profile) {
  if (!cycle.complete || !cycle.reopen_frame || cycle.open_samples.empty() ||
      cycle.closed_samples.empty()) {
    throw IncompleteCycle("blink " + std::to_string(cycle.blink_index) + " of '" +
                          cycle.video_id + "' has no following blink start");
  }
  if (profile.n_calibration_blinks == 0 || !std::isfinite(profile.ref_reopen_mean) ||
      !std::isfinite(profile.ref_open_mean) || !std::isfinite(profile.ref_close_mean)) {
    throw InvalidCalibration("profile carries no calibration-cycle baselines");
  }

  const RegionStats open = region_stats(cycle.open_samples);
  const RegionStats closed = region_stats(cycle.closed_samples);
  const std::int64_t reopen = *cycle.reopen_frame;

  // Frame counts are index spans, so samples lost to a bridged gap still
  // count toward the region they fell in.
  const auto open_frames = static_cast<double>(cycle.end_frame - reopen + 1);
  const auto closed_frames = static_cast<double>(reopen - cycle.start_frame);
  const auto closing = static_cast<double>(cycle.min_frame - cycle.start_frame);
  const auto reopening = static_cast<double>(reopen - cycle.min_frame);

  FeatureVector v;
  v.video_id = cycle.video_id;
  v.blink_index = cycle.blink_index;
  v.values = {
      open_frames,
      open.min,
      open.max,
      open.mean,
      open.mean - profile.ref_open_mean,
      closed_frames,
      closed.min,
      closed.max,
      closed.mean,
      closed.mean - profile.ref_close_mean,
      closing,
      reopening,
      profile.ref_reopen_mean - reopening,
  };
  return v;
}

FeatureSets split_sets(const FeatureVector& v) {
  FeatureSets s;
  std::copy_n(v.values.begin(), kSet1Count, s.set1.begin());
  std::copy_n(v.values.begin() + kSet1Count, kSet2Count, s.set2.begin());
  return s;
}

}  // namespace blink
