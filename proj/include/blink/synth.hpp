#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "blink/ear.hpp"
#include "blink/json_format.hpp"

namespace blink {

// Parameters of a synthetic EAR trace. The plateau sits at open_ear; each
// blink drops to entry_ratio * open_ear, ramps linearly to closed_ear over
// the closing frames, climbs back over the reopening frames, then overshoots
// to overshoot_ratio * open_ear for one frame (the reopen crossing) and
// settle_ratio * open_ear for one more before returning to the plateau.
// Defaults follow typical blink physiology: 10-15 blinks per minute, each
// 100-400 ms long.
struct SynthProfile {
  double fps = 30.0;
  double duration_s = 300.0;
  double blink_rate_per_min = 12.0;
  double blink_ms_min = 100.0;
  double blink_ms_max = 400.0;
  double open_ear = 0.5;
  double closed_ear = 0.1;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;

  // Share of a blink's closed frames spent closing (start -> fully closed).
  double closing_fraction_min = 0.4;
  double closing_fraction_max = 0.6;
  // Blinks starting at or after drowsy_onset_s use the drowsy range instead:
  // quick closing, long reopening.
  std::optional<double> drowsy_onset_s;
  double drowsy_closing_fraction_min = 0.1;
  double drowsy_closing_fraction_max = 0.2;

  double entry_ratio = 0.7;
  double overshoot_ratio = 1.4;
  double settle_ratio = 1.2;
  // Blink starts are jittered uniformly by up to this share of the interval.
  double jitter = 0.25;

  void validate() const;  // InvalidConfig
  ordered_json to_json() const;
  static SynthProfile from_json(const ordered_json& j);
};

// Ground truth for one generated blink, in the segmenter's conventions:
// closed region [start_frame, reopen_frame), fully closed at min_frame.
struct SynthBlink {
  std::int64_t blink_index = 0;
  std::int64_t start_frame = 0;
  std::int64_t min_frame = 0;
  std::int64_t reopen_frame = 0;
  bool drowsy = false;
};

struct SynthTrace {
  std::vector<EarSample> samples;
  std::vector<SynthBlink> blinks;
};

// Deterministic per seed. Throws InvalidConfig when blinks cannot fit
// between their neighbours.
SynthTrace generate_trace(const SynthProfile& profile);

// 68-point frame with both eyes shaped to the sample's EAR.
LandmarkFrame synthesize_landmarks(const EarSample& sample);

void write_truth_csv(std::ostream& out, std::span<const SynthBlink> blinks);

}  // namespace blink
