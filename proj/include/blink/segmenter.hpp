#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "blink/ear.hpp"

namespace blink {

struct CalibrationProfile;

inline constexpr std::int64_t kDefaultGapTolerance = 5;

struct SegmenterConfig {
  double th_low = 0.0;
  double th_high = 0.0;
  // Largest run of missing frame indices bridged without resetting.
  std::int64_t gap_tolerance = kDefaultGapTolerance;

  static SegmenterConfig from_profile(const CalibrationProfile& profile,
                                      std::int64_t gap_tolerance = kDefaultGapTolerance);
};

// One blink cycle, from a downward th_low crossing to the frame before the
// next one. The closed region is [start_frame, reopen_frame), the open
// region [reopen_frame, end_frame].
struct BlinkCycle {
  std::string video_id;
  std::int64_t blink_index = 0;
  std::int64_t start_frame = 0;
  std::int64_t min_frame = 0;
  double min_ear = 0.0;
  std::optional<std::int64_t> reopen_frame;
  // For an incomplete cycle, the last frame seen.
  std::int64_t end_frame = 0;
  std::vector<EarSample> closed_samples;
  std::vector<EarSample> open_samples;
  bool complete = false;
};

enum class Phase { kOpen, kClosed };

struct BlinkStart {
  std::int64_t frame = 0;
  std::int64_t blink_index = 0;
};

struct Reopened {
  std::int64_t frame = 0;
  std::int64_t blink_index = 0;
};

struct CycleComplete {
  BlinkCycle cycle;
};

struct GapReset {
  std::int64_t frame = 0;           // first frame after the gap
  std::int64_t missing_frames = 0;  // length of the gap
  bool discarded_partial = false;   // a cycle in progress was dropped
};

using BlinkEvent = std::variant<BlinkStart, Reopened, CycleComplete, GapReset>;

struct MinRecord {
  std::int64_t frame = 0;
  double ear = 0.0;
};

struct SegmenterState {
  Phase phase = Phase::kOpen;
  std::optional<BlinkCycle> current_cycle;
  // Set exactly while phase == kClosed.
  std::optional<MinRecord> running_min;
  std::optional<std::int64_t> last_frame;
  std::int64_t next_blink_index = 0;
  std::int64_t gap_resets = 0;
  std::int64_t discarded_partials = 0;
  std::string video_id;
};

// Advance the hysteresis machine by one sample, appending any events.
// Transitions: OPEN -> CLOSED when ear < th_low, CLOSED -> OPEN when
// ear > th_high; values in between never change phase. A cycle is reported
// complete when the next one starts. Throws StreamOrder on a non-increasing
// frame index.
void step(SegmenterState& state, const EarSample& sample, const SegmenterConfig& config,
          std::vector<BlinkEvent>& events);

// Ends the stream. Returns the unfinished trailing cycle, if any, with
// complete = false.
std::optional<BlinkCycle> finish(SegmenterState& state);

// Batch form: the complete cycles that folding step() produces, followed by
// the incomplete trailing cycle when one exists.
std::vector<BlinkCycle> segment(std::span<const EarSample> samples, const SegmenterConfig& config,
                                const std::string& video_id = {});

class BlinkSegmenter {
 public:
  explicit BlinkSegmenter(SegmenterConfig config, std::string video_id = {});

  void step(const EarSample& sample, std::vector<BlinkEvent>& events);
  std::vector<BlinkEvent> step(const EarSample& sample);
  std::optional<BlinkCycle> finish();

  const SegmenterState& state() const { return state_; }
  const SegmenterConfig& config() const { return config_; }

 private:
  SegmenterConfig config_;
  SegmenterState state_;
};

}  // namespace blink
