#include "blink/segmenter.hpp"

#include <utility>

#include "blink/calibration.hpp"
#include "blink/error.hpp"

namespace blink {

SegmenterConfig SegmenterConfig::from_profile(const CalibrationProfile& profile,
                                              std::int64_t gap_tolerance) {
  return SegmenterConfig{profile.th_low, profile.th_high, gap_tolerance};
}

namespace {

void begin_cycle(SegmenterState& state, const EarSample& sample, std::vector<BlinkEvent>& events) {
  BlinkCycle cycle;
  cycle.video_id = state.video_id;
  cycle.blink_index = state.next_blink_index++;
  cycle.start_frame = sample.frame_index;
  cycle.min_frame = sample.frame_index;
  cycle.min_ear = sample.ear;
  cycle.end_frame = sample.frame_index;
  cycle.closed_samples.push_back(sample);
  state.current_cycle = std::move(cycle);
  state.phase = Phase::kClosed;
  state.running_min = MinRecord{sample.frame_index, sample.ear};
  events.push_back(BlinkStart{sample.frame_index, state.current_cycle->blink_index});
}

}  // namespace

void step(SegmenterState& state, const EarSample& sample, const SegmenterConfig& config,
          std::vector<BlinkEvent>& events) {
  if (state.last_frame && sample.frame_index <= *state.last_frame) {
    throw StreamOrder("frame " + std::to_string(sample.frame_index) + " follows frame " +
                      std::to_string(*state.last_frame));
  }
  if (state.last_frame) {
    const std::int64_t missing = sample.frame_index - *state.last_frame - 1;
    if (missing > config.gap_tolerance) {
      const bool partial = state.current_cycle.has_value();
      if (partial) ++state.discarded_partials;
      ++state.gap_resets;
      state.current_cycle.reset();
      state.running_min.reset();
      state.phase = Phase::kOpen;
      events.push_back(GapReset{sample.frame_index, missing, partial});
    }
  }
  state.last_frame = sample.frame_index;

  if (state.phase == Phase::kOpen) {
    if (sample.ear < config.th_low) {
      if (state.current_cycle) {
        BlinkCycle done = std::move(*state.current_cycle);
        done.end_frame = sample.frame_index - 1;
        done.complete = true;
        events.push_back(CycleComplete{std::move(done)});
      }
      begin_cycle(state, sample, events);
    } else if (state.current_cycle) {
      state.current_cycle->open_samples.push_back(sample);
      state.current_cycle->end_frame = sample.frame_index;
    }
    return;
  }

  BlinkCycle& cycle = *state.current_cycle;
  cycle.end_frame = sample.frame_index;
  if (sample.ear > config.th_high) {
    cycle.reopen_frame = sample.frame_index;
    cycle.open_samples.push_back(sample);
    state.phase = Phase::kOpen;
    state.running_min.reset();
    events.push_back(Reopened{sample.frame_index, cycle.blink_index});
    return;
  }
  cycle.closed_samples.push_back(sample);
  if (sample.ear < state.running_min->ear) {
    state.running_min = MinRecord{sample.frame_index, sample.ear};
    cycle.min_frame = sample.frame_index;
    cycle.min_ear = sample.ear;
  }
}

std::optional<BlinkCycle> finish(SegmenterState& state) {
  std::optional<BlinkCycle> tail = std::move(state.current_cycle);
  state.current_cycle.reset();
  state.running_min.reset();
  state.phase = Phase::kOpen;
  if (tail) tail->complete = false;
  return tail;
}

std::vector<BlinkCycle> segment(std::span<const EarSample> samples, const SegmenterConfig& config,
                                const std::string& video_id) {
  SegmenterState state;
  state.video_id = video_id;
  std::vector<BlinkCycle> cycles;
  std::vector<BlinkEvent> events;
  for (const auto& s : samples) {
    events.clear();
    step(state, s, config, events);
    for (auto& e : events) {
      if (auto* c = std::get_if<CycleComplete>(&e)) cycles.push_back(std::move(c->cycle));
    }
  }
  if (auto tail = finish(state)) cycles.push_back(std::move(*tail));
  return cycles;
}

BlinkSegmenter::BlinkSegmenter(SegmenterConfig config, std::string video_id) : config_(config) {
  state_.video_id = std::move(video_id);
}

void BlinkSegmenter::step(const EarSample& sample, std::vector<BlinkEvent>& events) {
  blink::step(state_, sample, config_, events);
}

std::vector<BlinkEvent> BlinkSegmenter::step(const EarSample& sample) {
  std::vector<BlinkEvent> events;
  blink::step(state_, sample, config_, events);
  return events;
}

std::optional<BlinkCycle> BlinkSegmenter::finish() { return blink::finish(state_); }

}  // namespace blink
