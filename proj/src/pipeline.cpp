#include "blink/pipeline.hpp"

#include <utility>

#include "blink/error.hpp"
#include "blink/io.hpp"

namespace blink {

void PipelineConfig::validate() const {
  if (!(calibration.band_fraction > 0.0 && calibration.band_fraction < 1.0)) {
    throw InvalidConfig("band_fraction must lie in (0, 1)");
  }
  if (!(calibration.window_ms > 0.0)) throw InvalidConfig("window_ms must be positive");
  if (calibration.min_calibration_blinks < 1) {
    throw InvalidConfig("min_calibration_blinks must be >= 1");
  }
  if (calibration.gap_tolerance < 0) throw InvalidConfig("gap_tolerance must be >= 0");
  if (folds < 2) throw InvalidConfig("folds must be >= 2");
  hyperparams.validate();
}

ordered_json PipelineConfig::to_json() const {
  ordered_json j;
  j["band_fraction"] = calibration.band_fraction;
  j["window_ms"] = calibration.window_ms;
  j["min_calibration_blinks"] = calibration.min_calibration_blinks;
  j["gap_tolerance"] = calibration.gap_tolerance;
  j["algorithm"] = to_string(algorithm);
  j["hyperparams"] = hyperparams.to_json();
  j["feature_set"] = to_string(feature_set);
  j["folds"] = folds;
  j["seed"] = seed;
  j["f1_mode"] = to_string(f1_mode);
  j["group_by_video"] = group_by_video;
  j["include_incomplete"] = include_incomplete;
  j["smoothing_window"] = smoothing_window;
  return j;
}

PipelineConfig PipelineConfig::from_json(const ordered_json& j) {
  if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
  PipelineConfig c;
  try {
    c.calibration.band_fraction = j.value("band_fraction", c.calibration.band_fraction);
    c.calibration.window_ms = j.value("window_ms", c.calibration.window_ms);
    c.calibration.min_calibration_blinks =
        j.value("min_calibration_blinks", c.calibration.min_calibration_blinks);
    c.calibration.gap_tolerance = j.value("gap_tolerance", c.calibration.gap_tolerance);
    if (j.contains("algorithm")) c.algorithm = algorithm_from_string(j["algorithm"].get<std::string>());
    if (j.contains("hyperparams")) c.hyperparams = Hyperparams::from_json(j["hyperparams"]);
    if (j.contains("feature_set")) {
      c.feature_set = feature_set_from_string(j["feature_set"].get<std::string>());
    }
    c.folds = j.value("folds", c.folds);
    c.seed = j.value("seed", c.seed);
    if (j.contains("f1_mode")) c.f1_mode = f1_mode_from_string(j["f1_mode"].get<std::string>());
    c.group_by_video = j.value("group_by_video", c.group_by_video);
    c.include_incomplete = j.value("include_incomplete", c.include_incomplete);
    c.smoothing_window = j.value("smoothing_window", c.smoothing_window);
  } catch (const ordered_json::exception& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  try {
    return from_json(ordered_json::parse(read_file(path)));
  } catch (const ordered_json::exception& e) {
    throw InvalidConfig("config '" + path + "': " + e.what());
  }
}

CvOptions PipelineConfig::cv_options() const {
  return CvOptions{folds, seed, f1_mode, group_by_video};
}

ordered_json Diagnostics::to_json() const {
  ordered_json j;
  j["records"] = records;
  j["calibration_frames"] = calibration_frames;
  j["segmented_frames"] = segmented_frames;
  j["dropped_frames"] = dropped_frames;
  j["frames_balanced"] = balanced();
  j["gap_resets"] = gap_resets;
  j["discarded_partials"] = discarded_partials;
  j["warnings"] = warnings;
  return j;
}

FeatureVector extract_features_allow_incomplete(const BlinkCycle& cycle,
                                                const CalibrationProfile& profile) {
  if (cycle.complete || !cycle.reopen_frame || cycle.open_samples.empty()) {
    return extract_features(cycle, profile);
  }
  BlinkCycle closed_out = cycle;
  closed_out.complete = true;
  return extract_features(closed_out, profile);
}

ExtractResult extract_session(std::span<const EarSample> samples, const PipelineConfig& config,
                              const std::string& video_id, std::optional<int> label,
                              std::size_t records, std::size_t dropped) {
  ExtractResult r;
  r.profile = calibrate(samples, config.calibration);
  const std::size_t window = calibration_window_size(samples, config.calibration.window_ms);

  r.diagnostics.records = records;
  r.diagnostics.dropped_frames = dropped;
  r.diagnostics.calibration_frames = window;
  r.diagnostics.segmented_frames = samples.size() - window;
  if (window == samples.size()) return r;

  const std::int64_t boundary = samples[window].frame_index;
  const SegmenterConfig seg = SegmenterConfig::from_profile(r.profile, config.calibration.gap_tolerance);
  SegmenterState state;
  state.video_id = video_id;
  std::vector<BlinkEvent> events;
  for (const auto& s : samples) {
    events.clear();
    step(state, s, seg, events);
    for (auto& e : events) {
      if (auto* c = std::get_if<CycleComplete>(&e); c && c->cycle.start_frame >= boundary) {
        r.cycles.push_back(std::move(c->cycle));
      }
    }
  }
  auto tail = finish(state);
  r.diagnostics.gap_resets = state.gap_resets;
  r.diagnostics.discarded_partials = state.discarded_partials;

  for (const auto& c : r.cycles) {
    auto v = extract_features(c, r.profile);
    v.label = label;
    r.features.push_back(std::move(v));
  }
  if (tail && tail->start_frame >= boundary) {
    if (config.include_incomplete && tail->reopen_frame && !tail->open_samples.empty()) {
      auto v = extract_features_allow_incomplete(*tail, r.profile);
      v.label = label;
      r.features.push_back(std::move(v));
    }
    r.cycles.push_back(std::move(*tail));
  }
  return r;
}

ordered_json prediction_to_json(const BlinkPrediction& p) {
  ordered_json j;
  j["blink_index"] = p.blink_index;
  j["frame"] = p.frame;
  j["label"] = p.label;
  j["score"] = p.score;
  if (p.smoothed_label) j["smoothed_label"] = *p.smoothed_label;
  return j;
}

void summarize(SessionReport& report, std::size_t smoothing_window) {
  report.n_blinks = report.predictions.size();
  std::size_t drowsy = 0;
  for (const auto& p : report.predictions) drowsy += static_cast<std::size_t>(p.label == 1);
  const double n = static_cast<double>(report.n_blinks);
  report.fraction_drowsy = report.n_blinks ? static_cast<double>(drowsy) / n : 0.0;
  report.fraction_non_drowsy = report.n_blinks ? static_cast<double>(report.n_blinks - drowsy) / n : 0.0;

  report.smoothed_fraction_drowsy.reset();
  if (smoothing_window == 0) {
    for (auto& p : report.predictions) p.smoothed_label.reset();
    return;
  }
  std::size_t smoothed_drowsy = 0;
  for (std::size_t i = 0; i < report.predictions.size(); ++i) {
    const std::size_t from = i + 1 >= smoothing_window ? i + 1 - smoothing_window : 0;
    std::size_t ones = 0;
    for (std::size_t k = from; k <= i; ++k) ones += static_cast<std::size_t>(report.predictions[k].label);
    const int vote = 2 * ones > i + 1 - from ? 1 : 0;
    report.predictions[i].smoothed_label = vote;
    smoothed_drowsy += static_cast<std::size_t>(vote);
  }
  report.smoothed_fraction_drowsy =
      report.n_blinks ? static_cast<double>(smoothed_drowsy) / n : 0.0;
}

ordered_json SessionReport::to_json() const {
  ordered_json j;
  j["video_id"] = video_id;
  j["n_blinks"] = n_blinks;
  j["fraction_non_drowsy"] = fraction_non_drowsy;
  j["fraction_drowsy"] = fraction_drowsy;
  if (smoothed_fraction_drowsy) j["smoothed_fraction_drowsy"] = *smoothed_fraction_drowsy;
  if (calibration) {
    j["calibration"] = ordered_json::parse(profile_to_json(*calibration));
  } else {
    j["calibration"] = nullptr;
  }
  j["diagnostics"] = diagnostics.to_json();
  j["predictions"] = ordered_json::array();
  for (const auto& p : predictions) j["predictions"].push_back(prediction_to_json(p));
  return j;
}

MonitorSession::MonitorSession(Model model, PipelineConfig config, std::string video_id)
    : model_(std::move(model)), config_(std::move(config)), video_id_(std::move(video_id)) {
  require_feature_set(model_, config_.feature_set);
  report_.video_id = video_id_;
}

void MonitorSession::push(const EarSample& sample, std::vector<BlinkPrediction>& out) {
  if (segmenter_) {
    ++segmented_frames_;
    feed(sample, out);
    return;
  }
  if (!buffer_.empty() && sample.t_ms - buffer_.front().t_ms >= config_.calibration.window_ms) {
    buffer_.push_back(sample);
    calibrate_and_replay(out);
    return;
  }
  buffer_.push_back(sample);
}

void MonitorSession::calibrate_and_replay(std::vector<BlinkPrediction>& out) {
  profile_ = calibrate(buffer_, config_.calibration);
  calibration_frames_ = calibration_window_size(buffer_, config_.calibration.window_ms);
  segmenter_.emplace(SegmenterConfig::from_profile(*profile_, config_.calibration.gap_tolerance),
                     video_id_);
  boundary_frame_ = calibration_frames_ < buffer_.size()
                        ? buffer_[calibration_frames_].frame_index
                        : buffer_.back().frame_index + 1;
  segmented_frames_ = buffer_.size() - calibration_frames_;
  for (const auto& s : buffer_) feed(s, out);
  buffer_.clear();
  buffer_.shrink_to_fit();
}

void MonitorSession::feed(const EarSample& sample, std::vector<BlinkPrediction>& out) {
  events_.clear();
  segmenter_->step(sample, events_);
  for (const auto& e : events_) {
    const auto* done = std::get_if<CycleComplete>(&e);
    if (!done || done->cycle.start_frame < boundary_frame_) continue;
    const auto v = extract_features(done->cycle, *profile_);
    const Prediction p = predict(model_, v);
    BlinkPrediction bp{done->cycle.blink_index, sample.frame_index, p.label, p.score, std::nullopt};
    report_.predictions.push_back(bp);
    out.push_back(bp);
  }
}

SessionReport MonitorSession::finish(std::size_t records, std::size_t dropped) {
  if (!segmenter_) {
    // Stream ended inside the window: calibrate what there is (this reports
    // the same error a batch run would) and replay it.
    std::vector<BlinkPrediction> ignored;
    calibrate_and_replay(ignored);
  }
  if (config_.include_incomplete) {
    auto tail = segmenter_->finish();
    if (tail && tail->start_frame >= boundary_frame_ && tail->reopen_frame &&
        !tail->open_samples.empty()) {
      const auto v = extract_features_allow_incomplete(*tail, *profile_);
      const Prediction p = predict(model_, v);
      report_.predictions.push_back(
          BlinkPrediction{tail->blink_index, tail->end_frame, p.label, p.score, std::nullopt});
    }
  }
  report_.calibration = profile_;
  report_.diagnostics.records = records;
  report_.diagnostics.dropped_frames = dropped;
  report_.diagnostics.calibration_frames = calibration_frames_;
  report_.diagnostics.segmented_frames = segmented_frames_;
  report_.diagnostics.gap_resets = segmenter_->state().gap_resets;
  report_.diagnostics.discarded_partials = segmenter_->state().discarded_partials;
  summarize(report_, config_.smoothing_window);
  return report_;
}

}  // namespace blink
