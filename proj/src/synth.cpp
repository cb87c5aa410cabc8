#include "blink/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "blink/error.hpp"

namespace blink {

void SynthProfile::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidConfig(std::string("synthetic profile: ") + what);
  };
  require(fps > 0.0 && std::isfinite(fps), "fps must be positive");
  require(duration_s > 0.0 && std::isfinite(duration_s), "duration must be positive");
  require(blink_rate_per_min > 0.0, "blink rate must be positive");
  require(blink_ms_min > 0.0 && blink_ms_min <= blink_ms_max, "need 0 < blink_ms_min <= max");
  require(closed_ear >= 0.0 && open_ear > closed_ear, "need 0 <= closed_ear < open_ear");
  require(noise_sd >= 0.0, "noise_sd must be non-negative");
  require(closing_fraction_min > 0.0 && closing_fraction_min <= closing_fraction_max &&
              closing_fraction_max < 1.0,
          "closing fractions must satisfy 0 < min <= max < 1");
  require(drowsy_closing_fraction_min > 0.0 &&
              drowsy_closing_fraction_min <= drowsy_closing_fraction_max &&
              drowsy_closing_fraction_max < 1.0,
          "drowsy closing fractions must satisfy 0 < min <= max < 1");
  require(entry_ratio > closed_ear / open_ear && entry_ratio < 1.0,
          "entry_ratio must lie between closed_ear / open_ear and 1");
  require(overshoot_ratio > 1.0 && settle_ratio >= 1.0, "overshoot and settle ratios must be >= 1");
  require(jitter >= 0.0 && jitter < 0.5, "jitter must lie in [0, 0.5)");
}

ordered_json SynthProfile::to_json() const {
  ordered_json j;
  j["fps"] = fps;
  j["duration_s"] = duration_s;
  j["blink_rate_per_min"] = blink_rate_per_min;
  j["blink_ms_min"] = blink_ms_min;
  j["blink_ms_max"] = blink_ms_max;
  j["open_ear"] = open_ear;
  j["closed_ear"] = closed_ear;
  j["noise_sd"] = noise_sd;
  j["seed"] = seed;
  j["closing_fraction_min"] = closing_fraction_min;
  j["closing_fraction_max"] = closing_fraction_max;
  j["drowsy_onset_s"] = drowsy_onset_s ? ordered_json(*drowsy_onset_s) : ordered_json(nullptr);
  j["drowsy_closing_fraction_min"] = drowsy_closing_fraction_min;
  j["drowsy_closing_fraction_max"] = drowsy_closing_fraction_max;
  j["entry_ratio"] = entry_ratio;
  j["overshoot_ratio"] = overshoot_ratio;
  j["settle_ratio"] = settle_ratio;
  j["jitter"] = jitter;
  return j;
}

SynthProfile SynthProfile::from_json(const ordered_json& j) {
  SynthProfile p;
  try {
    p.fps = j.value("fps", p.fps);
    p.duration_s = j.value("duration_s", p.duration_s);
    p.blink_rate_per_min = j.value("blink_rate_per_min", p.blink_rate_per_min);
    p.blink_ms_min = j.value("blink_ms_min", p.blink_ms_min);
    p.blink_ms_max = j.value("blink_ms_max", p.blink_ms_max);
    p.open_ear = j.value("open_ear", p.open_ear);
    p.closed_ear = j.value("closed_ear", p.closed_ear);
    p.noise_sd = j.value("noise_sd", p.noise_sd);
    p.seed = j.value("seed", p.seed);
    p.closing_fraction_min = j.value("closing_fraction_min", p.closing_fraction_min);
    p.closing_fraction_max = j.value("closing_fraction_max", p.closing_fraction_max);
    if (j.contains("drowsy_onset_s") && !j["drowsy_onset_s"].is_null()) {
      p.drowsy_onset_s = j["drowsy_onset_s"].get<double>();
    }
    p.drowsy_closing_fraction_min =
        j.value("drowsy_closing_fraction_min", p.drowsy_closing_fraction_min);
    p.drowsy_closing_fraction_max =
        j.value("drowsy_closing_fraction_max", p.drowsy_closing_fraction_max);
    p.entry_ratio = j.value("entry_ratio", p.entry_ratio);
    p.overshoot_ratio = j.value("overshoot_ratio", p.overshoot_ratio);
    p.settle_ratio = j.value("settle_ratio", p.settle_ratio);
    p.jitter = j.value("jitter", p.jitter);
  } catch (const ordered_json::exception& e) {
    throw InvalidConfig(std::string("synthetic profile: ") + e.what());
  }
  return p;
}

SynthTrace generate_trace(const SynthProfile& p) {
  p.validate();
  const auto n_frames = static_cast<std::int64_t>(std::llround(p.duration_s * p.fps));
  const auto n_blinks = static_cast<std::int64_t>(std::llround(p.blink_rate_per_min * p.duration_s / 60.0));
  const double interval = p.fps * 60.0 / p.blink_rate_per_min;
  const auto frames_for = [&](double ms) {
    return std::max<std::int64_t>(2, std::llround(ms * p.fps / 1000.0));
  };
  const std::int64_t longest = frames_for(p.blink_ms_max);
  // Blink footprint: closed frames + overshoot + settle, then one plateau frame.
  if (interval * (1.0 - 2.0 * p.jitter) < static_cast<double>(longest + 3)) {
    throw InvalidConfig("synthetic profile: blinks of up to " + std::to_string(longest) +
                        " frames overlap at this blink rate");
  }

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const double open = p.open_ear;
  const double entry = p.entry_ratio * open;
  const double delta = entry - p.closed_ear;
  std::vector<double> ear(static_cast<std::size_t>(n_frames), open);

  SynthTrace trace;
  for (std::int64_t i = 0; i < n_blinks; ++i) {
    const double nominal = (static_cast<double>(i) + 0.5) * interval;
    const auto start =
        static_cast<std::int64_t>(std::llround(nominal + uniform(-p.jitter, p.jitter) * interval));
    const std::int64_t closed_frames = frames_for(uniform(p.blink_ms_min, p.blink_ms_max));
    const bool drowsy =
        p.drowsy_onset_s && static_cast<double>(start) / p.fps >= *p.drowsy_onset_s;
    const double fraction = drowsy ? uniform(p.drowsy_closing_fraction_min, p.drowsy_closing_fraction_max)
                                   : uniform(p.closing_fraction_min, p.closing_fraction_max);
    const std::int64_t closing = std::clamp<std::int64_t>(
        std::llround(fraction * static_cast<double>(closed_frames)), 1, closed_frames - 1);
    if (start + closed_frames + 1 >= n_frames) {
      throw InvalidConfig("synthetic profile: blink " + std::to_string(i) +
                          " runs past the end of the trace");
    }

    for (std::int64_t j = 0; j <= closing; ++j) {
      ear[static_cast<std::size_t>(start + j)] =
          entry - delta * static_cast<double>(j) / static_cast<double>(closing);
    }
    const std::int64_t opening = closed_frames - closing;
    for (std::int64_t j = 1; j < opening; ++j) {
      ear[static_cast<std::size_t>(start + closing + j)] =
          p.closed_ear + delta * static_cast<double>(j) / static_cast<double>(opening);
    }
    ear[static_cast<std::size_t>(start + closed_frames)] = p.overshoot_ratio * open;
    ear[static_cast<std::size_t>(start + closed_frames + 1)] = p.settle_ratio * open;
    trace.blinks.push_back(SynthBlink{i, start, start + closing, start + closed_frames, drowsy});
  }

  std::normal_distribution<double> noise(0.0, p.noise_sd > 0.0 ? p.noise_sd : 1.0);
  trace.samples.reserve(ear.size());
  for (std::int64_t f = 0; f < n_frames; ++f) {
    double v = ear[static_cast<std::size_t>(f)];
    if (p.noise_sd > 0.0) v = std::max(0.0, v + noise(rng));
    trace.samples.push_back(make_ear_sample(f, static_cast<double>(f) * 1000.0 / p.fps, v));
  }
  return trace;
}

LandmarkFrame synthesize_landmarks(const EarSample& sample) {
  LandmarkFrame f;
  f.frame_index = sample.frame_index;
  f.t_ms = sample.t_ms;
  constexpr double cx = 320.0;
  constexpr double cy = 240.0;
  // Face outline and remaining features on an ellipse; only eyes matter.
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / kLandmarkCount;
    f.points[i] = Point2{cx + 90.0 * std::cos(a), cy + 120.0 * std::sin(a)};
  }
  constexpr double width = 30.0;
  auto place_eye = [&](std::size_t first, double ex, double ratio) {
    const double h = ratio * width;
    const double ey = cy - 30.0;
    f.points[first + 0] = Point2{ex - width / 2, ey};
    f.points[first + 1] = Point2{ex - width / 6, ey - h / 2};
    f.points[first + 2] = Point2{ex + width / 6, ey - h / 2};
    f.points[first + 3] = Point2{ex + width / 2, ey};
    f.points[first + 4] = Point2{ex + width / 6, ey + h / 2};
    f.points[first + 5] = Point2{ex - width / 6, ey + h / 2};
  };
  place_eye(36, cx - 35.0, sample.ear_right);
  place_eye(42, cx + 35.0, sample.ear_left);
  return f;
}

void write_truth_csv(std::ostream& out, std::span<const SynthBlink> blinks) {
  out << "blink_index,start_frame,min_frame,reopen_frame,drowsy\n";
  for (const auto& b : blinks) {
    out << b.blink_index << ',' << b.start_frame << ',' << b.min_frame << ',' << b.reopen_frame
        << ',' << (b.drowsy ? 1 : 0) << '\n';
  }
}

}  // namespace blink
