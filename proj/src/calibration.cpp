#include "blink/calibration.hpp"

#include <cmath>

#include "blink/error.hpp"
#include "blink/features.hpp"
#include "blink/json_format.hpp"

namespace blink {

Thresholds thresholds(double ear_ref, double band_fraction) {
  if (!(ear_ref > 0.0) || !std::isfinite(ear_ref)) {
    throw InvalidCalibration("EAR reference must be positive, got " + format_double(ear_ref));
  }
  if (!(band_fraction > 0.0 && band_fraction < 1.0)) {
    throw InvalidCalibration("band fraction must lie in (0, 1), got " +
                             format_double(band_fraction));
  }
  return Thresholds{ear_ref * (1.0 - band_fraction), ear_ref * (1.0 + band_fraction)};
}

std::size_t calibration_window_size(std::span<const EarSample> samples, double window_ms) {
  if (samples.empty()) return 0;
  const double t0 = samples.front().t_ms;
  std::size_t n = 0;
  while (n < samples.size() && samples[n].t_ms - t0 < window_ms) ++n;
  return n;
}

CalibrationProfile calibrate(std::span<const EarSample> samples, const CalibrationConfig& config) {
  if (!(config.window_ms > 0.0)) throw InvalidCalibration("calibration window must be positive");
  if (samples.size() < 2) throw InvalidCalibration("calibration needs at least two samples");

  // A stream of n samples at period dt covers (n - 1) dt + dt.
  const double span = samples.back().t_ms - samples.front().t_ms;
  const double period = span / static_cast<double>(samples.size() - 1);
  if (span + period < config.window_ms - 1e-6) {
    throw InvalidCalibration("stream covers " + format_double(span + period) +
                             " ms, calibration window is " + format_double(config.window_ms) +
                             " ms");
  }

  const auto window = samples.first(calibration_window_size(samples, config.window_ms));
  double sum = 0.0;
  for (const auto& s : window) sum += s.ear;
  const double ear_ref = sum / static_cast<double>(window.size());
  const Thresholds th = thresholds(ear_ref, config.band_fraction);

  CalibrationProfile profile;
  profile.ear_ref = ear_ref;
  profile.th_low = th.th_low;
  profile.th_high = th.th_high;
  profile.band_fraction = config.band_fraction;
  profile.window_ms = config.window_ms;

  const auto cycles =
      segment(window, SegmenterConfig{th.th_low, th.th_high, config.gap_tolerance});
  double open_sum = 0.0;
  double close_sum = 0.0;
  double reopen_sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : cycles) {
    if (!c.complete) continue;
    open_sum += region_stats(c.open_samples).mean;
    close_sum += region_stats(c.closed_samples).mean;
    reopen_sum += static_cast<double>(*c.reopen_frame - c.min_frame);
    ++n;
  }
  if (n < config.min_calibration_blinks) throw InsufficientBlinks(n, config.min_calibration_blinks);

  profile.ref_open_mean = open_sum / static_cast<double>(n);
  profile.ref_close_mean = close_sum / static_cast<double>(n);
  profile.ref_reopen_mean = reopen_sum / static_cast<double>(n);
  profile.n_calibration_blinks = n;
  return profile;
}

std::string profile_to_json(const CalibrationProfile& p) {
  ordered_json j;
  j["schema_version"] = kProfileSchemaVersion;
  j["ear_ref"] = p.ear_ref;
  j["th_low"] = p.th_low;
  j["th_high"] = p.th_high;
  j["band_fraction"] = p.band_fraction;
  j["window_ms"] = p.window_ms;
  j["ref_open_mean"] = p.ref_open_mean;
  j["ref_close_mean"] = p.ref_close_mean;
  j["ref_reopen_mean"] = p.ref_reopen_mean;
  j["n_calibration_blinks"] = p.n_calibration_blinks;
  return dump_json(j);
}

CalibrationProfile profile_from_json(const std::string& text) {
  const auto j = parse_json(text, "calibration profile");
  try {
    if (j.at("schema_version").get<int>() != kProfileSchemaVersion) {
      throw SchemaMismatch("unsupported calibration profile schema_version");
    }
    CalibrationProfile p;
    p.ear_ref = j.at("ear_ref").get<double>();
    p.th_low = j.at("th_low").get<double>();
    p.th_high = j.at("th_high").get<double>();
    p.band_fraction = j.at("band_fraction").get<double>();
    p.window_ms = j.at("window_ms").get<double>();
    p.ref_open_mean = j.at("ref_open_mean").get<double>();
    p.ref_close_mean = j.at("ref_close_mean").get<double>();
    p.ref_reopen_mean = j.at("ref_reopen_mean").get<double>();
    p.n_calibration_blinks = j.at("n_calibration_blinks").get<std::size_t>();
    return p;
  } catch (const ordered_json::exception& e) {
    throw SchemaMismatch(std::string("calibration profile: ") + e.what());
  }
}

}  // namespace blink
