#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "blink/error.hpp"
#include "blink/io.hpp"
#include "blink/pipeline.hpp"
#include "blink/synth.hpp"
#include "oracles.hpp"

using blink::PipelineConfig;
using blink::SynthProfile;

namespace {

SynthProfile profile_for(std::uint64_t seed, bool drowsy, double noise = 0.0) {
  SynthProfile p;
  p.seed = seed;
  p.noise_sd = noise;
  if (drowsy) p.drowsy_onset_s = 120.0;
  return p;
}

std::vector<blink::FeatureVector> corpus(int videos_per_class, std::uint64_t seed0) {
  std::vector<blink::FeatureVector> rows;
  for (int label = 0; label < 2; ++label) {
    for (int v = 0; v < videos_per_class; ++v) {
      const auto seed = seed0 + static_cast<std::uint64_t>(100 * label + v);
      const auto trace = blink::generate_trace(profile_for(seed, label == 1, 0.01));
      const auto id = std::string(label ? "drowsy" : "alert") + std::to_string(v);
      const auto r = blink::extract_session(trace.samples, {}, id, label, trace.samples.size(), 0);
      rows.insert(rows.end(), r.features.begin(), r.features.end());
    }
  }
  return rows;
}

std::string csv_bytes(const blink::SynthTrace& t) {
  std::ostringstream out;
  blink::write_ear_csv(out, t.samples);
  blink::write_truth_csv(out, t.blinks);
  return out.str();
}

}  // namespace

TEST_CASE("one minute of zero-noise blinks is recovered exactly") {
  SynthProfile p;
  p.duration_s = 60.0;
  const auto t = blink::generate_trace(p);
  REQUIRE(t.blinks.size() == 12);
  REQUIRE(t.samples.size() == 1800);

  blink::CalibrationConfig cal;
  cal.window_ms = 60000.0;
  const auto prof = blink::calibrate(t.samples, cal);
  CHECK(prof.ear_ref > p.closed_ear);
  CHECK(prof.ear_ref < p.open_ear);
  CHECK(p.open_ear - prof.ear_ref < prof.ear_ref - p.closed_ear);

  const auto cycles = blink::segment(t.samples, blink::SegmenterConfig::from_profile(prof));
  REQUIRE(cycles.size() == 12);
  CHECK_FALSE(cycles.back().complete);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(cycles[i].start_frame == t.blinks[i].start_frame);
    CHECK(cycles[i].min_frame == t.blinks[i].min_frame);
    CHECK(cycles[i].reopen_frame == t.blinks[i].reopen_frame);
  }
}

TEST_CASE("generator determinism and validation") {
  SynthProfile p = profile_for(5, true, 0.02);
  CHECK(csv_bytes(blink::generate_trace(p)) == csv_bytes(blink::generate_trace(p)));
  SynthProfile q = p;
  q.seed = 6;
  CHECK(csv_bytes(blink::generate_trace(p)) != csv_bytes(blink::generate_trace(q)));

  SynthProfile dense;
  dense.blink_rate_per_min = 300.0;
  CHECK_THROWS_AS(blink::generate_trace(dense), blink::InvalidConfig);
  SynthProfile inverted;
  inverted.closed_ear = 0.6;
  CHECK_THROWS_AS(blink::generate_trace(inverted), blink::InvalidConfig);
  SynthProfile bad_range;
  bad_range.blink_ms_min = 500.0;
  CHECK_THROWS_AS(blink::generate_trace(bad_range), blink::InvalidConfig);

  const auto back = SynthProfile::from_json(p.to_json());
  CHECK(blink::dump_json(back.to_json()) == blink::dump_json(p.to_json()));
}

TEST_CASE("drowsy onset switches the closing dynamics") {
  const auto t = blink::generate_trace(profile_for(3, true));
  for (const auto& b : t.blinks) {
    CHECK(b.drowsy == (b.start_frame >= 3600));
    const double closed = static_cast<double>(b.reopen_frame - b.start_frame);
    const double fraction = static_cast<double>(b.min_frame - b.start_frame) / closed;
    if (b.drowsy) CHECK(fraction <= 0.2 + 1.0 / closed);
    else CHECK(fraction >= 0.4 - 1.0 / closed);
  }
}

TEST_CASE("landmark frames carry the sample EAR") {
  const auto f = blink::synthesize_landmarks(blink::make_ear_sample(3, 100.0, 0.27));
  const auto s = blink::compute_frame_ear(f);
  CHECK(s.ear_left == doctest::Approx(0.27).epsilon(1e-12));
  CHECK(s.ear_right == doctest::Approx(0.27).epsilon(1e-12));
  CHECK(s.frame_index == 3);
}

TEST_CASE("extract keeps the post-calibration complete cycles") {
  const auto t = blink::generate_trace(profile_for(11, false));
  REQUIRE(t.blinks.size() == 60);
  const PipelineConfig cfg;
  const auto r = blink::extract_session(t.samples, cfg, "v", 0, t.samples.size(), 0);

  const std::size_t window = blink::calibration_window_size(t.samples, 120000.0);
  CHECK(window == 3600);
  const auto want = oracle::segment(t.samples, r.profile.th_low, r.profile.th_high, 5);
  std::size_t expected = 0;
  for (const auto& c : want)
    if (c.complete && c.start >= t.samples[window].frame_index) ++expected;
  CHECK(r.features.size() == expected);
  std::size_t truth_after = 0;
  for (const auto& b : t.blinks) truth_after += b.start_frame >= 3600 ? 1 : 0;
  CHECK(expected == truth_after - 1);  // the last blink never completes

  for (const auto& v : r.features) {
    CHECK(v.label == 0);
    CHECK(v.video_id == "v");
  }
  CHECK(r.diagnostics.balanced());
  CHECK(r.diagnostics.calibration_frames == 3600);
  CHECK(r.cycles.size() == expected + 1);
  CHECK_FALSE(r.cycles.back().complete);

  PipelineConfig with_tail;
  with_tail.include_incomplete = true;
  const auto rt = blink::extract_session(t.samples, with_tail, "v", 0, t.samples.size(), 0);
  CHECK(rt.features.size() == expected + 1);
}

TEST_CASE("extract errors map to the calibration failures") {
  std::vector<blink::EarSample> flat;
  for (int i = 0; i < 4000; ++i) flat.push_back(blink::make_ear_sample(i, i * 1000.0 / 30.0, 0.5));
  CHECK_THROWS_AS(blink::extract_session(flat, {}, "v", 0, flat.size(), 0), blink::InsufficientBlinks);
  flat.resize(100);
  CHECK_THROWS_AS(blink::extract_session(flat, {}, "v", 0, flat.size(), 0), blink::InvalidCalibration);
}

TEST_CASE("every input frame is accounted for") {
  const auto t = blink::generate_trace(profile_for(4, false, 0.01));
  std::ostringstream jsonl;
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    auto f = blink::synthesize_landmarks(t.samples[i]);
    if (i % 97 == 5) f.points[39] = f.points[36];  // right eye span collapses
    jsonl << blink::landmark_to_jsonl(f) << '\n';
  }
  std::istringstream in(jsonl.str());
  const auto stream = blink::read_samples(in, blink::InputFormat::kJsonl);
  CHECK(stream.dropped > 0);
  const auto r = blink::extract_session(stream.samples, {}, "v", 0, stream.records, stream.dropped);
  CHECK(r.diagnostics.records == t.samples.size());
  CHECK(r.diagnostics.balanced());
  CHECK(r.diagnostics.calibration_frames + r.diagnostics.segmented_frames + r.diagnostics.dropped_frames ==
        t.samples.size());
}

TEST_CASE("session summary counts") {
  blink::SessionReport rep;
  for (int label : {0, 0, 1, 0}) rep.predictions.push_back({0, 0, label, label ? 0.9 : 0.1, {}});
  blink::summarize(rep, 0);
  CHECK(rep.n_blinks == 4);
  CHECK(rep.fraction_non_drowsy == 0.75);
  CHECK(rep.fraction_drowsy == 0.25);
  CHECK_FALSE(rep.smoothed_fraction_drowsy.has_value());

  blink::SessionReport smooth;
  for (int label : {1, 1, 0, 1, 0, 0}) smooth.predictions.push_back({0, 0, label, 0.0, {}});
  blink::summarize(smooth, 3);
  // Windows: [1] [1,1] [1,1,0] [1,0,1] [0,1,0] [1,0,0]
  std::vector<int> got;
  for (const auto& p : smooth.predictions) got.push_back(*p.smoothed_label);
  CHECK(got == std::vector<int>{1, 1, 1, 1, 0, 0});
  CHECK(*smooth.smoothed_fraction_drowsy == doctest::Approx(4.0 / 6.0));

  blink::SessionReport even;
  for (int label : {1, 0}) even.predictions.push_back({0, 0, label, 0.0, {}});
  blink::summarize(even, 2);
  CHECK(*even.predictions[1].smoothed_label == 0);  // 1-1 tie goes to 0

  blink::SessionReport empty;
  blink::summarize(empty, 0);
  CHECK(empty.fraction_drowsy == 0.0);
  CHECK(empty.fraction_non_drowsy == 0.0);
}

TEST_CASE("pipeline config round trip and validation") {
  PipelineConfig c;
  c.folds = 7;
  c.feature_set = blink::FeatureSet::kSet1;
  c.algorithm = blink::Algorithm::kKnn;
  c.hyperparams.k = 3;
  c.smoothing_window = 5;
  const auto back = PipelineConfig::from_json(c.to_json());
  CHECK(blink::dump_json(back.to_json()) == blink::dump_json(c.to_json()));
  CHECK(PipelineConfig::from_json(blink::ordered_json::object()).folds == 5);
  CHECK_THROWS_AS(PipelineConfig::from_json(blink::ordered_json::parse("{\"folds\":1}")), blink::InvalidConfig);
  CHECK_THROWS_AS(PipelineConfig::from_json(blink::ordered_json::parse("{\"band_fraction\":1.5}")),
                  blink::InvalidConfig);
  CHECK_THROWS_AS(PipelineConfig::from_json(blink::ordered_json::parse("{\"algorithm\":\"xgboost\"}")),
                  blink::InvalidConfig);
  CHECK_THROWS_AS(PipelineConfig::from_json(blink::ordered_json::parse("[]")), blink::InvalidConfig);
}

TEST_CASE("monitor: predictions match extract-then-predict and flag drowsy sessions") {
  const auto rows = corpus(4, 1000);
  blink::Dataset data{rows, blink::FeatureSet::kAll};
  blink::Hyperparams hp;
  hp.n_trees = 30;
  const auto model = blink::train(data, blink::Algorithm::kRandomForest, hp, 1);

  const auto t = blink::generate_trace(profile_for(9001, true, 0.01));
  PipelineConfig cfg;
  blink::MonitorSession session(model, cfg, "live");
  std::vector<blink::BlinkPrediction> live;
  std::vector<std::int64_t> emitted_at;
  for (const auto& s : t.samples) {
    const std::size_t before = live.size();
    session.push(s, live);
    for (std::size_t i = before; i < live.size(); ++i) emitted_at.push_back(s.frame_index);
  }
  const auto report = session.finish(t.samples.size(), 0);
  CHECK(session.calibrated());

  const auto batch = blink::extract_session(t.samples, cfg, "live", std::nullopt, t.samples.size(), 0);
  REQUIRE(report.predictions.size() == batch.features.size());
  REQUIRE(live.size() == batch.features.size());
  for (std::size_t i = 0; i < batch.features.size(); ++i) {
    const auto p = blink::predict(model, batch.features[i]);
    CHECK(report.predictions[i].label == p.label);
    CHECK(report.predictions[i].score == p.score);
    CHECK(report.predictions[i].blink_index == batch.features[i].blink_index);
    // Emitted on the frame that starts the next blink, i.e. right after the cycle's last frame.
    CHECK(emitted_at[i] == batch.cycles[i].end_frame + 1);
  }
  CHECK(report.diagnostics.balanced());
  CHECK(report.fraction_drowsy + report.fraction_non_drowsy == doctest::Approx(1.0));
  CHECK(report.fraction_drowsy > 0.8);

  const auto alert = blink::generate_trace(profile_for(9002, false, 0.01));
  blink::MonitorSession calm(model, cfg, "calm");
  std::vector<blink::BlinkPrediction> ignored;
  for (const auto& s : alert.samples) calm.push(s, ignored);
  CHECK(calm.finish(alert.samples.size(), 0).fraction_drowsy < 0.2);
}

TEST_CASE("monitor rejects a model trained on another feature set") {
  std::vector<blink::FeatureVector> rows(10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].values[0] = static_cast<double>(i);
    rows[i].label = static_cast<int>(i % 2);
  }
  const auto model = blink::train(blink::Dataset{rows, blink::FeatureSet::kAll}, blink::Algorithm::kKnn, {}, 0);
  PipelineConfig cfg;
  cfg.feature_set = blink::FeatureSet::kSet1;
  CHECK_THROWS_AS(blink::MonitorSession(model, cfg, "x"), blink::SchemaMismatch);
}

TEST_CASE("monitor on a stream that never calibrates") {
  std::vector<blink::FeatureVector> rows(10);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].label = static_cast<int>(i % 2);
  const auto model = blink::train(blink::Dataset{rows, blink::FeatureSet::kAll}, blink::Algorithm::kKnn, {}, 0);
  blink::MonitorSession session(model, {}, "x");
  std::vector<blink::BlinkPrediction> out;
  // The failure surfaces as soon as the window fills.
  auto feed = [&] {
    for (int i = 0; i < 4000; ++i) session.push(blink::make_ear_sample(i, i * 1000.0 / 30.0, 0.5), out);
  };
  CHECK_THROWS_AS(feed(), blink::InsufficientBlinks);
  CHECK_FALSE(session.calibrated());
  blink::MonitorSession short_session(model, {}, "y");
  for (int i = 0; i < 10; ++i) short_session.push(blink::make_ear_sample(i, i * 33.0, 0.5), out);
  CHECK_THROWS_AS(short_session.finish(10, 0), blink::InvalidCalibration);
}
