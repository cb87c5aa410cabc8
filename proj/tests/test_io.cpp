#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "blink/error.hpp"
#include "blink/io.hpp"
#include "blink/json_format.hpp"
#include "blink/synth.hpp"

namespace {

std::string frame_line(std::int64_t frame, double t_ms, double ear) {
  auto f = blink::synthesize_landmarks(blink::make_ear_sample(frame, t_ms, ear));
  return blink::landmark_to_jsonl(f);
}

std::size_t parse_error_line(const std::string& text, blink::InputFormat format) {
  std::istringstream in(text);
  try {
    (void)blink::read_samples(in, format);
  } catch (const blink::ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(blink::format_double(0.1) == "0.10000000000000001");
  CHECK(blink::format_double(2.0) == "2");
  CHECK(blink::format_double(-778.2) == "-778.20000000000005");
  CHECK(blink::format_double(std::nan("")) == "nan");
  blink::ordered_json j;
  j["b"] = 0.1;
  j["a"] = 1;
  j["c"] = {1.5, "x"};
  CHECK(blink::dump_json(j) == "{\"b\":0.10000000000000001,\"a\":1,\"c\":[1.5,\"x\"]}");
  CHECK(blink::parse_json(blink::dump_json(j), "doc")["b"].get<double>() == 0.1);
  CHECK_THROWS_AS(blink::parse_json("{", "doc"), blink::SchemaMismatch);
}

TEST_CASE("landmark lines round trip") {
  const auto line = frame_line(12, 400.0, 0.3);
  const auto f = blink::parse_landmark_line(line, 1);
  CHECK(f.frame_index == 12);
  CHECK(f.t_ms == 400.0);
  CHECK(blink::landmark_to_jsonl(f) == line);
  CHECK(blink::compute_frame_ear(f).ear == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("malformed landmark lines report their line number") {
  const std::string good = frame_line(0, 0.0, 0.3) + "\n" + frame_line(1, 33.3, 0.3) + "\n";
  SUBCASE("truncated line") {
    const auto bad = frame_line(2, 66.6, 0.3);
    CHECK(parse_error_line(good + bad.substr(0, bad.size() / 2) + "\n", blink::InputFormat::kJsonl) == 3);
  }
  SUBCASE("wrong point count") {
    auto j = blink::ordered_json::parse(frame_line(2, 66.6, 0.3));
    j["pts"].erase(j["pts"].size() - 1);
    CHECK(parse_error_line(good + j.dump() + "\n", blink::InputFormat::kJsonl) == 3);
    try {
      (void)blink::parse_landmark_line(j.dump(), 9);
    } catch (const blink::ParseError& e) {
      CHECK(std::string(e.what()).find("67") != std::string::npos);
      CHECK(std::string(e.what()).find("line 9") != std::string::npos);
    }
  }
  SUBCASE("non-numeric coordinate") {
    auto j = blink::ordered_json::parse(frame_line(2, 66.6, 0.3));
    j["pts"][40][1] = "abc";
    CHECK(parse_error_line(good + j.dump() + "\n", blink::InputFormat::kJsonl) == 3);
  }
  SUBCASE("missing key, negative frame, non-object") {
    CHECK_THROWS_AS(blink::parse_landmark_line("{\"frame\":1,\"t_ms\":0}", 1), blink::ParseError);
    auto j = blink::ordered_json::parse(frame_line(2, 66.6, 0.3));
    j["frame"] = -1;
    CHECK_THROWS_AS(blink::parse_landmark_line(j.dump(), 1), blink::ParseError);
    CHECK_THROWS_AS(blink::parse_landmark_line("[1,2]", 1), blink::ParseError);
  }
  SUBCASE("repeated frame index") {
    CHECK(parse_error_line(good + frame_line(1, 70.0, 0.3) + "\n", blink::InputFormat::kJsonl) == 3);
  }
  SUBCASE("blank lines are skipped but counted") {
    std::istringstream in("\n" + good + "\n");
    const auto s = blink::read_samples(in, blink::InputFormat::kJsonl);
    CHECK(s.samples.size() == 2);
    CHECK(s.records == 2);
  }
}

TEST_CASE("degenerate eyes are dropped and counted") {
  auto f = blink::synthesize_landmarks(blink::make_ear_sample(1, 33.3, 0.3));
  f.points[45] = f.points[42];  // left eye span collapses
  const std::string text =
      frame_line(0, 0, 0.3) + "\n" + blink::landmark_to_jsonl(f) + "\n" + frame_line(2, 66.6, 0.3) + "\n";
  std::istringstream in(text);
  const auto s = blink::read_samples(in, blink::InputFormat::kJsonl);
  CHECK(s.records == 3);
  CHECK(s.dropped == 1);
  CHECK(s.samples.size() == 2);
  CHECK(s.samples[1].frame_index == 2);
  REQUIRE(s.warnings.size() == 1);
  CHECK(s.warnings[0].find("left") != std::string::npos);
}

TEST_CASE("EAR CSV input") {
  SUBCASE("well formed with a missing value") {
    std::istringstream in("frame,t_ms,ear\n0,0,0.5\n1,33.3,\n2,66.6,nan\n3,100,0.25\n");
    const auto s = blink::read_samples(in, blink::InputFormat::kCsv);
    CHECK(s.records == 4);
    CHECK(s.dropped == 2);
    REQUIRE(s.samples.size() == 2);
    CHECK(s.samples[1].ear == 0.25);
    CHECK(s.samples[1].ear_left == 0.25);
  }
  SUBCASE("wrong header") {
    std::istringstream in("frame,time,ear\n0,0,0.5\n");
    CHECK_THROWS_AS(blink::read_samples(in, blink::InputFormat::kCsv), blink::ParseError);
  }
  SUBCASE("bad rows name their line") {
    CHECK(parse_error_line("frame,t_ms,ear\n0,0,0.5\n1,33,abc\n", blink::InputFormat::kCsv) == 3);
    CHECK(parse_error_line("frame,t_ms,ear\n0,0,0.5\n1,33\n", blink::InputFormat::kCsv) == 3);
    CHECK(parse_error_line("frame,t_ms,ear\n0,0,0.5\n1,-5,0.5\n", blink::InputFormat::kCsv) == 3);
    CHECK(parse_error_line("frame,t_ms,ear\n5,0,0.5\n4,33,0.5\n", blink::InputFormat::kCsv) == 3);
    CHECK(parse_error_line("frame,t_ms,ear\n0,50,0.5\n1,33,0.5\n", blink::InputFormat::kCsv) == 3);
    CHECK(parse_error_line("frame,t_ms,ear\n0,0,-0.5\n", blink::InputFormat::kCsv) == 2);
  }
  SUBCASE("written CSV reads back") {
    std::vector<blink::EarSample> s{blink::make_ear_sample(0, 0, 0.1), blink::make_ear_sample(3, 100, 0.7)};
    std::ostringstream out;
    blink::write_ear_csv(out, s);
    std::istringstream in(out.str());
    const auto back = blink::read_samples(in, blink::InputFormat::kCsv);
    REQUIRE(back.samples.size() == 2);
    CHECK(back.samples[0].ear == 0.1);
    CHECK(back.samples[1].frame_index == 3);
  }
}

TEST_CASE("streaming reader yields one sample at a time") {
  std::istringstream in("frame,t_ms,ear\n0,0,0.5\n1,33.3,0.4\n");
  blink::SampleReader reader(in, blink::InputFormat::kCsv);
  auto a = reader.next();
  REQUIRE(a);
  CHECK(a->ear == 0.5);
  CHECK(reader.records() == 1);
  auto b = reader.next();
  REQUIRE(b);
  CHECK_FALSE(reader.next());
  CHECK(reader.records() == 2);
}

TEST_CASE("feature CSV round trip") {
  std::vector<blink::FeatureVector> rows(3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].video_id = "drv" + std::to_string(i);
    rows[i].blink_index = static_cast<std::int64_t>(10 * i);
    for (std::size_t k = 0; k < 13; ++k) rows[i].values[k] = std::sqrt(static_cast<double>(i * 13 + k + 1)) - 2.5;
  }
  rows[0].label = 0;
  rows[1].label = 1;
  std::ostringstream out;
  blink::write_feature_csv(out, rows);
  CHECK(out.str().rfind(blink::feature_csv_header() + "\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = blink::read_feature_csv(in);
  CHECK(back == rows);
}

TEST_CASE("feature CSV schema drift") {
  std::string header = blink::feature_csv_header();
  SUBCASE("renamed column") {
    header.replace(header.find("f13"), 3, "f14");
    std::istringstream in(header + "\n");
    CHECK_THROWS_AS(blink::read_feature_csv(in), blink::SchemaMismatch);
  }
  SUBCASE("empty file") {
    std::istringstream in("");
    CHECK_THROWS_AS(blink::read_feature_csv(in), blink::SchemaMismatch);
  }
  SUBCASE("short row") {
    std::istringstream in(header + "\nv,0,1,2\n");
    CHECK_THROWS_AS(blink::read_feature_csv(in), blink::ParseError);
  }
  SUBCASE("bad label") {
    std::string row = "v,0";
    for (int i = 0; i < 13; ++i) row += ",1";
    std::istringstream in(header + "\n" + row + ",2\n");
    CHECK_THROWS_AS(blink::read_feature_csv(in), blink::ParseError);
  }
}

TEST_CASE("cycle CSV leaves the reopen column empty when absent") {
  blink::BlinkCycle c;
  c.video_id = "v";
  c.start_frame = 4;
  c.min_frame = 5;
  c.end_frame = 6;
  c.min_ear = 0.125;
  std::ostringstream out;
  blink::write_cycle_csv(out, std::vector<blink::BlinkCycle>{c});
  CHECK(out.str() == std::string(blink::kCycleCsvHeader) + "\nv,0,4,5,,6,0.125,0\n");
}

TEST_CASE("split_csv_line trims cells") {
  CHECK(blink::split_csv_line(" a, b ,c,") == std::vector<std::string>{"a", "b", "c", ""});
}
