#include "blink/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "blink/error.hpp"
#include "blink/json_format.hpp"

namespace blink {

InputFormat input_format_from_string(const std::string& name) {
  if (name == "jsonl") return InputFormat::kJsonl;
  if (name == "csv") return InputFormat::kCsv;
  throw InvalidConfig("unknown input format '" + name + "' (expected jsonl or csv)");
}

namespace {

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double number_at(const ordered_json& j, std::size_t line_no, const char* what) {
  if (!j.is_number()) throw ParseError(line_no, std::string(what) + " is not a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(line_no, std::string(what) + " is not finite");
  return v;
}

}  // namespace

LandmarkFrame parse_landmark_line(std::string_view line, std::size_t line_no) {
  ordered_json j;
  try {
    j = ordered_json::parse(line.begin(), line.end());
  } catch (const ordered_json::exception&) {
    throw ParseError(line_no, "malformed JSON");
  }
  if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");
  if (!j.contains("frame") || !j.contains("t_ms") || !j.contains("pts")) {
    throw ParseError(line_no, "missing one of frame, t_ms, pts");
  }
  LandmarkFrame f;
  const auto& frame = j["frame"];
  if (!frame.is_number_integer() || frame.get<std::int64_t>() < 0) {
    throw ParseError(line_no, "frame must be a non-negative integer");
  }
  f.frame_index = frame.get<std::int64_t>();
  f.t_ms = number_at(j["t_ms"], line_no, "t_ms");
  if (f.t_ms < 0.0) throw ParseError(line_no, "t_ms must be non-negative");
  const auto& pts = j["pts"];
  if (!pts.is_array() || pts.size() != kLandmarkCount) {
    throw ParseError(line_no, "pts must hold exactly 68 points, got " +
                                  std::to_string(pts.is_array() ? pts.size() : 0));
  }
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const auto& p = pts[i];
    if (!p.is_array() || p.size() != 2) throw ParseError(line_no, "point is not an [x, y] pair");
    f.points[i] = Point2{number_at(p[0], line_no, "x"), number_at(p[1], line_no, "y")};
  }
  return f;
}

std::string landmark_to_jsonl(const LandmarkFrame& frame) {
  std::string out = "{\"frame\":" + std::to_string(frame.frame_index) +
                    ",\"t_ms\":" + format_double(frame.t_ms) + ",\"pts\":[";
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    if (i) out += ',';
    out += '[' + format_double(frame.points[i].x) + ',' + format_double(frame.points[i].y) + ']';
  }
  out += "]}";
  return out;
}

SampleReader::SampleReader(std::istream& in, InputFormat format, double eye_epsilon)
    : in_(in), format_(format), eye_epsilon_(eye_epsilon) {}

std::optional<EarSample> SampleReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (is_blank(line)) continue;
    if (format_ == InputFormat::kCsv && line_no_ == 1) {
      if (trim(line) != kEarCsvHeader) {
        throw ParseError(line_no_, "expected header '" + std::string(kEarCsvHeader) + "'");
      }
      continue;
    }

    std::int64_t frame = 0;
    double t_ms = 0.0;
    std::optional<EarSample> sample;
    if (format_ == InputFormat::kJsonl) {
      const LandmarkFrame lf = parse_landmark_line(line, line_no_);
      frame = lf.frame_index;
      t_ms = lf.t_ms;
      try {
        sample = compute_frame_ear(lf, eye_epsilon_);
      } catch (const DegenerateEye& e) {
        warnings_.push_back(e.what());
      }
    } else {
      const auto cells = split_csv_line(line);
      if (cells.size() != 3) throw ParseError(line_no_, "expected 3 columns (frame,t_ms,ear)");
      const auto f = parse_int(cells[0]);
      const auto t = parse_double(cells[1]);
      if (!f || *f < 0) throw ParseError(line_no_, "frame must be a non-negative integer");
      if (!t || !std::isfinite(*t) || *t < 0.0) {
        throw ParseError(line_no_, "t_ms must be a non-negative number");
      }
      frame = *f;
      t_ms = *t;
      const auto ear_text = trim(cells[2]);
      const auto ear = parse_double(ear_text);
      if (!ear_text.empty() && ear_text != "nan" && !ear) {
        throw ParseError(line_no_, "ear is not a number");
      }
      if (ear && std::isfinite(*ear)) {
        if (*ear < 0.0) throw ParseError(line_no_, "ear must be non-negative");
        sample = make_ear_sample(frame, t_ms, *ear);
      } else {
        warnings_.push_back("frame " + std::to_string(frame) + ": missing EAR");
      }
    }

    if (last_frame_ && frame <= *last_frame_) {
      throw ParseError(line_no_, "frame index " + std::to_string(frame) +
                                     " does not increase (previous " +
                                     std::to_string(*last_frame_) + ")");
    }
    if (last_t_ && t_ms < *last_t_) throw ParseError(line_no_, "t_ms decreases");
    last_frame_ = frame;
    last_t_ = t_ms;
    ++records_;
    if (sample) return sample;
    ++dropped_;
  }
  return std::nullopt;
}

SampleStream read_samples(std::istream& in, InputFormat format) {
  SampleReader reader(in, format);
  SampleStream out;
  while (auto s = reader.next()) out.samples.push_back(*s);
  out.records = reader.records();
  out.dropped = reader.dropped();
  out.warnings = reader.warnings();
  return out;
}

void write_ear_csv(std::ostream& out, std::span<const EarSample> samples) {
  out << kEarCsvHeader << '\n';
  for (const auto& s : samples) {
    out << s.frame_index << ',' << format_double(s.t_ms) << ',' << format_double(s.ear) << '\n';
  }
}

void write_cycle_csv(std::ostream& out, std::span<const BlinkCycle> cycles) {
  out << kCycleCsvHeader << '\n';
  for (const auto& c : cycles) {
    out << c.video_id << ',' << c.blink_index << ',' << c.start_frame << ',' << c.min_frame << ',';
    if (c.reopen_frame) out << *c.reopen_frame;
    out << ',' << c.end_frame << ',' << format_double(c.min_ear) << ',' << (c.complete ? 1 : 0)
        << '\n';
  }
}

std::string feature_csv_header() {
  std::string h = "video_id,blink_index";
  for (std::size_t i = 1; i <= kFeatureCount; ++i) h += ",f" + std::to_string(i);
  h += ",label";
  return h;
}

void write_feature_csv(std::ostream& out, std::span<const FeatureVector> rows) {
  out << feature_csv_header() << '\n';
  for (const auto& r : rows) {
    out << r.video_id << ',' << r.blink_index;
    for (double v : r.values) out << ',' << format_double(v);
    out << ',';
    if (r.label) out << *r.label;
    out << '\n';
  }
}

std::vector<FeatureVector> read_feature_csv(std::istream& in) {
  std::vector<FeatureVector> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (!header_seen) {
      if (trim(line) != feature_csv_header()) {
        throw SchemaMismatch("feature CSV header differs from '" + feature_csv_header() + "'");
      }
      header_seen = true;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != kFeatureCount + 3) {
      throw ParseError(line_no, "expected " + std::to_string(kFeatureCount + 3) + " columns, got " +
                                    std::to_string(cells.size()));
    }
    FeatureVector v;
    v.video_id = std::string(trim(cells[0]));
    const auto idx = parse_int(cells[1]);
    if (!idx) throw ParseError(line_no, "blink_index is not an integer");
    v.blink_index = *idx;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      const auto x = parse_double(cells[i + 2]);
      if (!x) throw ParseError(line_no, "f" + std::to_string(i + 1) + " is not a number");
      v.values[i] = *x;
    }
    const auto label_text = trim(cells.back());
    if (!label_text.empty()) {
      const auto label = parse_int(label_text);
      if (!label || (*label != 0 && *label != 1)) throw ParseError(line_no, "label must be 0 or 1");
      v.label = static_cast<int>(*label);
    }
    rows.push_back(std::move(v));
  }
  if (!header_seen) throw SchemaMismatch("feature CSV is empty");
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaMismatch("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidConfig("cannot write '" + tmp + "'");
    out << content;
    if (!out.flush()) throw InvalidConfig("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InvalidConfig("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(trim(line.substr(start)));
      break;
    }
    cells.emplace_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

}  // namespace blink
