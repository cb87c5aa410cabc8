#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blink/ear.hpp"
#include "blink/features.hpp"
#include "blink/segmenter.hpp"

namespace blink {

enum class InputFormat { kJsonl, kCsv };

InputFormat input_format_from_string(const std::string& name);

// {"frame": int, "t_ms": float, "pts": [[x, y] x 68]}. ParseError names the
// line on malformed JSON, a wrong point count or non-numeric coordinates.
LandmarkFrame parse_landmark_line(std::string_view line, std::size_t line_no);
std::string landmark_to_jsonl(const LandmarkFrame& frame);

inline constexpr std::string_view kEarCsvHeader = "frame,t_ms,ear";

// Pulls EarSamples from landmark JSONL or EAR CSV one record at a time.
// Frames whose eyes are degenerate (or CSV rows with an empty / non-finite
// EAR) are skipped and counted as dropped; the segmenter sees them as gaps.
class SampleReader {
 public:
  SampleReader(std::istream& in, InputFormat format, double eye_epsilon = kDefaultEyeEpsilon);

  std::optional<EarSample> next();

  std::size_t records() const { return records_; }
  std::size_t dropped() const { return dropped_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::istream& in_;
  InputFormat format_;
  double eye_epsilon_;
  std::size_t line_no_ = 0;
  std::size_t records_ = 0;
  std::size_t dropped_ = 0;
  std::optional<std::int64_t> last_frame_;
  std::optional<double> last_t_;
  std::vector<std::string> warnings_;
};

// Reads an entire stream.
struct SampleStream {
  std::vector<EarSample> samples;
  std::size_t records = 0;
  std::size_t dropped = 0;
  std::vector<std::string> warnings;
};

SampleStream read_samples(std::istream& in, InputFormat format);

void write_ear_csv(std::ostream& out, std::span<const EarSample> samples);

inline constexpr std::string_view kCycleCsvHeader =
    "video_id,blink_index,start_frame,min_frame,reopen_frame,end_frame,min_ear,complete";

void write_cycle_csv(std::ostream& out, std::span<const BlinkCycle> cycles);

// video_id,blink_index,f1,...,f13,label with 17 significant digits.
std::string feature_csv_header();
void write_feature_csv(std::ostream& out, std::span<const FeatureVector> rows);
// Throws SchemaMismatch on a header that differs from feature_csv_header()
// and ParseError on a malformed row.
std::vector<FeatureVector> read_feature_csv(std::istream& in);

std::string read_file(const std::string& path);
// Writes path via a temporary sibling and rename.
void write_file_atomic(const std::string& path, const std::string& content);

// Splits on commas; no quoting (identifiers must not contain commas).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace blink
