#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace blink {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr std::size_t kLandmarkCount = 68;

// One video frame of the 68-point landmark scheme. points[i] holds the
// 1-based landmark i + 1, so the right eye is points[36..41] and the left
// eye points[42..47].
struct LandmarkFrame {
  std::int64_t frame_index = 0;
  double t_ms = 0.0;
  std::array<Point2, kLandmarkCount> points{};
};

struct EarSample {
  std::int64_t frame_index = 0;
  double t_ms = 0.0;
  double ear_right = 0.0;
  double ear_left = 0.0;
  double ear = 0.0;
};

inline constexpr double kDefaultEyeEpsilon = 1e-9;

// Eye aspect ratio of one eye given its six perimeter points p1..p6:
// (|p2 - p6| + |p3 - p5|) / (2 |p1 - p4|).
// Throws DegenerateEye when |p1 - p4| < epsilon.
double compute_eye_ear(std::span<const Point2, 6> eye, double epsilon = kDefaultEyeEpsilon);

// Right eye from landmarks 37..42, left eye from 43..48; ear is their mean.
// The left-eye span is |p43 - p46|. DegenerateEye carries the failing eye.
EarSample compute_frame_ear(const LandmarkFrame& frame, double epsilon = kDefaultEyeEpsilon);

// Sample built from a stream that only carries the mean EAR.
inline EarSample make_ear_sample(std::int64_t frame_index, double t_ms, double ear) {
  return EarSample{frame_index, t_ms, ear, ear, ear};
}

}  // namespace blink
