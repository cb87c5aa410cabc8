#include "blink/ear.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "blink/error.hpp"

namespace blink {

const char* to_string(Eye eye) { return eye == Eye::kRight ? "right" : "left"; }

namespace {

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

constexpr std::size_t kRightEyeFirst = 36;  // landmark 37
constexpr std::size_t kLeftEyeFirst = 42;   // landmark 43

double eye_from_frame(const LandmarkFrame& frame, std::size_t first, Eye eye, double epsilon) {
  auto pts = std::span<const Point2, 6>(frame.points.data() + first, 6);
  try {
    return compute_eye_ear(pts, epsilon);
  } catch (const DegenerateEye& e) {
    throw DegenerateEye(eye, "frame " + std::to_string(frame.frame_index) + ": " + e.what());
  }
}

}  // namespace

double compute_eye_ear(std::span<const Point2, 6> eye, double epsilon) {
  for (const auto& p : eye) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DegenerateEye("non-finite landmark coordinate");
    }
  }
  const double span = distance(eye[0], eye[3]);
  if (!(span >= epsilon)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "horizontal span %.3g px below epsilon %.3g", span, epsilon);
    throw DegenerateEye(buf);
  }
  return (distance(eye[1], eye[5]) + distance(eye[2], eye[4])) / (2.0 * span);
}

EarSample compute_frame_ear(const LandmarkFrame& frame, double epsilon) {
  EarSample s;
  s.frame_index = frame.frame_index;
  s.t_ms = frame.t_ms;
  s.ear_right = eye_from_frame(frame, kRightEyeFirst, Eye::kRight, epsilon);
  s.ear_left = eye_from_frame(frame, kLeftEyeFirst, Eye::kLeft, epsilon);
  s.ear = (s.ear_left + s.ear_right) / 2.0;
  return s;
}

}  // namespace blink
