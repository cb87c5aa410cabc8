#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blink {

// Base of every error the engine reports. Each subclass maps to one failure
// mode callers are expected to tell apart (the CLI turns them into exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Eye { kRight, kLeft };

const char* to_string(Eye eye);

// Horizontal eye span collapsed below epsilon; a landmark failure, not a blink.
class DegenerateEye : public Error {
 public:
  explicit DegenerateEye(const std::string& what) : Error(what) {}
  DegenerateEye(Eye eye, const std::string& what)
      : Error(std::string(to_string(eye)) + " eye: " + what), eye_(eye), tagged_(true) {}

  bool has_eye() const { return tagged_; }
  Eye eye() const { return eye_; }

 private:
  Eye eye_ = Eye::kRight;
  bool tagged_ = false;
};

class InvalidCalibration : public Error {
 public:
  using Error::Error;
};

class InsufficientBlinks : public Error {
 public:
  InsufficientBlinks(std::size_t found, std::size_t required)
      : Error("calibration window holds " + std::to_string(found) +
              " complete blink cycles, need at least " + std::to_string(required)),
        found_(found),
        required_(required) {}

  std::size_t found() const { return found_; }
  std::size_t required() const { return required_; }

 private:
  std::size_t found_;
  std::size_t required_;
};

class StreamOrder : public Error {
 public:
  using Error::Error;
};

class IncompleteCycle : public Error {
 public:
  using Error::Error;
};

class DegenerateLabels : public Error {
 public:
  using Error::Error;
};

class InvalidFeature : public Error {
 public:
  InvalidFeature(std::size_t row, std::size_t column)
      : Error("non-finite feature at row " + std::to_string(row) + ", column " +
              std::to_string(column)),
        row_(row),
        column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

class InsufficientPerClass : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// Malformed input; line is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace blink
