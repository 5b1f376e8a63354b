#pragma once

#include <stdexcept>
#include <string>

namespace pixht {

// Base of every error thrown by the library. `code()` is a short stable
// token used by the command-line tool for machine-readable error lines.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Numerical failure: degenerate geometry, rank deficiency, too many invalid pixels.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error("numeric", what) {}
  NumericError(std::string code, const std::string& what)
      : Error(std::move(code), what) {}
};

// Direction field undefined at a pixel (ray at the zenith or nadir).
class UndefinedDirectionError : public NumericError {
 public:
  explicit UndefinedDirectionError(const std::string& what)
      : NumericError("undefined-direction", what) {}
};

// Operation applied in the wrong state, e.g. normalizing twice.
class StateError : public Error {
 public:
  explicit StateError(const std::string& what) : Error("state", what) {}
};

// Malformed file contents.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

// Invalid or unrenderable scene description.
class SceneError : public Error {
 public:
  explicit SceneError(const std::string& what) : Error("scene", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace pixht
