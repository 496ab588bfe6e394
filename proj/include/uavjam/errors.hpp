#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace uavjam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario document. `line` is 0 when the location is a field
// rather than a text position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::string field = {})
      : Error(what), line_(line), field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

struct Violation {
  std::string field;
  std::string message;

  bool operator==(const Violation&) const = default;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error(summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& v) {
    std::string out = "invalid scenario:";
    for (const auto& x : v) out += " " + x.message + ";";
    return out;
  }

  std::vector<Violation> violations_;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class ZeroVectorError : public Error {
 public:
  using Error::Error;
};

class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

// Nonfinite objective or gradient inside an iterative solver.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, Eigen::MatrixX2d iterate)
      : Error(what), iterate_(std::move(iterate)) {}

  const Eigen::MatrixX2d& iterate() const { return iterate_; }

 private:
  Eigen::MatrixX2d iterate_;
};

}  // namespace uavjam
