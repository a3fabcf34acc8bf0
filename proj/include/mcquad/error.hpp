#pragma once

#include <stdexcept>
#include <string>

namespace mcquad {

// Coarse failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
  usage,      // bad configuration or argument values
  data,       // malformed or insufficient input data
  numerical,  // degenerate numerics (all weights clamped, flat design)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(ErrorKind::usage, w) {}
};

struct InvalidBandwidth : Error {
  explicit InvalidBandwidth(const std::string& w) : Error(ErrorKind::usage, w) {}
};

struct InvalidState : Error {
  explicit InvalidState(const std::string& w) : Error(ErrorKind::data, w) {}
};

struct InsufficientSample : Error {
  explicit InsufficientSample(const std::string& w) : Error(ErrorKind::data, w) {}
};

struct InsufficientBlocks : Error {
  explicit InsufficientBlocks(const std::string& w) : Error(ErrorKind::data, w) {}
};

struct EmptyNumerator : Error {
  explicit EmptyNumerator(const std::string& w) : Error(ErrorKind::data, w) {}
};

struct DataError : Error {
  explicit DataError(const std::string& w) : Error(ErrorKind::data, w) {}
};

struct UnsupportedChain : Error {
  explicit UnsupportedChain(const std::string& w) : Error(ErrorKind::usage, w) {}
};

struct DegenerateDesign : Error {
  explicit DegenerateDesign(const std::string& w)
      : Error(ErrorKind::numerical, w) {}
};

struct DegenerateDensity : Error {
  explicit DegenerateDensity(const std::string& w)
      : Error(ErrorKind::numerical, w) {}
};

}  // namespace mcquad
