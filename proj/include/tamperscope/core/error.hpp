#pragma once

#include <stdexcept>
#include <string>

namespace tamperscope {

enum class ErrorKind {
  Argument,
  UnsupportedFormat,
  EmptyGrid,
  TooSmall,
  UndefinedScore,
  NoTriplets,
  Parse,
  Io,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Argument: return "argument";
    case ErrorKind::UnsupportedFormat: return "unsupported-format";
    case ErrorKind::EmptyGrid: return "empty-grid";
    case ErrorKind::TooSmall: return "too-small";
    case ErrorKind::UndefinedScore: return "undefined-score";
    case ErrorKind::NoTriplets: return "no-triplets";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace tamperscope
