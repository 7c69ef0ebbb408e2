#pragma once

#include <stdexcept>
#include <string>

namespace prmforge {

enum class ErrorKind {
  Precondition,   // caller violated an operation's contract
  Config,         // invalid configuration value
  Backend,        // transport failure after retries
  Protocol,       // remote replied with a malformed body
  Parse,          // structured text could not be parsed
  Inconsistency,  // parsed output contradicts itself
  Dataset,        // keyed inputs do not line up
  Io,             // file system failure
  EmptyTrace,     // input contains no usable steps
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Config: return "config";
    case ErrorKind::Backend: return "backend";
    case ErrorKind::Protocol: return "protocol";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Inconsistency: return "inconsistency";
    case ErrorKind::Dataset: return "dataset";
    case ErrorKind::Io: return "io";
    case ErrorKind::EmptyTrace: return "empty-trace";
  }
  return "unknown";
}

}  // namespace prmforge
