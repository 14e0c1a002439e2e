#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace raddist {

enum class ErrorKind {
  InvalidArgument,
  NonPositiveDepth,
  SingularProfile,
  UnknownModel,
  DegenerateLeadingCoefficient,
  ZeroPolynomial,
  UnsupportedModel,
  NoRealCandidate,
  BracketNotFound,
  DegenerateConfiguration,
  SingularConfiguration,
  BehindCamera,
  InsufficientData,
  ParseError,
  CountMismatch,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Domain error raised by every module of the library. The kind is stable and
/// meant for programmatic handling; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace raddist
