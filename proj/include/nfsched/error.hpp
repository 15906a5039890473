#pragma once

#include <stdexcept>
#include <string>

namespace nfsched {

enum class ErrorCode {
  EmptyInstance,
  MalformedPacket,
  ParseError,
  NegativeRate,
  NegativeInput,
  BracketOverflow,
  ZeroRate,
  NoCandidates,
  InconsistentTrace,
  InternalIdle,
  InternalDeadlineMiss,
  DimensionMismatch,
  InfeasibleInput,
  NotOptimal,
  TooLarge,
  ConfigInvalid,
};

const char* to_string(ErrorCode code);

/// True for codes that can only be raised by a bug in this library, never by bad input.
bool is_internal(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nfsched
