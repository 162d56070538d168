#pragma once

#include <stdexcept>
#include <string>

namespace rwrs {

enum class ErrorCode {
  InvalidArgument,
  InvalidPmf,
  NotCentered,
  SupportDoesNotGenerateZ,
  ZeroVariance,
  UnknownStatistic,
  ZeroReps,
  CapExceeded,
  NonRationalModel,
  DegenerateInput,
  MissingComponents,
  ObservableNotCentered,
  Overflow,
  ConfigParse,
  UnknownExperiment,
  IoFailure,
  EmptyDirectory,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace rwrs
