#pragma once

#include <stdexcept>
#include <string>

namespace bgk {

enum class ErrorCode {
  Argument = 1,
  MorseViolation,
  Configuration,
  Domain,
  Numerical,
  ClusterSeparation,
  SpectrumHit,
  KappaDegenerate,
  CertificateFailure,
  GapFailure,
  Io,
  ConfigParse,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace bgk
