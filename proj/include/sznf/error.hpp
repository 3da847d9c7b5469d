#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sznf {

enum class ErrorCode {
  BadShape,
  NonFinite,
  NotHermitian,
  NotPsd,
  NotUnitary,
  NotIsometry,
  NotAContraction,
  SingularMatrix,
  SingularCore,
  SingularResolvent,
  SingularBracket,
  GammaNotStrict,
  RadiusTooLarge,
  PoleHit,
  SpectralRadiusTooClose,
  InvalidModel,
};

std::string_view to_string(ErrorCode code);

/// Numerical or contract failure raised by the library. The code identifies
/// which precondition was violated; the message carries the offending value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sznf
