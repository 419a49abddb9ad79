#ifndef WSETLAB_ERRORS_HPP
#define WSETLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wsetlab {

enum class ErrorCode {
  Overflow,
  EmptyDomain,
  DomainError,
  OutsideDomain,
  QuadratureFailure,
  TooLarge,
  UnsupportedCoupling,
  InvalidGauge,
  BracketFailure,
  BadConfig,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::UnsupportedCoupling: return "UnsupportedCoupling";
    case ErrorCode::InvalidGauge: return "InvalidGauge";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

/// Library-wide error type. `code()` carries the machine-readable cause;
/// what() is human-readable and includes the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace wsetlab

#endif
