#pragma once

#include <stdexcept>
#include <string>

namespace geodesy {

enum class ErrorCode {
  InvalidInput,
  ReconstructionFailure,
  Disconnected,
  ConvergenceFailure,
  NoPath,
  NonManifold,
};

/// Exception type used throughout the library. The CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Short snake_case name of a code, used in status columns and log lines.
inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid_input";
    case ErrorCode::ReconstructionFailure: return "reconstruction_failure";
    case ErrorCode::Disconnected: return "disconnected";
    case ErrorCode::ConvergenceFailure: return "convergence_failure";
    case ErrorCode::NoPath: return "no_path";
    case ErrorCode::NonManifold: return "non_manifold";
  }
  return "error";
}

[[noreturn]] inline void invalid_input(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

}  // namespace geodesy
