#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nonpsd {

enum class ErrorCode {
  InvalidInput,
  RankDeficient,
  Budget,
  Parse,
  Io,
  Config,
};

/// Stable machine-readable token, e.g. "E_INVALID_INPUT".
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nonpsd
