#include "nonpsd/error.hpp"

namespace nonpsd {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "E_INVALID_INPUT";
    case ErrorCode::RankDeficient: return "E_RANK_DEFICIENT";
    case ErrorCode::Budget: return "E_BUDGET";
    case ErrorCode::Parse: return "E_PARSE";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Config: return "E_CONFIG";
  }
  return "E_UNKNOWN";
}

}  // namespace nonpsd
