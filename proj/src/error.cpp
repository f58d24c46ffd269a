#include "metrosim/error.hpp"

namespace metrosim {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::InvalidTopology: return "INVALID_TOPOLOGY";
    case ErrorCode::SameEndpoint: return "SAME_ENDPOINT";
    case ErrorCode::NoPath: return "NO_PATH";
    case ErrorCode::UnknownNode: return "UNKNOWN_NODE";
    case ErrorCode::OpticalBlocked: return "OPTICAL_BLOCKED";
    case ErrorCode::UnsupportedFormat: return "UNSUPPORTED_FORMAT";
    case ErrorCode::InfeasibleOsnr: return "INFEASIBLE_OSNR";
    case ErrorCode::UnknownChannel: return "UNKNOWN_CHANNEL";
    case ErrorCode::AlreadyReleased: return "ALREADY_RELEASED";
    case ErrorCode::UnknownSip: return "UNKNOWN_SIP";
    case ErrorCode::CapacityExceeded: return "CAPACITY_EXCEEDED";
    case ErrorCode::L2PoolExhausted: return "L2_POOL_EXHAUSTED";
    case ErrorCode::VniPoolExhausted: return "VNI_POOL_EXHAUSTED";
    case ErrorCode::UnknownService: return "UNKNOWN_SERVICE";
    case ErrorCode::InvalidState: return "INVALID_STATE";
    case ErrorCode::InvalidNsd: return "INVALID_NSD";
    case ErrorCode::DuplicateSlice: return "DUPLICATE_SLICE";
    case ErrorCode::PlacementInfeasible: return "PLACEMENT_INFEASIBLE";
    case ErrorCode::UnknownSlice: return "UNKNOWN_SLICE";
    case ErrorCode::InvalidParams: return "INVALID_PARAMS";
  }
  return "UNKNOWN";
}

nlohmann::json DomainError::to_json() const {
  nlohmann::json j{{"code", error_code_name(code_)}, {"message", what()}};
  if (!details_.is_null()) {
    j["details"] = details_;
  }
  return j;
}

}  // namespace metrosim
