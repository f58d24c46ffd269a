#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace metrosim {

// Stable error identifiers. The string form of each code is part of the
// CLI/JSON contract and must not change once published.
enum class ErrorCode {
  ParseError,
  InvalidTopology,
  SameEndpoint,
  NoPath,
  UnknownNode,
  OpticalBlocked,
  UnsupportedFormat,
  InfeasibleOsnr,
  UnknownChannel,
  AlreadyReleased,
  UnknownSip,
  CapacityExceeded,
  L2PoolExhausted,
  VniPoolExhausted,
  UnknownService,
  InvalidState,
  InvalidNsd,
  DuplicateSlice,
  PlacementInfeasible,
  UnknownSlice,
  InvalidParams,
};

const char* error_code_name(ErrorCode code);

class DomainError : public std::runtime_error {
 public:
  DomainError(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  DomainError(ErrorCode code, std::string message, nlohmann::json details)
      : std::runtime_error(std::move(message)),
        code_(code),
        details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

  // {"code": "...", "message": "...", "details": {...}?}
  nlohmann::json to_json() const;

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string message) {
  throw DomainError(code, std::move(message));
}

[[noreturn]] inline void fail(ErrorCode code, std::string message,
                              nlohmann::json details) {
  throw DomainError(code, std::move(message), std::move(details));
}

}  // namespace metrosim
