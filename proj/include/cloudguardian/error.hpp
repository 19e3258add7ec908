// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cloudguardian {

enum class ErrorCode {
  InvalidRecord,
  MalformedRecord,
  EmptyPayload,
  MalformedPayload,
  ZeroGasPrice,
  UnknownContract,
  GasLimitExceeded,
  ChainUnavailable,
  UnknownRow,
  UnknownSurrogate,
  StoreUnavailable,
  InvalidFilter,
  IoFailure,
  AuthFailure,
  MalformedVault,
  DuplicateChainId,
  UnknownChainId,
  NothingToAnchor,
  PayloadMismatch,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::EmptyPayload: return "EmptyPayload";
    case ErrorCode::MalformedPayload: return "MalformedPayload";
    case ErrorCode::ZeroGasPrice: return "ZeroGasPrice";
    case ErrorCode::UnknownContract: return "UnknownContract";
    case ErrorCode::GasLimitExceeded: return "GasLimitExceeded";
    case ErrorCode::ChainUnavailable: return "ChainUnavailable";
    case ErrorCode::UnknownRow: return "UnknownRow";
    case ErrorCode::UnknownSurrogate: return "UnknownSurrogate";
    case ErrorCode::StoreUnavailable: return "StoreUnavailable";
    case ErrorCode::InvalidFilter: return "InvalidFilter";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::MalformedVault: return "MalformedVault";
    case ErrorCode::DuplicateChainId: return "DuplicateChainId";
    case ErrorCode::UnknownChainId: return "UnknownChainId";
    case ErrorCode::NothingToAnchor: return "NothingToAnchor";
    case ErrorCode::PayloadMismatch: return "PayloadMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a stable code; the message is
/// free text for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cloudguardian
