// Copyright 2026 The adchain Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adchain {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kTaxonomy,
  kEmptyProfile,
  kUnsupportedKeySize,
  kCrypto,
  kWrongRecipient,
  kKeyUnwrapFailed,
  kAuthenticationFailed,
  kSignatureInvalid,
  kMissingField,
  kBrokenChain,
  kIndexOutOfRange,
  kUnknownCategory,
  kAccessDenied,
  kDigestMismatch,
  kStorageFull,
  kEmptyIndex,
  kInsufficientBalance,
  kUnknownAd,
  kDeadlineExceeded,
  kInvariantViolation,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when a policy tree denies a request. `hop` names the node that
// refused it ("miner", "ch", "cs").
class AccessDenied : public Error {
 public:
  AccessDenied(std::string hop, const std::string& what)
      : Error(ErrorCode::kAccessDenied, what), hop_(std::move(hop)) {}

  const std::string& hop() const noexcept { return hop_; }

 private:
  std::string hop_;
};

}  // namespace adchain
