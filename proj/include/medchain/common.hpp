// Copyright 2026 The medchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace medchain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Simulated time. One tick is one simulated millisecond.
using Tick = std::uint64_t;

inline constexpr Tick kTicksPerSecond = 1000;

enum class Errc {
  // identity
  DuplicateId,
  NotAuthority,
  BadCertificate,
  // ledger
  EmptyQueue,
  ChainGap,
  HashMismatch,
  NotValidated,
  // contracts
  UnauthorizedAuthor,
  UnknownPatient,
  DuplicateRecord,
  NotOwner,
  DelegationRevoked,
  UnknownRecord,
  UnknownGrant,
  NotPatient,
  UnknownActor,
  AccessDenied,
  BadSenderSignature,
  BadReceiverSignature,
  NotPharmacy,
  DuplicateQr,
  ExpiredLot,
  BadPrescriptionSignature,
  PrescriptionConsumed,
  OutOfStock,
  UnknownLot,
  DrugMismatch,
  LotNotHeld,
  BadCreatorSignature,
  // netsim
  BadConfig,
  UnknownClient,
  RejectedAtEndorsement,
  EndorsementMismatch,
  // bench / cli
  BadScenarioId,
  IntegrityFailure,
  UnsupportedFormat,
  ParseError,
};

std::string_view to_string(Errc code) noexcept;

/// Every operation in the library reports failure through this exception.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& detail = {});

/// 32-byte content hash.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  [[nodiscard]] std::string hex() const;
  [[nodiscard]] ByteView view() const noexcept { return bytes; }
  [[nodiscard]] bool is_zero() const noexcept;

  /// Strict lowercase hex, exactly 64 characters; throws ParseError otherwise.
  static Digest from_hex(std::string_view text);

  friend auto operator<=>(const Digest&, const Digest&) = default;
};

std::string to_hex(ByteView data);
/// Strict lowercase hex decoding; throws ParseError on any other input.
Bytes from_hex(std::string_view text);

inline ByteView as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace medchain
