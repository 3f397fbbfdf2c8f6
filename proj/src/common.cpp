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

#include "medchain/common.hpp"

#include <algorithm>

namespace medchain {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::NotAuthority: return "NotAuthority";
    case Errc::BadCertificate: return "BadCertificate";
    case Errc::EmptyQueue: return "EmptyQueue";
    case Errc::ChainGap: return "ChainGap";
    case Errc::HashMismatch: return "HashMismatch";
    case Errc::NotValidated: return "NotValidated";
    case Errc::UnauthorizedAuthor: return "UnauthorizedAuthor";
    case Errc::UnknownPatient: return "UnknownPatient";
    case Errc::DuplicateRecord: return "DuplicateRecord";
    case Errc::NotOwner: return "NotOwner";
    case Errc::DelegationRevoked: return "DelegationRevoked";
    case Errc::UnknownRecord: return "UnknownRecord";
    case Errc::UnknownGrant: return "UnknownGrant";
    case Errc::NotPatient: return "NotPatient";
    case Errc::UnknownActor: return "UnknownActor";
    case Errc::AccessDenied: return "AccessDenied";
    case Errc::BadSenderSignature: return "BadSenderSignature";
    case Errc::BadReceiverSignature: return "BadReceiverSignature";
    case Errc::NotPharmacy: return "NotPharmacy";
    case Errc::DuplicateQr: return "DuplicateQr";
    case Errc::ExpiredLot: return "ExpiredLot";
    case Errc::BadPrescriptionSignature: return "BadPrescriptionSignature";
    case Errc::PrescriptionConsumed: return "PrescriptionConsumed";
    case Errc::OutOfStock: return "OutOfStock";
    case Errc::UnknownLot: return "UnknownLot";
    case Errc::DrugMismatch: return "DrugMismatch";
    case Errc::LotNotHeld: return "LotNotHeld";
    case Errc::BadCreatorSignature: return "BadCreatorSignature";
    case Errc::BadConfig: return "BadConfig";
    case Errc::UnknownClient: return "UnknownClient";
    case Errc::RejectedAtEndorsement: return "RejectedAtEndorsement";
    case Errc::EndorsementMismatch: return "EndorsementMismatch";
    case Errc::BadScenarioId: return "BadScenarioId";
    case Errc::IntegrityFailure: return "IntegrityFailure";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

std::string compose(Errc code, const std::string& detail) {
  std::string msg{to_string(code)};
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  return msg;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(compose(code, detail)), code_(code) {}

void fail(Errc code, const std::string& detail) { throw Error(code, detail); }

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.resize(data.size() * 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[2 * i] = kDigits[data[i] >> 4];
    out[2 * i + 1] = kDigits[data[i] & 0x0f];
  }
  return out;
}

Bytes from_hex(std::string_view text) {
  if (text.size() % 2 != 0) fail(Errc::ParseError, "odd-length hex");
  Bytes out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(text[2 * i]);
    const int lo = hex_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(Errc::ParseError, "bad hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string Digest::hex() const { return to_hex(bytes); }

bool Digest::is_zero() const noexcept {
  return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

Digest Digest::from_hex(std::string_view text) {
  if (text.size() != 64) fail(Errc::ParseError, "digest must be 64 hex characters");
  const Bytes raw = medchain::from_hex(text);
  Digest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

}  // namespace medchain
