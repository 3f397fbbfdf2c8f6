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

// Actors, deterministic key material, and the licensing nodes that issue
// role-bearing certificates. Signatures are Ed25519 over the SHA-256 digest
// of the message.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "medchain/codec.hpp"
#include "medchain/common.hpp"

namespace medchain::identity {

enum class Role : std::uint8_t {
  Hospital,
  Doctor,
  Clinic,
  Pharmacy,
  Patient,
  Representative,
  Orderer,
  Peer,
  LicensingAuthority,
};

std::string_view to_string(Role role) noexcept;
/// Accepts the names produced by to_string, case-sensitively.
Role role_from_string(std::string_view name);
Role role_from_u8(std::uint8_t raw);

using PublicKey = std::array<std::uint8_t, 32>;

struct Signature {
  std::array<std::uint8_t, 64> bytes{};

  friend bool operator==(const Signature&, const Signature&) = default;
};

class Identity {
 public:
  /// Pure derivation: identical (id, role, seed) always give identical keys.
  static Identity derive(std::string id, Role role, std::uint64_t seed);

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] Role role() const noexcept { return role_; }
  [[nodiscard]] const PublicKey& public_key() const noexcept { return public_key_; }

  [[nodiscard]] Signature sign(ByteView message) const;

 private:
  Identity() = default;

  std::string id_;
  Role role_ = Role::Patient;
  PublicKey public_key_{};
  std::array<std::uint8_t, 64> secret_key_{};
};

inline Signature sign(const Identity& identity, ByteView message) { return identity.sign(message); }
bool verify(const PublicKey& key, ByteView message, const Signature& sig);

/// Network-wide actor registry. Registration is serialized; references
/// returned by generate_identity stay valid for the registry's lifetime.
class Registry {
 public:
  const Identity& generate_identity(const std::string& id, Role role, std::uint64_t seed);
  [[nodiscard]] const Identity* find(std::string_view id) const;
  [[nodiscard]] std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, Identity, std::less<>> actors_;
};

struct Certificate {
  std::string subject_id;
  Role role = Role::Patient;
  PublicKey public_key{};
  std::string issuer_id;
  Signature issuer_signature;

  /// Bytes covered by the issuer signature: (subject_id, role, public key).
  [[nodiscard]] Bytes signed_fields() const;

  void encode(codec::Writer& w) const;
  static Certificate decode(codec::Reader& r);

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// NotAuthority unless the issuer carries the LicensingAuthority role.
Certificate issue_certificate(const Identity& authority, const Identity& subject);
bool verify_certificate(const PublicKey& issuer_key, const Certificate& cert);

/// Credentialing service. Issues certificates and keeps the revocation set
/// consulted at endorsement and validation time. Mutate only while no
/// channel executor is running; reads are safe from any thread.
class LicensingNode {
 public:
  explicit LicensingNode(const Identity& authority);

  Certificate issue(const Identity& subject);
  void revoke(std::string_view subject_id);

  [[nodiscard]] bool is_revoked(std::string_view subject_id) const;
  /// True iff the certificate was issued here, is byte-identical to the issued
  /// copy, verifies under this node's key, and is not revoked.
  [[nodiscard]] bool accepts(const Certificate& cert) const;
  [[nodiscard]] const Certificate* find(std::string_view subject_id) const;
  [[nodiscard]] bool is_registered(std::string_view subject_id) const { return find(subject_id) != nullptr; }

  [[nodiscard]] const std::string& id() const noexcept { return authority_.id(); }
  [[nodiscard]] const PublicKey& public_key() const noexcept { return authority_.public_key(); }

 private:
  Identity authority_;
  std::map<std::string, Certificate, std::less<>> issued_;
  std::set<std::string, std::less<>> revoked_;
};

struct RosterEntry {
  std::string id;
  Role role = Role::Patient;
  std::uint64_t seed = 0;

  friend bool operator==(const RosterEntry&, const RosterEntry&) = default;
};

/// Line-oriented roster: `<id> <Role> <seed>` per line; blank lines and
/// lines starting with '#' are ignored.
std::vector<RosterEntry> parse_roster(std::string_view text);
std::string format_roster(const std::vector<RosterEntry>& entries);

}  // namespace medchain::identity
