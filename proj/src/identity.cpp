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

#include "medchain/identity.hpp"

#include <sodium.h>

#include <charconv>
#include <sstream>

#include "medchain/hash.hpp"
#include "sodium_init.hpp"

namespace medchain::identity {

namespace {

constexpr std::array<std::string_view, 9> kRoleNames = {
    "Hospital", "Doctor", "Clinic",  "Pharmacy",          "Patient",
    "Representative", "Orderer", "Peer", "LicensingAuthority",
};

}  // namespace

std::string_view to_string(Role role) noexcept { return kRoleNames[static_cast<std::size_t>(role)]; }

Role role_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i) {
    if (kRoleNames[i] == name) return static_cast<Role>(i);
  }
  fail(Errc::ParseError, "unknown role '" + std::string(name) + "'");
}

Role role_from_u8(std::uint8_t raw) {
  if (raw >= kRoleNames.size()) fail(Errc::ParseError, "role tag out of range");
  return static_cast<Role>(raw);
}

Identity Identity::derive(std::string id, Role role, std::uint64_t seed) {
  detail::ensure_sodium();
  codec::Writer w;
  w.str("medchain/identity/v1").str(id).u8(static_cast<std::uint8_t>(role)).u64(seed);
  const Digest key_seed = ledger::hash_content(w.data());

  Identity out;
  out.id_ = std::move(id);
  out.role_ = role;
  crypto_sign_seed_keypair(out.public_key_.data(), out.secret_key_.data(), key_seed.bytes.data());
  return out;
}

Signature Identity::sign(ByteView message) const {
  const Digest digest = ledger::hash_content(message);
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, digest.bytes.data(), digest.bytes.size(),
                       secret_key_.data());
  return sig;
}

bool verify(const PublicKey& key, ByteView message, const Signature& sig) {
  detail::ensure_sodium();
  const Digest digest = ledger::hash_content(message);
  return crypto_sign_verify_detached(sig.bytes.data(), digest.bytes.data(), digest.bytes.size(),
                                     key.data()) == 0;
}

const Identity& Registry::generate_identity(const std::string& id, Role role, std::uint64_t seed) {
  std::lock_guard lock(mutex_);
  if (actors_.contains(id)) fail(Errc::DuplicateId, id);
  auto [it, inserted] = actors_.emplace(id, Identity::derive(id, role, seed));
  return it->second;
}

const Identity* Registry::find(std::string_view id) const {
  std::lock_guard lock(mutex_);
  const auto it = actors_.find(id);
  return it == actors_.end() ? nullptr : &it->second;
}

std::size_t Registry::size() const {
  std::lock_guard lock(mutex_);
  return actors_.size();
}

Bytes Certificate::signed_fields() const {
  codec::Writer w;
  w.str("medchain/cert/v1").str(subject_id).u8(static_cast<std::uint8_t>(role)).fixed(public_key);
  return std::move(w).take();
}

void Certificate::encode(codec::Writer& w) const {
  w.str(subject_id)
      .u8(static_cast<std::uint8_t>(role))
      .fixed(public_key)
      .str(issuer_id)
      .fixed(issuer_signature.bytes);
}

Certificate Certificate::decode(codec::Reader& r) {
  Certificate c;
  c.subject_id = r.str();
  c.role = role_from_u8(r.u8());
  r.fixed(c.public_key);
  c.issuer_id = r.str();
  r.fixed(c.issuer_signature.bytes);
  return c;
}

Certificate issue_certificate(const Identity& authority, const Identity& subject) {
  if (authority.role() != Role::LicensingAuthority) {
    fail(Errc::NotAuthority, authority.id() + " is " + std::string(to_string(authority.role())));
  }
  Certificate c;
  c.subject_id = subject.id();
  c.role = subject.role();
  c.public_key = subject.public_key();
  c.issuer_id = authority.id();
  c.issuer_signature = authority.sign(c.signed_fields());
  return c;
}

bool verify_certificate(const PublicKey& issuer_key, const Certificate& cert) {
  return verify(issuer_key, cert.signed_fields(), cert.issuer_signature);
}

LicensingNode::LicensingNode(const Identity& authority) : authority_(authority) {
  if (authority.role() != Role::LicensingAuthority) {
    fail(Errc::NotAuthority, authority.id() + " cannot run a licensing node");
  }
}

Certificate LicensingNode::issue(const Identity& subject) {
  if (issued_.contains(subject.id())) fail(Errc::DuplicateId, subject.id());
  Certificate cert = issue_certificate(authority_, subject);
  issued_.emplace(cert.subject_id, cert);
  return cert;
}

void LicensingNode::revoke(std::string_view subject_id) { revoked_.emplace(subject_id); }

bool LicensingNode::is_revoked(std::string_view subject_id) const { return revoked_.contains(subject_id); }

bool LicensingNode::accepts(const Certificate& cert) const {
  const auto it = issued_.find(cert.subject_id);
  if (it == issued_.end() || it->second != cert) return false;
  // The stored copy was signed here, so byte equality with it already
  // implies the issuer signature verifies.
  return !is_revoked(cert.subject_id) && cert.issuer_id == authority_.id();
}

const Certificate* LicensingNode::find(std::string_view subject_id) const {
  const auto it = issued_.find(subject_id);
  return it == issued_.end() ? nullptr : &it->second;
}

std::vector<RosterEntry> parse_roster(std::string_view text) {
  std::vector<RosterEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string id, role, seed_text, extra;
    if (!(fields >> id >> role >> seed_text) || (fields >> extra)) {
      fail(Errc::ParseError, "roster line " + std::to_string(line_no) + ": expected '<id> <role> <seed>'");
    }
    RosterEntry e;
    e.id = id;
    e.role = role_from_string(role);
    const auto [ptr, ec] = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), e.seed);
    if (ec != std::errc{} || ptr != seed_text.data() + seed_text.size()) {
      fail(Errc::ParseError, "roster line " + std::to_string(line_no) + ": bad seed");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string format_roster(const std::vector<RosterEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += e.id;
    out += ' ';
    out += to_string(e.role);
    out += ' ';
    out += std::to_string(e.seed);
    out += '\n';
  }
  return out;
}

}  // namespace medchain::identity
