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

// Healthcare chaincode. Every operation is a pure function from a world
// state snapshot plus inputs to a read/write set; nothing here mutates
// state. Commit ordering belongs to the ledger.
//
// World-state key layout:
//   hfa/<record hex>                               HealthFileAbstract
//   grant/r<record hex>/<grantee>/<grant id>       PermissionGrant on one record
//   grant/p<patient>/<grantee>/<grant id>          PermissionGrant on all of a patient's records
//   deleg/<patient>/<representative>               Delegation
//   share/<request hex>                            ShareRecord
//   drug/<qr code>                                 DrugLot
//   sale/<prescription hex>                        SaleRecord
// Actor ids inside keys are written as <length>:<id> so that no id can
// collide with another key.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "medchain/identity.hpp"
#include "medchain/ledger.hpp"

namespace medchain::contracts {

using identity::Certificate;
using ledger::RwSet;
using ledger::WorldState;

enum class Right : std::uint8_t { Read = 1, Write = 2, Update = 4, Delete = 8 };

/// Bitwise union of Right values.
using Rights = std::uint8_t;

constexpr Rights rights_of(std::initializer_list<Right> rs) {
  Rights out = 0;
  for (Right r : rs) out = static_cast<Rights>(out | static_cast<Rights>(r));
  return out;
}
constexpr bool has_right(Rights set, Right r) { return (set & static_cast<Rights>(r)) != 0; }

std::string_view to_string(Right r) noexcept;

/// Day number (days since 1970-01-01) that simulated tick 0 falls on.
inline constexpr std::uint32_t kDefaultEpochDay = 20000;
inline constexpr Tick kTicksPerDay = 86'400'000;

struct Context {
  const identity::LicensingNode& membership;
  std::uint32_t epoch_day = kDefaultEpochDay;

  [[nodiscard]] std::uint32_t today(Tick now) const noexcept {
    return epoch_day + static_cast<std::uint32_t>(now / kTicksPerDay);
  }
};

// ---------------------------------------------------------------------------
// Records stored in world state

struct HealthFileAbstract {
  Digest record_id;
  std::string patient_id;
  std::string author_id;
  Tick created_at = 0;

  friend bool operator==(const HealthFileAbstract&, const HealthFileAbstract&) = default;
};

struct PermissionGrant {
  std::string grant_key;
  std::string grantor_id;
  std::string grantee_id;
  std::string patient_id;
  std::optional<Digest> record_id;  // nullopt: every record of patient_id
  Rights rights = 0;
  std::optional<Tick> expires_at;   // valid while now < expires_at
  Tick created_at = 0;
  bool revoked = false;

  friend bool operator==(const PermissionGrant&, const PermissionGrant&) = default;
};

struct Delegation {
  std::string patient_id;
  std::string representative_id;
  Tick granted_at = 0;
  bool revoked = false;

  friend bool operator==(const Delegation&, const Delegation&) = default;
};

struct ShareEnvelope {
  Digest record_id;
  std::string sender_id;
  std::string receiver_id;
  Digest request_id;
  identity::Signature sender_signature;
  identity::Signature receiver_signature;
  Digest payload_digest;

  /// Bytes both parties sign: (record_id, request_id, payload_digest).
  [[nodiscard]] Bytes signed_message() const;

  friend bool operator==(const ShareEnvelope&, const ShareEnvelope&) = default;
};

ShareEnvelope make_share_envelope(const identity::Identity& sender, const identity::Identity& receiver,
                                  const Digest& record_id, const Digest& request_id,
                                  const Digest& payload_digest);

struct ShareRecord {
  ShareEnvelope envelope;
  Tick shared_at = 0;

  friend bool operator==(const ShareRecord&, const ShareRecord&) = default;
};

struct DrugLot {
  std::string qr_code;
  std::string name;
  std::uint32_t expiration = 0;  // days since epoch, usable through that day
  std::string tracking_number;
  std::string pharmacy_id;
  std::uint64_t quantity = 0;
  std::uint64_t registered_quantity = 0;
  Tick registered_at = 0;

  friend bool operator==(const DrugLot&, const DrugLot&) = default;
};

struct Prescription {
  Digest prescription_id;
  std::string patient_id;
  std::string prescriber_id;
  std::string drug_name;
  identity::Signature signed_hash;
  bool consumed = false;

  [[nodiscard]] Bytes signed_message() const;

  /// Issues a prescription with a deterministic id derived from `serial`.
  static Prescription issue(const identity::Identity& prescriber, std::string patient_id,
                            std::string drug_name, std::uint64_t serial);

  friend bool operator==(const Prescription&, const Prescription&) = default;
};

struct SaleRecord {
  std::string patient_id;
  Digest prescription_id;
  std::string qr_code;
  Tick sold_at = 0;
  std::string pharmacy_id;

  friend bool operator==(const SaleRecord&, const SaleRecord&) = default;
};

// ---------------------------------------------------------------------------
// Contract actions (transaction payloads)

struct RecordHealthAbstract {
  std::string patient_id;
  Digest record_id;  // digest of the off-chain record; the bytes never travel
  friend bool operator==(const RecordHealthAbstract&, const RecordHealthAbstract&) = default;
};

struct GrantPermission {
  std::string grantee_id;
  std::optional<Digest> record_id;  // nullopt: wildcard over patient_id's records
  std::string patient_id;           // only read for wildcard grants
  Rights rights = 0;
  std::optional<Tick> expires_at;
  friend bool operator==(const GrantPermission&, const GrantPermission&) = default;
};

struct RevokePermission {
  std::string grant_key;
  friend bool operator==(const RevokePermission&, const RevokePermission&) = default;
};

struct DelegateAuthority {
  std::string representative_id;
  friend bool operator==(const DelegateAuthority&, const DelegateAuthority&) = default;
};

struct RevokeDelegation {
  std::string representative_id;
  friend bool operator==(const RevokeDelegation&, const RevokeDelegation&) = default;
};

struct ShareHealthRecord {
  ShareEnvelope envelope;
  friend bool operator==(const ShareHealthRecord&, const ShareHealthRecord&) = default;
};

struct RegisterMedicineReceipt {
  std::string qr_code;
  std::string name;
  std::uint32_t expiration = 0;
  std::string tracking_number;
  std::uint64_t quantity = 0;
  friend bool operator==(const RegisterMedicineReceipt&, const RegisterMedicineReceipt&) = default;
};

struct SellMedicine {
  Prescription prescription;
  std::string qr_code;
  friend bool operator==(const SellMedicine&, const SellMedicine&) = default;
};

struct QueryDrug {
  std::string qr_code;
  friend bool operator==(const QueryDrug&, const QueryDrug&) = default;
};

using Action = std::variant<RecordHealthAbstract, GrantPermission, RevokePermission, DelegateAuthority,
                            RevokeDelegation, ShareHealthRecord, RegisterMedicineReceipt, SellMedicine,
                            QueryDrug>;

ledger::PayloadKind kind_of(const Action& action) noexcept;
Bytes encode_action(const Action& action);
Action decode_action(ledger::PayloadKind kind, ByteView payload);
/// Structured-text (JSON) rendering for fixtures and debugging.
std::string render_action(const Action& action);

Bytes encode_record(const DrugLot& lot);
Bytes encode_record(const SaleRecord& sale);
DrugLot decode_drug_lot(ByteView data);

// ---------------------------------------------------------------------------
// Key helpers

std::string abstract_key(const Digest& record_id);
std::string delegation_key(std::string_view patient_id, std::string_view representative_id);
std::string share_key(const Digest& request_id);
std::string drug_key(std::string_view qr_code);
std::string sale_key(const Digest& prescription_id);
inline constexpr std::string_view kGrantPrefix = "grant/";
inline constexpr std::string_view kDrugPrefix = "drug/";
inline constexpr std::string_view kSalePrefix = "sale/";
inline constexpr std::string_view kAbstractPrefix = "hfa/";
inline constexpr std::string_view kSharePrefix = "share/";

// ---------------------------------------------------------------------------
// Operations

RwSet record_health_abstract(const Context& ctx, const WorldState& state, const Certificate& author,
                             std::string_view patient_id, ByteView record_bytes, Tick now);
RwSet record_health_abstract(const Context& ctx, const WorldState& state, const Certificate& author,
                             const RecordHealthAbstract& action, Tick now);

RwSet grant_permission(const Context& ctx, const WorldState& state, const Certificate& grantor,
                       const GrantPermission& grant, Tick now);
RwSet revoke_permission(const Context& ctx, const WorldState& state, const Certificate& grantor,
                        std::string_view grant_key, Tick now);
RwSet delegate_authority(const Context& ctx, const WorldState& state, const Certificate& patient,
                         std::string_view representative_id, Tick now);
RwSet revoke_delegation(const Context& ctx, const WorldState& state, const Certificate& patient,
                        std::string_view representative_id, Tick now);

enum class DenyReason : std::uint8_t { None, NoGrant, Expired, Revoked };
std::string_view to_string(DenyReason r) noexcept;

struct AccessDecision {
  bool allowed = false;
  DenyReason reason = DenyReason::None;

  static AccessDecision allow() { return {true, DenyReason::None}; }
  static AccessDecision deny(DenyReason r) { return {false, r}; }
  friend bool operator==(const AccessDecision&, const AccessDecision&) = default;
};

/// UnknownRecord if no abstract exists for record_id.
AccessDecision check_access(const Context& ctx, const WorldState& state, const Certificate& requester,
                            const Digest& record_id, Right action, Tick now);

RwSet share_health_record(const Context& ctx, const WorldState& state, const Certificate& submitter,
                          const ShareEnvelope& envelope, Tick now);
RwSet register_medicine_receipt(const Context& ctx, const WorldState& state, const Certificate& pharmacy,
                                const RegisterMedicineReceipt& lot, Tick now);
RwSet sell_medicine(const Context& ctx, const WorldState& state, const Certificate& pharmacy,
                    const Prescription& prescription, std::string_view qr_code, Tick now);

/// UnknownLot if absent.
DrugLot query_drug(const WorldState& state, std::string_view qr_code);

/// Runs the action for its creator; BadCertificate if the licensing node
/// does not accept the creator certificate.
RwSet execute(const Context& ctx, const WorldState& state, const Certificate& creator, const Action& action,
              Tick now);

// ---------------------------------------------------------------------------
// Read helpers

std::optional<HealthFileAbstract> find_abstract(const WorldState& state, const Digest& record_id);
std::optional<PermissionGrant> find_grant(const WorldState& state, std::string_view grant_key);
std::optional<Delegation> find_delegation(const WorldState& state, std::string_view patient_id,
                                          std::string_view representative_id);
std::optional<SaleRecord> find_sale(const WorldState& state, const Digest& prescription_id);
std::optional<ShareRecord> find_share(const WorldState& state, const Digest& request_id);
std::vector<DrugLot> all_lots(const WorldState& state);
std::vector<SaleRecord> all_sales(const WorldState& state);
std::vector<PermissionGrant> all_grants(const WorldState& state);

/// Key of the grant the write-set of a successful grant_permission creates.
std::string created_grant_key(const RwSet& rwset);

// ---------------------------------------------------------------------------
// Controller units

struct DrugSupplyLine {
  std::string drug_name;
  std::uint64_t lots = 0;
  std::uint64_t registered = 0;
  std::uint64_t sold = 0;
  std::uint64_t available = 0;
  std::uint64_t lots_near_expiry = 0;
  std::uint64_t lots_expired = 0;
  bool shortage = false;

  friend bool operator==(const DrugSupplyLine&, const DrugSupplyLine&) = default;
};

struct SupplyReport {
  std::vector<DrugSupplyLine> drugs;  // sorted by name

  friend bool operator==(const SupplyReport&, const SupplyReport&) = default;
};

/// Medicine supply control unit. A drug is short when its available
/// quantity across lots is below shortage_threshold.
SupplyReport c2_supply_report(const WorldState& state, std::uint64_t shortage_threshold, std::uint32_t today,
                              std::uint32_t near_expiry_days = 30);

struct HealthFileAudit {
  std::uint64_t abstracts = 0;
  std::uint64_t grants_active = 0;
  std::uint64_t grants_revoked = 0;
  std::uint64_t grants_expired = 0;
  std::uint64_t shares = 0;
  std::uint64_t shares_verified = 0;
  std::uint64_t violations = 0;

  friend bool operator==(const HealthFileAudit&, const HealthFileAudit&) = default;
};

/// Health file control unit.
HealthFileAudit c1_audit_health_files(const Context& ctx, const WorldState& state, Tick now);

}  // namespace medchain::contracts
