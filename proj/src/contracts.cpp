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

#include "medchain/contracts.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "medchain/codec.hpp"
#include "medchain/hash.hpp"

namespace medchain::contracts {

using identity::Role;
using ledger::ReadEntry;
using ledger::WriteEntry;

std::string_view to_string(Right r) noexcept {
  switch (r) {
    case Right::Read: return "Read";
    case Right::Write: return "Write";
    case Right::Update: return "Update";
    case Right::Delete: return "Delete";
  }
  return "?";
}

std::string_view to_string(DenyReason r) noexcept {
  switch (r) {
    case DenyReason::None: return "none";
    case DenyReason::NoGrant: return "no-grant";
    case DenyReason::Expired: return "expired";
    case DenyReason::Revoked: return "revoked";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Read-tracking view over a snapshot

class StateView {
 public:
  explicit StateView(const WorldState& state) : state_(state) {}

  std::optional<Bytes> get(std::string_view key) {
    const auto* vv = state_.find(key);
    note(key, vv ? vv->version : 0);
    if (vv == nullptr) return std::nullopt;
    return vv->value;
  }

  template <typename Fn>
  void scan(std::string_view prefix, Fn&& fn) {
    state_.for_each_prefix(prefix, [&](const std::string& key, const Bytes& value, std::uint64_t version) {
      note(key, version);
      fn(key, value);
    });
  }

  void put(std::string key, Bytes value) { writes_.push_back({std::move(key), std::move(value)}); }

  RwSet take() && { return RwSet{std::move(reads_), std::move(writes_)}; }

 private:
  void note(std::string_view key, std::uint64_t version) {
    if (seen_.insert(std::string(key)).second) reads_.push_back({std::string(key), version});
  }

  const WorldState& state_;
  std::set<std::string, std::less<>> seen_;
  std::vector<ReadEntry> reads_;
  std::vector<WriteEntry> writes_;
};

std::string key_part(std::string_view id) { return std::to_string(id.size()) + ":" + std::string(id); }

std::string grant_scope_prefix(const std::optional<Digest>& record_id, std::string_view patient_id) {
  if (record_id) return std::string(kGrantPrefix) + "r" + record_id->hex() + "/";
  return std::string(kGrantPrefix) + "p" + key_part(patient_id) + "/";
}

// ---------------------------------------------------------------------------
// Record encodings

void write_sig(codec::Writer& w, const identity::Signature& s) { w.fixed(s.bytes); }
identity::Signature read_sig(codec::Reader& r) {
  identity::Signature s;
  r.fixed(s.bytes);
  return s;
}

void write_opt_digest(codec::Writer& w, const std::optional<Digest>& d) {
  w.boolean(d.has_value());
  if (d) w.digest(*d);
}
std::optional<Digest> read_opt_digest(codec::Reader& r) {
  if (!r.boolean()) return std::nullopt;
  return r.digest();
}

Bytes encode(const HealthFileAbstract& a) {
  codec::Writer w;
  w.digest(a.record_id).str(a.patient_id).str(a.author_id).u64(a.created_at);
  return std::move(w).take();
}
HealthFileAbstract decode_abstract(ByteView data) {
  codec::Reader r(data);
  HealthFileAbstract a;
  a.record_id = r.digest();
  a.patient_id = r.str();
  a.author_id = r.str();
  a.created_at = r.u64();
  r.finish();
  return a;
}

Bytes encode(const PermissionGrant& g) {
  codec::Writer w;
  w.str(g.grant_key).str(g.grantor_id).str(g.grantee_id).str(g.patient_id);
  write_opt_digest(w, g.record_id);
  w.u8(g.rights).opt_u64(g.expires_at).u64(g.created_at).boolean(g.revoked);
  return std::move(w).take();
}
PermissionGrant decode_grant(ByteView data) {
  codec::Reader r(data);
  PermissionGrant g;
  g.grant_key = r.str();
  g.grantor_id = r.str();
  g.grantee_id = r.str();
  g.patient_id = r.str();
  g.record_id = read_opt_digest(r);
  g.rights = r.u8();
  g.expires_at = r.opt_u64();
  g.created_at = r.u64();
  g.revoked = r.boolean();
  r.finish();
  return g;
}

Bytes encode(const Delegation& d) {
  codec::Writer w;
  w.str(d.patient_id).str(d.representative_id).u64(d.granted_at).boolean(d.revoked);
  return std::move(w).take();
}
Delegation decode_delegation(ByteView data) {
  codec::Reader r(data);
  Delegation d;
  d.patient_id = r.str();
  d.representative_id = r.str();
  d.granted_at = r.u64();
  d.revoked = r.boolean();
  r.finish();
  return d;
}

void encode_envelope(codec::Writer& w, const ShareEnvelope& e) {
  w.digest(e.record_id).str(e.sender_id).str(e.receiver_id).digest(e.request_id);
  write_sig(w, e.sender_signature);
  write_sig(w, e.receiver_signature);
  w.digest(e.payload_digest);
}
ShareEnvelope decode_envelope(codec::Reader& r) {
  ShareEnvelope e;
  e.record_id = r.digest();
  e.sender_id = r.str();
  e.receiver_id = r.str();
  e.request_id = r.digest();
  e.sender_signature = read_sig(r);
  e.receiver_signature = read_sig(r);
  e.payload_digest = r.digest();
  return e;
}

Bytes encode(const ShareRecord& s) {
  codec::Writer w;
  encode_envelope(w, s.envelope);
  w.u64(s.shared_at);
  return std::move(w).take();
}
ShareRecord decode_share(ByteView data) {
  codec::Reader r(data);
  ShareRecord s;
  s.envelope = decode_envelope(r);
  s.shared_at = r.u64();
  r.finish();
  return s;
}

void encode_prescription(codec::Writer& w, const Prescription& p) {
  w.digest(p.prescription_id).str(p.patient_id).str(p.prescriber_id).str(p.drug_name);
  write_sig(w, p.signed_hash);
  w.boolean(p.consumed);
}
Prescription decode_prescription(codec::Reader& r) {
  Prescription p;
  p.prescription_id = r.digest();
  p.patient_id = r.str();
  p.prescriber_id = r.str();
  p.drug_name = r.str();
  p.signed_hash = read_sig(r);
  p.consumed = r.boolean();
  return p;
}

SaleRecord decode_sale(ByteView data) {
  codec::Reader r(data);
  SaleRecord s;
  s.patient_id = r.str();
  s.prescription_id = r.digest();
  s.qr_code = r.str();
  s.sold_at = r.u64();
  s.pharmacy_id = r.str();
  r.finish();
  return s;
}

// ---------------------------------------------------------------------------
// Shared rules

bool is_author_role(Role r) { return r == Role::Doctor || r == Role::Hospital || r == Role::Clinic; }

std::optional<HealthFileAbstract> load_abstract(StateView& view, const Digest& record_id) {
  auto raw = view.get(abstract_key(record_id));
  if (!raw) return std::nullopt;
  return decode_abstract(*raw);
}

std::optional<Delegation> load_delegation(StateView& view, std::string_view patient, std::string_view rep) {
  auto raw = view.get(delegation_key(patient, rep));
  if (!raw) return std::nullopt;
  return decode_delegation(*raw);
}

// May `actor` administer grants for `patient`? Throws NotOwner or
// DelegationRevoked otherwise.
void require_grant_authority(StateView& view, std::string_view actor, std::string_view patient) {
  if (actor == patient) return;
  auto d = load_delegation(view, patient, actor);
  if (!d) fail(Errc::NotOwner, std::string(actor) + " does not own records of " + std::string(patient));
  if (d->revoked) fail(Errc::DelegationRevoked, "delegation from " + std::string(patient) + " is revoked");
}

enum class GrantStatus { Active, Expired, Revoked };

GrantStatus grant_status(StateView& view, const PermissionGrant& g, Tick now) {
  if (g.revoked) return GrantStatus::Revoked;
  if (g.grantor_id != g.patient_id) {
    auto d = load_delegation(view, g.patient_id, g.grantor_id);
    if (!d || d->revoked || d->granted_at > g.created_at) return GrantStatus::Revoked;
  }
  if (g.expires_at && now >= *g.expires_at) return GrantStatus::Expired;
  return GrantStatus::Active;
}

AccessDecision decide(StateView& view, const std::string& requester, const Digest& record_id, Right action,
                      Tick now) {
  auto record = load_abstract(view, record_id);
  if (!record) fail(Errc::UnknownRecord, record_id.hex());
  if (requester == record->patient_id) return AccessDecision::allow();

  bool any_expired = false;
  bool any_revoked = false;
  bool any_active = false;
  auto visit = [&](const std::string&, const Bytes& value) {
    const auto g = decode_grant(value);
    if (g.grantee_id != requester || !has_right(g.rights, action)) return;
    if (g.record_id ? *g.record_id != record_id : g.patient_id != record->patient_id) return;
    switch (grant_status(view, g, now)) {
      case GrantStatus::Active: any_active = true; break;
      case GrantStatus::Expired: any_expired = true; break;
      case GrantStatus::Revoked: any_revoked = true; break;
    }
  };
  view.scan(grant_scope_prefix(record_id, {}) + key_part(requester) + "/", visit);
  view.scan(grant_scope_prefix(std::nullopt, record->patient_id) + key_part(requester) + "/", visit);

  if (any_active) return AccessDecision::allow();
  if (any_expired) return AccessDecision::deny(DenyReason::Expired);
  if (any_revoked) return AccessDecision::deny(DenyReason::Revoked);
  return AccessDecision::deny(DenyReason::NoGrant);
}

// Audits pass require_current = false: a share stays verified after one of
// its parties later loses their licence.
bool party_signed(const Context& ctx, const std::string& party, const ShareEnvelope& e,
                  const identity::Signature& sig, bool require_current = true) {
  const auto* cert = ctx.membership.find(party);
  if (cert == nullptr || (require_current && !ctx.membership.accepts(*cert))) return false;
  return identity::verify(cert->public_key, e.signed_message(), sig);
}

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

// ---------------------------------------------------------------------------
// Public encodings

Bytes ShareEnvelope::signed_message() const {
  codec::Writer w;
  w.str("medchain/share/v1").digest(record_id).digest(request_id).digest(payload_digest);
  return std::move(w).take();
}

ShareEnvelope make_share_envelope(const identity::Identity& sender, const identity::Identity& receiver,
                                  const Digest& record_id, const Digest& request_id,
                                  const Digest& payload_digest) {
  ShareEnvelope e;
  e.record_id = record_id;
  e.sender_id = sender.id();
  e.receiver_id = receiver.id();
  e.request_id = request_id;
  e.payload_digest = payload_digest;
  const Bytes msg = e.signed_message();
  e.sender_signature = sender.sign(msg);
  e.receiver_signature = receiver.sign(msg);
  return e;
}

Bytes Prescription::signed_message() const {
  codec::Writer w;
  w.str("medchain/rx/v1").digest(prescription_id).str(patient_id).str(drug_name);
  return std::move(w).take();
}

Prescription Prescription::issue(const identity::Identity& prescriber, std::string patient_id,
                                 std::string drug_name, std::uint64_t serial) {
  Prescription p;
  codec::Writer w;
  w.str("medchain/rx-id/v1").str(prescriber.id()).str(patient_id).str(drug_name).u64(serial);
  p.prescription_id = ledger::hash_content(w.data());
  p.patient_id = std::move(patient_id);
  p.prescriber_id = prescriber.id();
  p.drug_name = std::move(drug_name);
  p.signed_hash = prescriber.sign(p.signed_message());
  return p;
}

Bytes encode_record(const DrugLot& lot) {
  codec::Writer w;
  w.str(lot.qr_code).str(lot.name).u32(lot.expiration).str(lot.tracking_number).str(lot.pharmacy_id);
  w.u64(lot.quantity).u64(lot.registered_quantity).u64(lot.registered_at);
  return std::move(w).take();
}

DrugLot decode_drug_lot(ByteView data) {
  codec::Reader r(data);
  DrugLot lot;
  lot.qr_code = r.str();
  lot.name = r.str();
  lot.expiration = r.u32();
  lot.tracking_number = r.str();
  lot.pharmacy_id = r.str();
  lot.quantity = r.u64();
  lot.registered_quantity = r.u64();
  lot.registered_at = r.u64();
  r.finish();
  return lot;
}

Bytes encode_record(const SaleRecord& s) {
  codec::Writer w;
  w.str(s.patient_id).digest(s.prescription_id).str(s.qr_code).u64(s.sold_at).str(s.pharmacy_id);
  return std::move(w).take();
}

ledger::PayloadKind kind_of(const Action& action) noexcept {
  using K = ledger::PayloadKind;
  return std::visit(Overloaded{
                        [](const RecordHealthAbstract&) { return K::RecordHealthAbstract; },
                        [](const GrantPermission&) { return K::GrantPermission; },
                        [](const RevokePermission&) { return K::RevokePermission; },
                        [](const DelegateAuthority&) { return K::DelegateAuthority; },
                        [](const RevokeDelegation&) { return K::RevokeDelegation; },
                        [](const ShareHealthRecord&) { return K::ShareHealthRecord; },
                        [](const RegisterMedicineReceipt&) { return K::RegisterMedicineReceipt; },
                        [](const SellMedicine&) { return K::SellMedicine; },
                        [](const QueryDrug&) { return K::QueryDrug; },
                    },
                    action);
}

Bytes encode_action(const Action& action) {
  codec::Writer w;
  std::visit(Overloaded{
                 [&](const RecordHealthAbstract& a) { w.str(a.patient_id).digest(a.record_id); },
                 [&](const GrantPermission& a) {
                   w.str(a.grantee_id);
                   write_opt_digest(w, a.record_id);
                   w.str(a.patient_id).u8(a.rights).opt_u64(a.expires_at);
                 },
                 [&](const RevokePermission& a) { w.str(a.grant_key); },
                 [&](const DelegateAuthority& a) { w.str(a.representative_id); },
                 [&](const RevokeDelegation& a) { w.str(a.representative_id); },
                 [&](const ShareHealthRecord& a) { encode_envelope(w, a.envelope); },
                 [&](const RegisterMedicineReceipt& a) {
                   w.str(a.qr_code).str(a.name).u32(a.expiration).str(a.tracking_number).u64(a.quantity);
                 },
                 [&](const SellMedicine& a) {
                   encode_prescription(w, a.prescription);
                   w.str(a.qr_code);
                 },
                 [&](const QueryDrug& a) { w.str(a.qr_code); },
             },
             action);
  return std::move(w).take();
}

Action decode_action(ledger::PayloadKind kind, ByteView payload) {
  using K = ledger::PayloadKind;
  codec::Reader r(payload);
  Action out;
  switch (kind) {
    case K::RecordHealthAbstract: {
      RecordHealthAbstract a;
      a.patient_id = r.str();
      a.record_id = r.digest();
      out = std::move(a);
      break;
    }
    case K::GrantPermission: {
      GrantPermission a;
      a.grantee_id = r.str();
      a.record_id = read_opt_digest(r);
      a.patient_id = r.str();
      a.rights = r.u8();
      a.expires_at = r.opt_u64();
      out = std::move(a);
      break;
    }
    case K::RevokePermission: out = RevokePermission{r.str()}; break;
    case K::DelegateAuthority: out = DelegateAuthority{r.str()}; break;
    case K::RevokeDelegation: out = RevokeDelegation{r.str()}; break;
    case K::ShareHealthRecord: out = ShareHealthRecord{decode_envelope(r)}; break;
    case K::RegisterMedicineReceipt: {
      RegisterMedicineReceipt a;
      a.qr_code = r.str();
      a.name = r.str();
      a.expiration = r.u32();
      a.tracking_number = r.str();
      a.quantity = r.u64();
      out = std::move(a);
      break;
    }
    case K::SellMedicine: {
      SellMedicine a;
      a.prescription = decode_prescription(r);
      a.qr_code = r.str();
      out = std::move(a);
      break;
    }
    case K::QueryDrug: out = QueryDrug{r.str()}; break;
  }
  r.finish();
  return out;
}

std::string render_action(const Action& action) {
  using nlohmann::json;
  json j;
  j["kind"] = std::string(ledger::to_string(kind_of(action)));
  std::visit(Overloaded{
                 [&](const RecordHealthAbstract& a) {
                   j["patient_id"] = a.patient_id;
                   j["record_id"] = a.record_id.hex();
                 },
                 [&](const GrantPermission& a) {
                   j["grantee_id"] = a.grantee_id;
                   j["record_id"] = a.record_id ? json(a.record_id->hex()) : json("*");
                   j["patient_id"] = a.patient_id;
                   json rights = json::array();
                   for (Right r : {Right::Read, Right::Write, Right::Update, Right::Delete}) {
                     if (has_right(a.rights, r)) rights.push_back(std::string(to_string(r)));
                   }
                   j["rights"] = std::move(rights);
                   j["expires_at"] = a.expires_at ? json(*a.expires_at) : json(nullptr);
                 },
                 [&](const RevokePermission& a) { j["grant_key"] = a.grant_key; },
                 [&](const DelegateAuthority& a) { j["representative_id"] = a.representative_id; },
                 [&](const RevokeDelegation& a) { j["representative_id"] = a.representative_id; },
                 [&](const ShareHealthRecord& a) {
                   j["record_id"] = a.envelope.record_id.hex();
                   j["sender_id"] = a.envelope.sender_id;
                   j["receiver_id"] = a.envelope.receiver_id;
                   j["request_id"] = a.envelope.request_id.hex();
                   j["payload_digest"] = a.envelope.payload_digest.hex();
                 },
                 [&](const RegisterMedicineReceipt& a) {
                   j["qr_code"] = a.qr_code;
                   j["name"] = a.name;
                   j["expiration"] = a.expiration;
                   j["tracking_number"] = a.tracking_number;
                   j["quantity"] = a.quantity;
                 },
                 [&](const SellMedicine& a) {
                   j["prescription_id"] = a.prescription.prescription_id.hex();
                   j["patient_id"] = a.prescription.patient_id;
                   j["prescriber_id"] = a.prescription.prescriber_id;
                   j["drug_name"] = a.prescription.drug_name;
                   j["qr_code"] = a.qr_code;
                 },
                 [&](const QueryDrug& a) { j["qr_code"] = a.qr_code; },
             },
             action);
  return j.dump();
}

// ---------------------------------------------------------------------------
// Keys

std::string abstract_key(const Digest& record_id) { return std::string(kAbstractPrefix) + record_id.hex(); }
std::string delegation_key(std::string_view patient_id, std::string_view representative_id) {
  return "deleg/" + key_part(patient_id) + "/" + key_part(representative_id);
}
std::string share_key(const Digest& request_id) { return std::string(kSharePrefix) + request_id.hex(); }
std::string drug_key(std::string_view qr_code) { return std::string(kDrugPrefix) + std::string(qr_code); }
std::string sale_key(const Digest& prescription_id) {
  return std::string(kSalePrefix) + prescription_id.hex();
}

// ---------------------------------------------------------------------------
// Health-file operations

RwSet record_health_abstract(const Context& ctx, const WorldState& state, const Certificate& author,
                             std::string_view patient_id, ByteView record_bytes, Tick now) {
  return record_health_abstract(ctx, state, author,
                                RecordHealthAbstract{std::string(patient_id), ledger::hash_content(record_bytes)},
                                now);
}

RwSet record_health_abstract(const Context& ctx, const WorldState& state, const Certificate& author,
                             const RecordHealthAbstract& action, Tick now) {
  if (!is_author_role(author.role)) {
    fail(Errc::UnauthorizedAuthor, author.subject_id + " is a " + std::string(identity::to_string(author.role)));
  }
  const auto* patient = ctx.membership.find(action.patient_id);
  if (patient == nullptr || patient->role != Role::Patient) fail(Errc::UnknownPatient, action.patient_id);

  StateView view(state);
  const auto key = abstract_key(action.record_id);
  if (view.get(key)) fail(Errc::DuplicateRecord, action.record_id.hex());
  view.put(key, encode(HealthFileAbstract{action.record_id, action.patient_id, author.subject_id, now}));
  return std::move(view).take();
}

RwSet grant_permission(const Context& ctx, const WorldState& state, const Certificate& grantor,
                       const GrantPermission& grant, Tick now) {
  StateView view(state);
  std::string patient = grant.patient_id;
  if (grant.record_id) {
    auto record = load_abstract(view, *grant.record_id);
    if (!record) fail(Errc::UnknownRecord, grant.record_id->hex());
    patient = record->patient_id;
  }
  require_grant_authority(view, grantor.subject_id, patient);
  if (!ctx.membership.is_registered(grant.grantee_id)) fail(Errc::UnknownActor, grant.grantee_id);

  codec::Writer id;
  id.str("medchain/grant/v1").str(grantor.subject_id).str(grant.grantee_id).str(patient);
  write_opt_digest(id, grant.record_id);
  id.u8(grant.rights).opt_u64(grant.expires_at).u64(now);
  const std::string base =
      grant_scope_prefix(grant.record_id, patient) + key_part(grant.grantee_id) + "/" +
      ledger::hash_content(id.data()).hex();
  // A repeated identical grant in the same tick gets a fresh suffix rather
  // than overwriting, which could resurrect a revoked copy.
  std::string key = base;
  for (std::uint64_t n = 1; view.get(key); ++n) key = base + "#" + std::to_string(n);

  PermissionGrant g;
  g.grant_key = key;
  g.grantor_id = grantor.subject_id;
  g.grantee_id = grant.grantee_id;
  g.patient_id = patient;
  g.record_id = grant.record_id;
  g.rights = grant.rights;
  g.expires_at = grant.expires_at;
  g.created_at = now;
  view.put(key, encode(g));
  return std::move(view).take();
}

RwSet revoke_permission(const Context&, const WorldState& state, const Certificate& grantor,
                        std::string_view grant_key, Tick) {
  StateView view(state);
  auto raw = view.get(grant_key);
  if (!raw || !grant_key.starts_with(kGrantPrefix)) fail(Errc::UnknownGrant, std::string(grant_key));
  auto g = decode_grant(*raw);
  require_grant_authority(view, grantor.subject_id, g.patient_id);
  if (!g.revoked) {
    g.revoked = true;
    view.put(std::string(grant_key), encode(g));
  }
  return std::move(view).take();
}

RwSet delegate_authority(const Context& ctx, const WorldState& state, const Certificate& patient,
                         std::string_view representative_id, Tick now) {
  if (patient.role != Role::Patient) fail(Errc::NotPatient, patient.subject_id);
  if (!ctx.membership.is_registered(representative_id)) fail(Errc::UnknownActor, std::string(representative_id));
  StateView view(state);
  auto existing = load_delegation(view, patient.subject_id, representative_id);
  if (!existing || existing->revoked) {
    view.put(delegation_key(patient.subject_id, representative_id),
             encode(Delegation{patient.subject_id, std::string(representative_id), now, false}));
  }
  return std::move(view).take();
}

RwSet revoke_delegation(const Context&, const WorldState& state, const Certificate& patient,
                        std::string_view representative_id, Tick) {
  if (patient.role != Role::Patient) fail(Errc::NotPatient, patient.subject_id);
  StateView view(state);
  auto d = load_delegation(view, patient.subject_id, representative_id);
  if (!d) fail(Errc::UnknownActor, "no delegation to " + std::string(representative_id));
  if (!d->revoked) {
    d->revoked = true;
    view.put(delegation_key(patient.subject_id, representative_id), encode(*d));
  }
  return std::move(view).take();
}

AccessDecision check_access(const Context&, const WorldState& state, const Certificate& requester,
                            const Digest& record_id, Right action, Tick now) {
  StateView view(state);
  return decide(view, requester.subject_id, record_id, action, now);
}

RwSet share_health_record(const Context& ctx, const WorldState& state, const Certificate&,
                          const ShareEnvelope& envelope, Tick now) {
  if (!party_signed(ctx, envelope.sender_id, envelope, envelope.sender_signature)) {
    fail(Errc::BadSenderSignature, envelope.sender_id);
  }
  if (!party_signed(ctx, envelope.receiver_id, envelope, envelope.receiver_signature)) {
    fail(Errc::BadReceiverSignature, envelope.receiver_id);
  }
  StateView view(state);
  const auto verdict = decide(view, envelope.receiver_id, envelope.record_id, Right::Read, now);
  if (!verdict.allowed) {
    fail(Errc::AccessDenied, envelope.receiver_id + ": " + std::string(to_string(verdict.reason)));
  }
  const auto key = share_key(envelope.request_id);
  if (view.get(key)) fail(Errc::DuplicateRecord, "share request " + envelope.request_id.hex());
  view.put(key, encode(ShareRecord{envelope, now}));
  return std::move(view).take();
}

// ---------------------------------------------------------------------------
// Medicine operations

RwSet register_medicine_receipt(const Context& ctx, const WorldState& state, const Certificate& pharmacy,
                                const RegisterMedicineReceipt& lot, Tick now) {
  if (pharmacy.role != Role::Pharmacy) fail(Errc::NotPharmacy, pharmacy.subject_id);
  StateView view(state);
  const auto key = drug_key(lot.qr_code);
  if (view.get(key)) fail(Errc::DuplicateQr, lot.qr_code);
  if (lot.expiration < ctx.today(now)) fail(Errc::ExpiredLot, lot.qr_code);
  DrugLot stored{lot.qr_code, lot.name, lot.expiration, lot.tracking_number, pharmacy.subject_id,
                 lot.quantity, lot.quantity, now};
  view.put(key, encode_record(stored));
  return std::move(view).take();
}

RwSet sell_medicine(const Context& ctx, const WorldState& state, const Certificate& pharmacy,
                    const Prescription& prescription, std::string_view qr_code, Tick now) {
  if (pharmacy.role != Role::Pharmacy) fail(Errc::NotPharmacy, pharmacy.subject_id);
  const auto* prescriber = ctx.membership.find(prescription.prescriber_id);
  if (prescriber == nullptr || !is_author_role(prescriber->role) || !ctx.membership.accepts(*prescriber) ||
      !identity::verify(prescriber->public_key, prescription.signed_message(), prescription.signed_hash)) {
    fail(Errc::BadPrescriptionSignature, prescription.prescription_id.hex());
  }
  StateView view(state);
  const auto skey = sale_key(prescription.prescription_id);
  if (prescription.consumed || view.get(skey)) {
    fail(Errc::PrescriptionConsumed, prescription.prescription_id.hex());
  }
  const auto dkey = drug_key(qr_code);
  auto raw = view.get(dkey);
  if (!raw) fail(Errc::UnknownLot, std::string(qr_code));
  auto lot = decode_drug_lot(*raw);
  if (lot.pharmacy_id != pharmacy.subject_id) fail(Errc::LotNotHeld, lot.qr_code + " held by " + lot.pharmacy_id);
  if (lot.name != prescription.drug_name) fail(Errc::DrugMismatch, lot.name + " != " + prescription.drug_name);
  if (lot.expiration < ctx.today(now)) fail(Errc::ExpiredLot, lot.qr_code);
  if (lot.quantity == 0) fail(Errc::OutOfStock, lot.qr_code);

  lot.quantity -= 1;
  view.put(dkey, encode_record(lot));
  view.put(skey, encode_record(SaleRecord{prescription.patient_id, prescription.prescription_id, lot.qr_code, now,
                                          pharmacy.subject_id}));
  return std::move(view).take();
}

DrugLot query_drug(const WorldState& state, std::string_view qr_code) {
  auto raw = state.get(drug_key(qr_code));
  if (!raw) fail(Errc::UnknownLot, std::string(qr_code));
  return decode_drug_lot(*raw);
}

RwSet execute(const Context& ctx, const WorldState& state, const Certificate& creator, const Action& action,
              Tick now) {
  if (!ctx.membership.accepts(creator)) fail(Errc::BadCertificate, creator.subject_id);
  return std::visit(
      Overloaded{
          [&](const RecordHealthAbstract& a) { return record_health_abstract(ctx, state, creator, a, now); },
          [&](const GrantPermission& a) { return grant_permission(ctx, state, creator, a, now); },
          [&](const RevokePermission& a) { return revoke_permission(ctx, state, creator, a.grant_key, now); },
          [&](const DelegateAuthority& a) {
            return delegate_authority(ctx, state, creator, a.representative_id, now);
          },
          [&](const RevokeDelegation& a) {
            return revoke_delegation(ctx, state, creator, a.representative_id, now);
          },
          [&](const ShareHealthRecord& a) { return share_health_record(ctx, state, creator, a.envelope, now); },
          [&](const RegisterMedicineReceipt& a) { return register_medicine_receipt(ctx, state, creator, a, now); },
          [&](const SellMedicine& a) { return sell_medicine(ctx, state, creator, a.prescription, a.qr_code, now); },
          [&](const QueryDrug& a) {
            StateView view(state);
            if (!view.get(drug_key(a.qr_code))) fail(Errc::UnknownLot, a.qr_code);
            return std::move(view).take();
          },
      },
      action);
}

// ---------------------------------------------------------------------------
// Read helpers

std::optional<HealthFileAbstract> find_abstract(const WorldState& state, const Digest& record_id) {
  auto raw = state.get(abstract_key(record_id));
  if (!raw) return std::nullopt;
  return decode_abstract(*raw);
}

std::optional<PermissionGrant> find_grant(const WorldState& state, std::string_view grant_key) {
  if (!grant_key.starts_with(kGrantPrefix)) return std::nullopt;
  auto raw = state.get(grant_key);
  if (!raw) return std::nullopt;
  return decode_grant(*raw);
}

std::optional<Delegation> find_delegation(const WorldState& state, std::string_view patient_id,
                                          std::string_view representative_id) {
  auto raw = state.get(delegation_key(patient_id, representative_id));
  if (!raw) return std::nullopt;
  return decode_delegation(*raw);
}

std::optional<SaleRecord> find_sale(const WorldState& state, const Digest& prescription_id) {
  auto raw = state.get(sale_key(prescription_id));
  if (!raw) return std::nullopt;
  return decode_sale(*raw);
}

std::optional<ShareRecord> find_share(const WorldState& state, const Digest& request_id) {
  auto raw = state.get(share_key(request_id));
  if (!raw) return std::nullopt;
  return decode_share(*raw);
}

std::vector<DrugLot> all_lots(const WorldState& state) {
  std::vector<DrugLot> out;
  state.for_each_prefix(kDrugPrefix, [&](const std::string&, const Bytes& v, std::uint64_t) {
    out.push_back(decode_drug_lot(v));
  });
  return out;
}

std::vector<SaleRecord> all_sales(const WorldState& state) {
  std::vector<SaleRecord> out;
  state.for_each_prefix(kSalePrefix,
                        [&](const std::string&, const Bytes& v, std::uint64_t) { out.push_back(decode_sale(v)); });
  return out;
}

std::vector<PermissionGrant> all_grants(const WorldState& state) {
  std::vector<PermissionGrant> out;
  state.for_each_prefix(kGrantPrefix,
                        [&](const std::string&, const Bytes& v, std::uint64_t) { out.push_back(decode_grant(v)); });
  return out;
}

std::string created_grant_key(const RwSet& rwset) {
  for (const auto& w : rwset.writes) {
    if (w.key.starts_with(kGrantPrefix)) return w.key;
  }
  fail(Errc::UnknownGrant, "write-set creates no grant");
}

// ---------------------------------------------------------------------------
// Controller units

SupplyReport c2_supply_report(const WorldState& state, std::uint64_t shortage_threshold, std::uint32_t today,
                              std::uint32_t near_expiry_days) {
  std::map<std::string, DrugSupplyLine> lines;
  std::map<std::string, std::string> name_of_qr;
  for (const auto& lot : all_lots(state)) {
    auto& line = lines[lot.name];
    line.drug_name = lot.name;
    line.lots += 1;
    line.registered += lot.registered_quantity;
    line.available += lot.quantity;
    if (lot.expiration < today) {
      line.lots_expired += 1;
    } else if (lot.expiration - today <= near_expiry_days) {
      line.lots_near_expiry += 1;
    }
    name_of_qr[lot.qr_code] = lot.name;
  }
  for (const auto& sale : all_sales(state)) {
    auto it = name_of_qr.find(sale.qr_code);
    if (it != name_of_qr.end()) lines[it->second].sold += 1;
  }
  SupplyReport report;
  for (auto& [name, line] : lines) {
    line.shortage = line.available < shortage_threshold;
    report.drugs.push_back(std::move(line));
  }
  return report;
}

HealthFileAudit c1_audit_health_files(const Context& ctx, const WorldState& state, Tick now) {
  HealthFileAudit audit;
  state.for_each_prefix(kAbstractPrefix, [&](const std::string&, const Bytes&, std::uint64_t) { ++audit.abstracts; });
  StateView view(state);
  for (const auto& g : all_grants(state)) {
    switch (grant_status(view, g, now)) {
      case GrantStatus::Active: ++audit.grants_active; break;
      case GrantStatus::Expired: ++audit.grants_expired; break;
      case GrantStatus::Revoked: ++audit.grants_revoked; break;
    }
  }
  state.for_each_prefix(kSharePrefix, [&](const std::string&, const Bytes& v, std::uint64_t) {
    const auto share = decode_share(v);
    ++audit.shares;
    const auto& e = share.envelope;
    if (party_signed(ctx, e.sender_id, e, e.sender_signature, false) &&
        party_signed(ctx, e.receiver_id, e, e.receiver_signature, false)) {
      ++audit.shares_verified;
    }
  });
  audit.violations = audit.shares - audit.shares_verified;
  return audit;
}

}  // namespace medchain::contracts
