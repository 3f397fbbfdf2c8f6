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

#include <functional>

#include <gtest/gtest.h>

#include "medchain/contracts.hpp"

namespace medchain::contracts {
namespace {

using identity::Identity;
using identity::Role;

Bytes bytes_of(std::string_view s) { return Bytes(as_bytes(s).begin(), as_bytes(s).end()); }

void expect_errc(Errc expected, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(expected) << ", nothing thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), expected) << e.what();
  }
}

class ContractsTest : public ::testing::Test {
 protected:
  ContractsTest()
      : authority_(Identity::derive("licensing-0", Role::LicensingAuthority, 1)),
        licensing_(authority_),
        ctx_{licensing_, kDefaultEpochDay} {}

  const Identity& enroll(const std::string& id, Role role) {
    auto [it, _] = people_.emplace(id, Identity::derive(id, role, 5));
    licensing_.issue(it->second);
    return it->second;
  }
  const Certificate& cert(const std::string& id) const { return *licensing_.find(id); }
  void commit(const RwSet& rw) { state_.apply(rw.writes); }

  void SetUp() override {
    enroll("doctor-1", Role::Doctor);
    enroll("hospital-1", Role::Hospital);
    enroll("pharmacy-1", Role::Pharmacy);
    enroll("pharmacy-2", Role::Pharmacy);
    enroll("patient-P", Role::Patient);
    enroll("patient-Q", Role::Patient);
    enroll("rep-R", Role::Representative);
    enroll("rep-R2", Role::Representative);
    enroll("stranger", Role::Doctor);
  }

  Digest record(const std::string& patient, std::string_view bytes, Tick now = 1) {
    commit(record_health_abstract(ctx_, state_, cert("doctor-1"), patient, as_bytes(bytes), now));
    return ledger::hash_content(bytes);
  }

  std::string grant(const std::string& grantor, const std::string& grantee, const Digest& rec, Rights rights,
                    std::optional<Tick> expires = std::nullopt, Tick now = 2) {
    GrantPermission g{grantee, rec, {}, rights, expires};
    const auto rw = grant_permission(ctx_, state_, cert(grantor), g, now);
    commit(rw);
    return created_grant_key(rw);
  }

  AccessDecision access(const std::string& who, const Digest& rec, Right r, Tick now) {
    return check_access(ctx_, state_, cert(who), rec, r, now);
  }

  void register_lot(const std::string& qr, const std::string& name, std::uint64_t qty,
                    const std::string& pharmacy = "pharmacy-1", std::uint32_t expiration = kDefaultEpochDay + 30) {
    commit(register_medicine_receipt(ctx_, state_, cert(pharmacy), {qr, name, expiration, "TRK-" + qr, qty}, 0));
  }

  Identity authority_;
  identity::LicensingNode licensing_;
  Context ctx_;
  std::map<std::string, Identity> people_;
  WorldState state_;
};

TEST_F(ContractsTest, RecordAbstractStoresDigestOnly) {
  const std::string_view bytes = "EHR: patient P, diagnosis confidential-XYZ";
  const auto rw = record_health_abstract(ctx_, state_, cert("doctor-1"), "patient-P", as_bytes(bytes), 7);
  commit(rw);
  const auto abs = find_abstract(state_, ledger::hash_content(bytes));
  ASSERT_TRUE(abs);
  EXPECT_EQ(abs->patient_id, "patient-P");
  EXPECT_EQ(abs->author_id, "doctor-1");
  EXPECT_EQ(abs->created_at, 7u);
  const std::string needle = "confidential-XYZ";
  for (const auto& w : rw.writes) {
    const std::string value(w.value->begin(), w.value->end());
    EXPECT_EQ(value.find(needle), std::string::npos);
  }
  const Bytes payload = encode_action(RecordHealthAbstract{"patient-P", ledger::hash_content(bytes)});
  EXPECT_EQ(std::string(payload.begin(), payload.end()).find(needle), std::string::npos);
}

TEST_F(ContractsTest, RecordAbstractErrors) {
  expect_errc(Errc::UnauthorizedAuthor, [&] {
    (void)record_health_abstract(ctx_, state_, cert("pharmacy-1"), "patient-P", as_bytes("x"), 1);
  });
  expect_errc(Errc::UnknownPatient, [&] {
    (void)record_health_abstract(ctx_, state_, cert("doctor-1"), "nobody", as_bytes("x"), 1);
  });
  expect_errc(Errc::UnknownPatient, [&] {
    (void)record_health_abstract(ctx_, state_, cert("doctor-1"), "rep-R", as_bytes("x"), 1);
  });
  record("patient-P", "same bytes");
  expect_errc(Errc::DuplicateRecord, [&] {
    (void)record_health_abstract(ctx_, state_, cert("hospital-1"), "patient-P", as_bytes("same bytes"), 2);
  });
}

TEST_F(ContractsTest, OwnerAlwaysAllowed) {
  const auto rec = record("patient-P", "r1");
  EXPECT_EQ(access("patient-P", rec, Right::Delete, 10), AccessDecision::allow());
  EXPECT_EQ(access("doctor-1", rec, Right::Read, 10), AccessDecision::deny(DenyReason::NoGrant));
  expect_errc(Errc::UnknownRecord, [&] { (void)access("patient-P", ledger::hash_content("nope"), Right::Read, 1); });
}

TEST_F(ContractsTest, GrantAllowsOnlyListedRights) {
  const auto rec = record("patient-P", "r1");
  grant("patient-P", "doctor-1", rec, rights_of({Right::Read}));
  EXPECT_TRUE(access("doctor-1", rec, Right::Read, 5).allowed);
  EXPECT_EQ(access("doctor-1", rec, Right::Write, 5), AccessDecision::deny(DenyReason::NoGrant));
  EXPECT_EQ(access("hospital-1", rec, Right::Read, 5), AccessDecision::deny(DenyReason::NoGrant));
}

TEST_F(ContractsTest, WildcardGrantCoversEveryRecordOfPatient) {
  const auto r1 = record("patient-P", "r1");
  const auto r2 = record("patient-P", "r2");
  const auto q1 = record("patient-Q", "q1");
  commit(grant_permission(ctx_, state_, cert("patient-P"),
                          GrantPermission{"doctor-1", std::nullopt, "patient-P", rights_of({Right::Read}), {}}, 3));
  EXPECT_TRUE(access("doctor-1", r1, Right::Read, 4).allowed);
  EXPECT_TRUE(access("doctor-1", r2, Right::Read, 4).allowed);
  EXPECT_FALSE(access("doctor-1", q1, Right::Read, 4).allowed);
}

TEST_F(ContractsTest, ExpiryIsExclusive) {
  const auto rec = record("patient-P", "r1");
  grant("patient-P", "doctor-1", rec, rights_of({Right::Read}), Tick{100});
  EXPECT_TRUE(access("doctor-1", rec, Right::Read, 99).allowed);
  EXPECT_EQ(access("doctor-1", rec, Right::Read, 100), AccessDecision::deny(DenyReason::Expired));
  EXPECT_EQ(access("doctor-1", rec, Right::Read, 101), AccessDecision::deny(DenyReason::Expired));
}

TEST_F(ContractsTest, StrangerCannotGrant) {
  const auto rec = record("patient-P", "r1");
  expect_errc(Errc::NotOwner, [&] { grant("stranger", "doctor-1", rec, rights_of({Right::Read})); });
  expect_errc(Errc::NotOwner, [&] { grant("patient-Q", "doctor-1", rec, rights_of({Right::Read})); });
  expect_errc(Errc::UnknownRecord, [&] { grant("patient-P", "doctor-1", ledger::hash_content("zz"), 1); });
  expect_errc(Errc::UnknownActor, [&] { grant("patient-P", "ghost", rec, 1); });
}

TEST_F(ContractsTest, RevokeDeniesAndIsIdempotent) {
  const auto rec = record("patient-P", "r1");
  const auto key = grant("patient-P", "doctor-1", rec, rights_of({Right::Read, Right::Write}));
  commit(revoke_permission(ctx_, state_, cert("patient-P"), key, 3));
  EXPECT_EQ(access("doctor-1", rec, Right::Read, 4), AccessDecision::deny(DenyReason::Revoked));
  const auto again = revoke_permission(ctx_, state_, cert("patient-P"), key, 5);
  EXPECT_TRUE(again.writes.empty());
  EXPECT_TRUE(find_grant(state_, key)->revoked);
  expect_errc(Errc::UnknownGrant, [&] { (void)revoke_permission(ctx_, state_, cert("patient-P"), "grant/none", 5); });
  expect_errc(Errc::NotOwner, [&] { (void)revoke_permission(ctx_, state_, cert("stranger"), key, 5); });
}

TEST_F(ContractsTest, RepeatedGrantDoesNotResurrectRevokedCopy) {
  const auto rec = record("patient-P", "r1");
  const auto k1 = grant("patient-P", "doctor-1", rec, rights_of({Right::Read}), std::nullopt, 9);
  commit(revoke_permission(ctx_, state_, cert("patient-P"), k1, 9));
  const auto k2 = grant("patient-P", "doctor-1", rec, rights_of({Right::Read}), std::nullopt, 9);
  EXPECT_NE(k1, k2);
  EXPECT_TRUE(find_grant(state_, k1)->revoked);
  EXPECT_TRUE(access("doctor-1", rec, Right::Read, 10).allowed);
}

TEST_F(ContractsTest, ActiveGrantOutranksRevokedAndExpired) {
  const auto rec = record("patient-P", "r1");
  const auto k = grant("patient-P", "doctor-1", rec, rights_of({Right::Read}));
  commit(revoke_permission(ctx_, state_, cert("patient-P"), k, 3));
  grant("patient-P", "doctor-1", rec, rights_of({Right::Read}), Tick{5}, 4);
  EXPECT_EQ(access("doctor-1", rec, Right::Read, 6), AccessDecision::deny(DenyReason::Expired));
  grant("patient-P", "doctor-1", rec, rights_of({Right::Read}), std::nullopt, 7);
  EXPECT_TRUE(access("doctor-1", rec, Right::Read, 8).allowed);
}

TEST_F(ContractsTest, RepresentativeGrantsWhileDelegated) {
  const auto rec = record("patient-P", "r1");
  commit(delegate_authority(ctx_, state_, cert("patient-P"), "rep-R", 2));
  grant("rep-R", "doctor-1", rec, rights_of({Right::Read}), std::nullopt, 3);
  EXPECT_TRUE(access("doctor-1", rec, Right::Read, 4).allowed);
  // The representative holds no implicit access of their own.
  EXPECT_FALSE(access("rep-R", rec, Right::Read, 4).allowed);

  commit(revoke_delegation(ctx_, state_, cert("patient-P"), "rep-R", 5));
  EXPECT_EQ(access("doctor-1", rec, Right::Read, 6), AccessDecision::deny(DenyReason::Revoked));
  expect_errc(Errc::DelegationRevoked, [&] { grant("rep-R", "hospital-1", rec, 1, std::nullopt, 7); });

  // Re-delegation does not revive grants made under the earlier delegation.
  commit(delegate_authority(ctx_, state_, cert("patient-P"), "rep-R", 8));
  EXPECT_FALSE(access("doctor-1", rec, Right::Read, 9).allowed);
  grant("rep-R", "doctor-1", rec, rights_of({Right::Read}), std::nullopt, 9);
  EXPECT_TRUE(access("doctor-1", rec, Right::Read, 10).allowed);
}

TEST_F(ContractsTest, DelegationRules) {
  expect_errc(Errc::NotPatient, [&] { (void)delegate_authority(ctx_, state_, cert("rep-R"), "rep-R2", 1); });
  expect_errc(Errc::UnknownActor, [&] { (void)delegate_authority(ctx_, state_, cert("patient-P"), "ghost", 1); });
  expect_errc(Errc::UnknownActor, [&] { (void)revoke_delegation(ctx_, state_, cert("patient-P"), "rep-R", 1); });
  commit(delegate_authority(ctx_, state_, cert("patient-P"), "rep-R", 1));
  EXPECT_TRUE(delegate_authority(ctx_, state_, cert("patient-P"), "rep-R", 2).writes.empty());
  EXPECT_EQ(find_delegation(state_, "patient-P", "rep-R")->granted_at, 1u);
}

TEST_F(ContractsTest, ShareRequiresBothSignaturesAndAccess) {
  const auto rec = record("patient-P", "r1");
  const auto& sender = people_.at("hospital-1");
  const auto& receiver = people_.at("doctor-1");
  const auto req = ledger::hash_content("request-1");
  const auto payload = ledger::hash_content("HL7 message body");
  auto env = make_share_envelope(sender, receiver, rec, req, payload);

  expect_errc(Errc::AccessDenied, [&] { (void)share_health_record(ctx_, state_, cert("hospital-1"), env, 3); });
  const auto key = grant("patient-P", "doctor-1", rec, rights_of({Right::Read}));
  commit(share_health_record(ctx_, state_, cert("hospital-1"), env, 4));
  const auto shared = find_share(state_, req);
  ASSERT_TRUE(shared);
  EXPECT_EQ(shared->envelope.payload_digest, payload);
  EXPECT_EQ(shared->shared_at, 4u);
  expect_errc(Errc::DuplicateRecord, [&] { (void)share_health_record(ctx_, state_, cert("hospital-1"), env, 5); });

  auto unsigned_receiver = make_share_envelope(sender, receiver, rec, ledger::hash_content("request-2"), payload);
  unsigned_receiver.receiver_signature = {};
  expect_errc(Errc::BadReceiverSignature,
              [&] { (void)share_health_record(ctx_, state_, cert("hospital-1"), unsigned_receiver, 5); });
  auto bad_sender = make_share_envelope(sender, receiver, rec, ledger::hash_content("request-3"), payload);
  bad_sender.sender_signature.bytes[0] ^= 1;
  expect_errc(Errc::BadSenderSignature,
              [&] { (void)share_health_record(ctx_, state_, cert("hospital-1"), bad_sender, 5); });

  // Revocation between request and commit.
  const auto late = make_share_envelope(sender, receiver, rec, ledger::hash_content("request-4"), payload);
  commit(revoke_permission(ctx_, state_, cert("patient-P"), key, 6));
  expect_errc(Errc::AccessDenied, [&] { (void)share_health_record(ctx_, state_, cert("hospital-1"), late, 7); });
}

TEST_F(ContractsTest, RegisterLot) {
  register_lot("QR-1", "Amoxicillin", 100);
  EXPECT_EQ(query_drug(state_, "QR-1").quantity, 100u);
  EXPECT_EQ(query_drug(state_, "QR-1").pharmacy_id, "pharmacy-1");
  expect_errc(Errc::DuplicateQr, [&] { register_lot("QR-1", "Amoxicillin", 5, "pharmacy-2"); });
  expect_errc(Errc::ExpiredLot, [&] { register_lot("QR-2", "Amoxicillin", 5, "pharmacy-1", kDefaultEpochDay - 1); });
  EXPECT_NO_THROW(register_lot("QR-3", "Amoxicillin", 5, "pharmacy-1", kDefaultEpochDay));
  expect_errc(Errc::NotPharmacy, [&] {
    (void)register_medicine_receipt(ctx_, state_, cert("doctor-1"), {"QR-4", "X", kDefaultEpochDay + 1, "T", 1}, 0);
  });
  expect_errc(Errc::UnknownLot, [&] { (void)query_drug(state_, "QR-404"); });
}

TEST_F(ContractsTest, SaleConsumesPrescriptionAndStock) {
  register_lot("QR-1", "Amoxicillin", 1);
  const auto rx = Prescription::issue(people_.at("doctor-1"), "patient-P", "Amoxicillin", 1);
  commit(sell_medicine(ctx_, state_, cert("pharmacy-1"), rx, "QR-1", 50));
  EXPECT_EQ(query_drug(state_, "QR-1").quantity, 0u);
  const auto sale = find_sale(state_, rx.prescription_id);
  ASSERT_TRUE(sale);
  EXPECT_EQ(sale->sold_at, 50u);
  EXPECT_EQ(sale->pharmacy_id, "pharmacy-1");
  expect_errc(Errc::PrescriptionConsumed, [&] { (void)sell_medicine(ctx_, state_, cert("pharmacy-1"), rx, "QR-1", 51); });
  const auto rx2 = Prescription::issue(people_.at("doctor-1"), "patient-P", "Amoxicillin", 2);
  expect_errc(Errc::OutOfStock, [&] { (void)sell_medicine(ctx_, state_, cert("pharmacy-1"), rx2, "QR-1", 52); });
}

TEST_F(ContractsTest, SaleErrors) {
  register_lot("QR-1", "Amoxicillin", 10);
  register_lot("QR-2", "Ibuprofen", 10, "pharmacy-2");
  register_lot("QR-3", "Amoxicillin", 10, "pharmacy-1", kDefaultEpochDay);
  const auto& doc = people_.at("doctor-1");
  const auto rx = Prescription::issue(doc, "patient-P", "Amoxicillin", 1);
  auto sell = [&](const std::string& who, const Prescription& p, const std::string& qr, Tick now = 10) {
    return sell_medicine(ctx_, state_, cert(who), p, qr, now);
  };
  expect_errc(Errc::NotPharmacy, [&] { (void)sell("doctor-1", rx, "QR-1"); });
  auto forged = rx;
  forged.drug_name = "Ibuprofen";
  expect_errc(Errc::BadPrescriptionSignature, [&] { (void)sell("pharmacy-2", forged, "QR-2"); });
  const auto by_pharmacy = Prescription::issue(people_.at("pharmacy-2"), "patient-P", "Amoxicillin", 3);
  expect_errc(Errc::BadPrescriptionSignature, [&] { (void)sell("pharmacy-1", by_pharmacy, "QR-1"); });
  expect_errc(Errc::UnknownLot, [&] { (void)sell("pharmacy-1", rx, "QR-9"); });
  expect_errc(Errc::LotNotHeld, [&] { (void)sell("pharmacy-1", rx, "QR-2"); });
  const auto ibu = Prescription::issue(doc, "patient-P", "Ibuprofen", 4);
  expect_errc(Errc::DrugMismatch, [&] { (void)sell("pharmacy-1", ibu, "QR-1"); });
  // QR-3 is usable through its expiration day only.
  EXPECT_NO_THROW((void)sell("pharmacy-1", rx, "QR-3", kTicksPerDay - 1));
  expect_errc(Errc::ExpiredLot, [&] { (void)sell("pharmacy-1", rx, "QR-3", kTicksPerDay); });
}

TEST_F(ContractsTest, FiveThousandSalesConserveStock) {
  const std::vector<std::string> names{"Amoxicillin", "Ibuprofen", "Metformin", "Lisinopril"};
  for (std::size_t i = 0; i < 20; ++i) register_lot("QR-" + std::to_string(i), names[i % names.size()], 300);
  const auto& doc = people_.at("doctor-1");
  std::uint64_t sold = 0;
  for (std::uint64_t serial = 0; serial < 5000; ++serial) {
    const std::size_t lot = serial % 20;
    const auto rx = Prescription::issue(doc, "patient-P", names[lot % names.size()], serial);
    commit(sell_medicine(ctx_, state_, cert("pharmacy-1"), rx, "QR-" + std::to_string(lot), Tick(serial)));
    ++sold;
  }
  std::uint64_t registered = 0;
  std::uint64_t remaining = 0;
  for (const auto& lot : all_lots(state_)) {
    registered += lot.registered_quantity;
    remaining += lot.quantity;
  }
  const auto sales = all_sales(state_);
  EXPECT_EQ(sales.size(), sold);
  EXPECT_EQ(registered - remaining, sold);
  std::set<Digest> ids;
  for (const auto& s : sales) ids.insert(s.prescription_id);
  EXPECT_EQ(ids.size(), sales.size());

  const auto report = c2_supply_report(state_, 0, kDefaultEpochDay);
  std::uint64_t report_sold = 0;
  for (const auto& d : report.drugs) {
    EXPECT_EQ(d.registered - d.sold, d.available) << d.drug_name;
    report_sold += d.sold;
  }
  EXPECT_EQ(report_sold, sold);
}

TEST_F(ContractsTest, SupplyReport) {
  EXPECT_TRUE(c2_supply_report(state_, 5, kDefaultEpochDay).drugs.empty());
  register_lot("QR-1", "Amoxicillin", 3);
  register_lot("QR-2", "Zinc", 10, "pharmacy-1", kDefaultEpochDay + 400);
  const auto report = c2_supply_report(state_, 5, kDefaultEpochDay);
  ASSERT_EQ(report.drugs.size(), 2u);
  EXPECT_EQ(report.drugs[0].drug_name, "Amoxicillin");
  EXPECT_TRUE(report.drugs[0].shortage);
  EXPECT_EQ(report.drugs[0].lots_near_expiry, 1u);
  EXPECT_FALSE(report.drugs[1].shortage);
  EXPECT_EQ(report.drugs[1].lots_near_expiry, 0u);
  EXPECT_EQ(c2_supply_report(state_, 5, kDefaultEpochDay + 31).drugs[0].lots_expired, 1u);
}

TEST_F(ContractsTest, HealthFileAudit) {
  EXPECT_EQ(c1_audit_health_files(ctx_, state_, 0), HealthFileAudit{});
  const auto rec = record("patient-P", "r1");
  std::vector<std::string> keys;
  for (int i = 0; i < 6; ++i) {
    keys.push_back(grant("patient-P", i % 2 ? "doctor-1" : "hospital-1", rec, rights_of({Right::Read}),
                         std::nullopt, Tick(10 + i)));
  }
  for (int i = 0; i < 2; ++i) commit(revoke_permission(ctx_, state_, cert("patient-P"), keys[i], 20));
  grant("patient-P", "doctor-1", rec, rights_of({Right::Read}), Tick{25}, 21);
  commit(share_health_record(ctx_, state_, cert("hospital-1"),
                             make_share_envelope(people_.at("hospital-1"), people_.at("doctor-1"), rec,
                                                 ledger::hash_content("req"), ledger::hash_content("body")),
                             22));
  const auto audit = c1_audit_health_files(ctx_, state_, 30);
  EXPECT_EQ(audit.abstracts, 1u);
  EXPECT_EQ(audit.grants_active, 4u);
  EXPECT_EQ(audit.grants_revoked, 2u);
  EXPECT_EQ(audit.grants_expired, 1u);
  EXPECT_EQ(audit.shares, 1u);
  EXPECT_EQ(audit.shares_verified, 1u);
  EXPECT_EQ(audit.violations, 0u);
}

TEST_F(ContractsTest, ExecuteChecksCreatorCertificate) {
  const RegisterMedicineReceipt lot{"QR-1", "Amoxicillin", kDefaultEpochDay + 10, "T", 4};
  EXPECT_FALSE(execute(ctx_, state_, cert("pharmacy-1"), lot, 0).writes.empty());
  licensing_.revoke("pharmacy-1");
  expect_errc(Errc::BadCertificate, [&] { (void)execute(ctx_, state_, cert("pharmacy-1"), lot, 0); });
}

TEST_F(ContractsTest, ActionsRoundTripThroughEncoding) {
  const auto rec = ledger::hash_content("r");
  const auto& doc = people_.at("doctor-1");
  const std::vector<Action> actions{
      RecordHealthAbstract{"patient-P", rec},
      GrantPermission{"doctor-1", rec, "", rights_of({Right::Read, Right::Delete}), Tick{77}},
      GrantPermission{"doctor-1", std::nullopt, "patient-P", 1, std::nullopt},
      RevokePermission{"grant/abc"},
      DelegateAuthority{"rep-R"},
      RevokeDelegation{"rep-R"},
      ShareHealthRecord{make_share_envelope(doc, people_.at("hospital-1"), rec, ledger::hash_content("q"), rec)},
      RegisterMedicineReceipt{"QR-1", "Zinc", 20100, "TRK", 600},
      SellMedicine{Prescription::issue(doc, "patient-P", "Zinc", 9), "QR-1"},
      QueryDrug{"QR-1"},
  };
  for (const auto& a : actions) {
    const Bytes enc = encode_action(a);
    EXPECT_EQ(decode_action(kind_of(a), enc), a) << render_action(a);
    Bytes trailing = enc;
    trailing.push_back(0);
    EXPECT_THROW((void)decode_action(kind_of(a), trailing), Error);
  }
}

}  // namespace
}  // namespace medchain::contracts
