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

// Brute-force reference for the access-control contracts. It keeps the full
// event history and answers every question by a linear scan over it, never
// looking at world state. run_access_sequence drives random grant / revoke /
// delegate / check events through both the contracts and the oracle and
// counts disagreements.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "medchain/contracts.hpp"

namespace medchain::testing {

namespace ac = medchain::contracts;

class AccessOracle {
 public:
  struct Record { Digest id; std::string patient; };
  struct Grant {
    std::string key, grantor, grantee, patient;
    std::optional<Digest> record;
    ac::Rights rights;
    std::optional<Tick> expires;
    Tick created;
  };
  struct Revoke { std::string key; };
  struct Delegate { std::string patient, rep; Tick at; };
  struct Undelegate { std::string patient, rep; };
  using Event = std::variant<Record, Grant, Revoke, Delegate, Undelegate>;

  void add(Event e) { history_.push_back(std::move(e)); }

  struct DelegationView { bool exists = false; bool active = false; Tick since = 0; };

  [[nodiscard]] DelegationView delegation(const std::string& patient, const std::string& rep) const {
    DelegationView v;
    for (const auto& e : history_) {
      if (const auto* d = std::get_if<Delegate>(&e); d && d->patient == patient && d->rep == rep) {
        if (!v.active) v.since = d->at;
        v.exists = v.active = true;
      } else if (const auto* u = std::get_if<Undelegate>(&e); u && u->patient == patient && u->rep == rep) {
        v.active = false;
      }
    }
    return v;
  }

  [[nodiscard]] const Record* record(const Digest& id) const {
    for (const auto& e : history_) {
      if (const auto* r = std::get_if<Record>(&e); r && r->id == id) return r;
    }
    return nullptr;
  }

  [[nodiscard]] const Grant* grant(const std::string& key) const {
    for (const auto& e : history_) {
      if (const auto* g = std::get_if<Grant>(&e); g && g->key == key) return g;
    }
    return nullptr;
  }

  [[nodiscard]] std::optional<Errc> authority(const std::string& actor, const std::string& patient) const {
    if (actor == patient) return std::nullopt;
    const auto d = delegation(patient, actor);
    if (!d.exists) return Errc::NotOwner;
    if (!d.active) return Errc::DelegationRevoked;
    return std::nullopt;
  }

  [[nodiscard]] ac::AccessDecision check(const std::string& requester, const Digest& record_id, ac::Right right,
                                         Tick now) const {
    const Record* rec = record(record_id);
    if (rec == nullptr) throw Error(Errc::UnknownRecord, "oracle");
    if (requester == rec->patient) return ac::AccessDecision::allow();
    bool active = false, expired = false, revoked = false;
    for (const auto& e : history_) {
      const auto* g = std::get_if<Grant>(&e);
      if (g == nullptr || g->grantee != requester || !ac::has_right(g->rights, right)) continue;
      if (g->record ? *g->record != record_id : g->patient != rec->patient) continue;
      bool is_revoked = false;
      for (const auto& r : history_) {
        if (const auto* rv = std::get_if<Revoke>(&r); rv && rv->key == g->key) is_revoked = true;
      }
      if (g->grantor != g->patient) {
        const auto d = delegation(g->patient, g->grantor);
        if (!d.active || d.since > g->created) is_revoked = true;
      }
      if (is_revoked) {
        revoked = true;
      } else if (g->expires && now >= *g->expires) {
        expired = true;
      } else {
        active = true;
      }
    }
    if (active) return ac::AccessDecision::allow();
    if (expired) return ac::AccessDecision::deny(ac::DenyReason::Expired);
    if (revoked) return ac::AccessDecision::deny(ac::DenyReason::Revoked);
    return ac::AccessDecision::deny(ac::DenyReason::NoGrant);
  }

 private:
  std::vector<Event> history_;
};

struct SequenceResult {
  std::uint64_t checks = 0;
  std::uint64_t mutations = 0;
  std::uint64_t mismatches = 0;
  std::string first_mismatch;
};

/// One seeded random sequence of `steps` events.
inline SequenceResult run_access_sequence(std::uint64_t seed, std::size_t steps) {
  using identity::Identity;
  using identity::Role;
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  const auto authority_id = Identity::derive("licensing-0", Role::LicensingAuthority, seed);
  identity::LicensingNode licensing(authority_id);
  const ac::Context ctx{licensing, ac::kDefaultEpochDay};
  std::map<std::string, identity::Certificate> certs;
  const std::vector<std::pair<std::string, Role>> roster{
      {"patient-0", Role::Patient}, {"patient-1", Role::Patient},    {"rep-0", Role::Representative},
      {"rep-1", Role::Representative}, {"doctor-0", Role::Doctor}, {"doctor-1", Role::Doctor},
      {"hospital-0", Role::Hospital}};
  std::vector<std::string> everyone;
  for (const auto& [id, role] : roster) {
    certs.emplace(id, licensing.issue(Identity::derive(id, role, seed)));
    everyone.push_back(id);
  }
  const std::vector<std::string> patients{"patient-0", "patient-1"};
  const std::vector<std::string> grantors{"patient-0", "patient-1", "rep-0", "rep-1", "doctor-0"};
  const std::vector<std::string> grantees{"doctor-0", "doctor-1", "hospital-0", "rep-0", "ghost"};

  ledger::WorldState state;
  AccessOracle oracle;
  SequenceResult result;
  std::vector<Digest> records;
  std::vector<std::string> grant_keys;
  Tick now = 1;

  for (const auto& p : patients) {
    for (int i = 0; i < 2; ++i) {
      const std::string body = fmt::format("record {} {} {}", seed, p, i);
      state.apply(ac::record_health_abstract(ctx, state, certs.at("doctor-0"), p, as_bytes(body), now).writes);
      records.push_back(ledger::hash_content(body));
      oracle.add(AccessOracle::Record{records.back(), p});
    }
  }

  auto note = [&](std::string what) {
    if (result.mismatches++ == 0) result.first_mismatch = fmt::format("seed {} tick {}: {}", seed, now, what);
  };
  // Runs a mutation, compares its outcome with the predicted error, and
  // commits it on success.
  auto mutate = [&](std::optional<Errc> predicted, auto&& op, const char* what) -> std::optional<ledger::RwSet> {
    ++result.mutations;
    std::optional<Errc> actual;
    std::optional<ledger::RwSet> rw;
    try {
      rw = op();
    } catch (const Error& e) {
      actual = e.code();
    }
    if (actual != predicted) {
      note(fmt::format("{}: expected {}, got {}", what, predicted ? to_string(*predicted) : "success",
                       actual ? to_string(*actual) : "success"));
      return std::nullopt;
    }
    if (rw) state.apply(rw->writes);
    return rw;
  };

  for (std::size_t step = 0; step < steps; ++step) {
    now += pick(4);
    const std::size_t kind = pick(100);
    if (kind < 30) {
      const std::string grantor = grantors[pick(grantors.size())];
      const std::string grantee = grantees[pick(grantees.size())];
      const bool wildcard = pick(4) == 0;
      const Digest rec = records[pick(records.size())];
      const std::string patient = wildcard ? patients[pick(2)] : oracle.record(rec)->patient;
      const auto rights = static_cast<ac::Rights>(1 + pick(15));
      std::optional<Tick> expires;
      if (pick(2) == 0) expires = now + pick(20);
      ac::GrantPermission g{grantee, wildcard ? std::nullopt : std::optional<Digest>(rec), patient, rights, expires};
      std::optional<Errc> predicted = oracle.authority(grantor, patient);
      if (!predicted && grantee == "ghost") predicted = Errc::UnknownActor;
      auto rw = mutate(predicted, [&] { return ac::grant_permission(ctx, state, certs.at(grantor), g, now); }, "grant");
      if (rw && !predicted) {
        const std::string key = ac::created_grant_key(*rw);
        grant_keys.push_back(key);
        oracle.add(AccessOracle::Grant{key, grantor, grantee, patient, g.record_id, rights, expires, now});
      }
    } else if (kind < 45) {
      const bool known = !grant_keys.empty() && pick(8) != 0;
      const std::string key = known ? grant_keys[pick(grant_keys.size())] : "grant/unknown/" + std::to_string(step);
      const std::string actor = grantors[pick(grantors.size())];
      std::optional<Errc> predicted;
      if (const auto* g = oracle.grant(key)) {
        predicted = oracle.authority(actor, g->patient);
      } else {
        predicted = Errc::UnknownGrant;
      }
      if (mutate(predicted, [&] { return ac::revoke_permission(ctx, state, certs.at(actor), key, now); }, "revoke") &&
          !predicted) {
        oracle.add(AccessOracle::Revoke{key});
      }
    } else if (kind < 55) {
      const std::vector<std::string> from{"patient-0", "patient-1", "rep-0"};
      const std::string patient = from[pick(from.size())];
      const std::string rep = pick(6) == 0 ? "ghost" : (pick(2) ? "rep-0" : "rep-1");
      std::optional<Errc> predicted;
      if (certs.at(patient).role != Role::Patient) {
        predicted = Errc::NotPatient;
      } else if (rep == "ghost") {
        predicted = Errc::UnknownActor;
      }
      if (mutate(predicted, [&] { return ac::delegate_authority(ctx, state, certs.at(patient), rep, now); },
                 "delegate") &&
          !predicted) {
        oracle.add(AccessOracle::Delegate{patient, rep, now});
      }
    } else if (kind < 62) {
      const std::string patient = patients[pick(2)];
      const std::string rep = pick(2) ? "rep-0" : "rep-1";
      std::optional<Errc> predicted;
      if (!oracle.delegation(patient, rep).exists) predicted = Errc::UnknownActor;
      if (mutate(predicted, [&] { return ac::revoke_delegation(ctx, state, certs.at(patient), rep, now); },
                 "revoke-delegation") &&
          !predicted) {
        oracle.add(AccessOracle::Undelegate{patient, rep});
      }
    } else {
      const std::string requester = everyone[pick(everyone.size())];
      const Digest rec = records[pick(records.size())];
      const auto right = static_cast<ac::Right>(1u << pick(4));
      const Tick at = now + pick(3);
      ++result.checks;
      const auto expected = oracle.check(requester, rec, right, at);
      const auto actual = ac::check_access(ctx, state, certs.at(requester), rec, right, at);
      if (expected != actual) {
        note(fmt::format("check {} {} on {}: oracle {}/{} contract {}/{}", requester, ac::to_string(right),
                         rec.hex().substr(0, 8), expected.allowed, ac::to_string(expected.reason), actual.allowed,
                         ac::to_string(actual.reason)));
      }
    }
  }
  return result;
}

}  // namespace medchain::testing
