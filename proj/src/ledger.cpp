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

#include "medchain/ledger.hpp"

#include <algorithm>
#include <unordered_set>

namespace medchain::ledger {

namespace {

constexpr std::array<std::string_view, kPayloadKindCount> kKindNames = {
    "RecordHealthAbstract", "GrantPermission",         "RevokePermission",
    "DelegateAuthority",    "RevokeDelegation",        "ShareHealthRecord",
    "RegisterMedicineReceipt", "SellMedicine",         "QueryDrug",
};

}  // namespace

std::string_view to_string(PayloadKind kind) noexcept { return kKindNames[static_cast<std::size_t>(kind)]; }

PayloadKind payload_kind_from_u8(std::uint8_t raw) {
  if (raw >= kPayloadKindCount) fail(Errc::ParseError, "payload kind out of range");
  return static_cast<PayloadKind>(raw);
}

void RwSet::encode(codec::Writer& w) const {
  w.u32(static_cast<std::uint32_t>(reads.size()));
  for (const auto& r : reads) w.str(r.key).u64(r.version);
  w.u32(static_cast<std::uint32_t>(writes.size()));
  for (const auto& wr : writes) {
    w.str(wr.key).boolean(wr.value.has_value());
    if (wr.value) w.bytes(*wr.value);
  }
}

RwSet RwSet::decode(codec::Reader& r) {
  RwSet s;
  const auto n_reads = r.u32();
  for (std::uint32_t i = 0; i < n_reads; ++i) {
    ReadEntry e;
    e.key = r.str();
    e.version = r.u64();
    s.reads.push_back(std::move(e));
  }
  const auto n_writes = r.u32();
  for (std::uint32_t i = 0; i < n_writes; ++i) {
    WriteEntry e;
    e.key = r.str();
    if (r.boolean()) e.value = r.bytes();
    s.writes.push_back(std::move(e));
  }
  return s;
}

Bytes Transaction::signed_bytes() const {
  codec::Writer w;
  w.str(channel_id).u64(created_at).u64(nonce).u8(static_cast<std::uint8_t>(kind)).bytes(payload);
  return std::move(w).take();
}

Digest Transaction::compute_tx_id() const {
  codec::Writer w;
  w.raw(signed_bytes());
  w.u32(static_cast<std::uint32_t>(signatures.size()));
  for (const auto& s : signatures) w.str(s.signer_id).fixed(s.signature.bytes);
  return hash_content(w.data());
}

Bytes Transaction::endorsement_message() const {
  codec::Writer w;
  w.str("medchain/endorse/v1").digest(tx_id);
  rwset.encode(w);
  return std::move(w).take();
}

void Transaction::encode(codec::Writer& w) const {
  w.digest(tx_id).str(channel_id).u64(created_at).u64(nonce).u8(static_cast<std::uint8_t>(kind)).bytes(payload);
  creator_cert.encode(w);
  w.u32(static_cast<std::uint32_t>(signatures.size()));
  for (const auto& s : signatures) w.str(s.signer_id).fixed(s.signature.bytes);
  rwset.encode(w);
  w.u32(static_cast<std::uint32_t>(endorsements.size()));
  for (const auto& e : endorsements) w.str(e.peer_id).fixed(e.signature.bytes);
}

Transaction Transaction::decode(codec::Reader& r) {
  Transaction tx;
  tx.tx_id = r.digest();
  tx.channel_id = r.str();
  tx.created_at = r.u64();
  tx.nonce = r.u64();
  tx.kind = payload_kind_from_u8(r.u8());
  tx.payload = r.bytes();
  tx.creator_cert = identity::Certificate::decode(r);
  const auto n_sigs = r.u32();
  for (std::uint32_t i = 0; i < n_sigs; ++i) {
    SignatureEntry s;
    s.signer_id = r.str();
    r.fixed(s.signature.bytes);
    tx.signatures.push_back(std::move(s));
  }
  tx.rwset = RwSet::decode(r);
  const auto n_end = r.u32();
  for (std::uint32_t i = 0; i < n_end; ++i) {
    Endorsement e;
    e.peer_id = r.str();
    r.fixed(e.signature.bytes);
    tx.endorsements.push_back(std::move(e));
  }
  return tx;
}

Bytes Transaction::encoded() const {
  codec::Writer w;
  encode(w);
  return std::move(w).take();
}

Transaction make_transaction(std::string channel_id, Tick created_at, std::uint64_t nonce,
                             PayloadKind kind, Bytes payload, const identity::Identity& creator,
                             const identity::Certificate& creator_cert) {
  Transaction tx;
  tx.channel_id = std::move(channel_id);
  tx.created_at = created_at;
  tx.nonce = nonce;
  tx.kind = kind;
  tx.payload = std::move(payload);
  tx.creator_cert = creator_cert;
  tx.signatures.push_back({creator.id(), creator.sign(tx.signed_bytes())});
  tx.tx_id = tx.compute_tx_id();
  return tx;
}

Digest BlockHeader::digest() const {
  codec::Writer w;
  w.u64(number).digest(prev_hash).digest(data_hash);
  return hash_content(w.data());
}

Digest compute_data_hash(std::span<const std::pair<Digest, Digest>> ids_and_digests) {
  Hasher h;
  for (const auto& [id, content] : ids_and_digests) h.update(id).update(content);
  return h.finish();
}

Digest compute_data_hash(std::span<const Transaction> txs) {
  std::vector<std::pair<Digest, Digest>> pairs;
  pairs.reserve(txs.size());
  for (const auto& tx : txs) pairs.emplace_back(tx.compute_tx_id(), hash_content(tx.encoded()));
  return compute_data_hash(std::span<const std::pair<Digest, Digest>>(pairs));
}

Digest compute_commit_hash(const Digest& prev_commit, const Digest& header_digest,
                           const std::vector<bool>& validity) {
  codec::Writer w;
  w.digest(prev_commit).digest(header_digest).u32(static_cast<std::uint32_t>(validity.size()));
  for (bool v : validity) w.boolean(v);
  return hash_content(w.data());
}

Bytes encode_block(const Block& block) {
  codec::Writer w;
  w.u64(block.header.number).digest(block.header.prev_hash).digest(block.header.data_hash);
  w.u32(static_cast<std::uint32_t>(block.transactions.size()));
  for (const auto& tx : block.transactions) tx.encode(w);
  w.boolean(block.validity.has_value());
  if (block.validity) {
    w.u32(static_cast<std::uint32_t>(block.validity->size()));
    for (bool v : *block.validity) w.boolean(v);
  }
  w.digest(block.commit_hash);
  return std::move(w).take();
}

Block decode_block(ByteView data) {
  codec::Reader r(data);
  Block b;
  b.header.number = r.u64();
  b.header.prev_hash = r.digest();
  b.header.data_hash = r.digest();
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) b.transactions.push_back(Transaction::decode(r));
  if (r.boolean()) {
    const auto m = r.u32();
    std::vector<bool> flags;
    for (std::uint32_t i = 0; i < m; ++i) flags.push_back(r.boolean());
    b.validity = std::move(flags);
  }
  b.commit_hash = r.digest();
  r.finish();
  return b;
}

std::optional<Block> cut_block(std::deque<Transaction>& pending, const BlockPolicy& policy,
                               const BlockHeader& prev, bool timeout_expired) {
  if (pending.empty()) fail(Errc::EmptyQueue, "no pending transactions to cut");
  if (policy.max_txs == 0) fail(Errc::BadConfig, "max_txs must be positive");
  if (pending.size() < policy.max_txs && !timeout_expired) return std::nullopt;

  const std::size_t take = std::min<std::size_t>(pending.size(), policy.max_txs);
  Block b;
  b.transactions.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    b.transactions.push_back(std::move(pending.front()));
    pending.pop_front();
  }
  b.header.number = prev.number + 1;
  b.header.prev_hash = prev.digest();
  b.header.data_hash = compute_data_hash(b.transactions);
  return b;
}

const VersionedValue* WorldState::find(std::string_view key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<Bytes> WorldState::get(std::string_view key) const {
  const auto* v = find(key);
  if (v == nullptr) return std::nullopt;
  return v->value;
}

std::uint64_t WorldState::version(std::string_view key) const {
  const auto* v = find(key);
  return v == nullptr ? 0 : v->version;
}

void WorldState::apply(std::span<const WriteEntry> writes) {
  for (const auto& w : writes) {
    auto it = entries_.find(w.key);
    if (it == entries_.end()) {
      entries_.emplace(w.key, VersionedValue{w.value, 1});
    } else {
      it->second.value = w.value;
      ++it->second.version;
    }
  }
}

Block make_genesis_block() {
  Block g;
  g.header.number = 0;
  g.header.data_hash = compute_data_hash(std::span<const Transaction>{});
  g.validity = std::vector<bool>{};
  g.commit_hash = compute_commit_hash(Digest{}, g.header.digest(), {});
  return g;
}

Ledger::Ledger(std::string channel_id) : channel_id_(std::move(channel_id)) {
  blocks_.push_back(make_genesis_block());
}

namespace {

void check_extends(const Ledger& ledger, const Block& block) {
  const auto& last = ledger.last_header();
  if (block.header.number != last.number + 1) {
    fail(Errc::ChainGap, "expected block " + std::to_string(last.number + 1) + ", got " +
                             std::to_string(block.header.number));
  }
  if (block.header.prev_hash != last.digest()) {
    fail(Errc::HashMismatch, "prev_hash of block " + std::to_string(block.header.number));
  }
}

bool signatures_ok(const Transaction& tx, const identity::LicensingNode& membership) {
  if (!membership.accepts(tx.creator_cert)) return false;
  const Bytes signed_bytes = tx.signed_bytes();
  bool creator_signed = false;
  for (const auto& s : tx.signatures) {
    const identity::Certificate* cert = membership.find(s.signer_id);
    if (cert == nullptr || !membership.accepts(*cert)) return false;
    if (!identity::verify(cert->public_key, signed_bytes, s.signature)) return false;
    creator_signed = creator_signed || s.signer_id == tx.creator_cert.subject_id;
  }
  return creator_signed;
}

bool endorsements_ok(const Transaction& tx, const EndorsementPolicy& policy,
                     const identity::LicensingNode& membership) {
  const Bytes message = tx.endorsement_message();
  std::set<std::string_view> counted;
  for (const auto& e : tx.endorsements) {
    if (!policy.members.contains(e.peer_id) || counted.contains(e.peer_id)) continue;
    const identity::Certificate* cert = membership.find(e.peer_id);
    if (cert == nullptr || cert->role != identity::Role::Peer || !membership.accepts(*cert)) continue;
    if (!identity::verify(cert->public_key, message, e.signature)) continue;
    counted.insert(e.peer_id);
  }
  return counted.size() >= policy.required;
}

}  // namespace

std::vector<bool> validate_block(const Ledger& ledger, const Block& block,
                                 const EndorsementPolicy& policy,
                                 const identity::LicensingNode& membership) {
  check_extends(ledger, block);
  if (block.header.data_hash != compute_data_hash(block.transactions)) {
    fail(Errc::HashMismatch, "data_hash of block " + std::to_string(block.header.number));
  }

  std::vector<bool> flags;
  flags.reserve(block.transactions.size());
  std::unordered_set<std::string> written_in_block;
  for (const auto& tx : block.transactions) {
    bool ok = tx.compute_tx_id() == tx.tx_id && tx.channel_id == ledger.channel_id() &&
              signatures_ok(tx, membership) && endorsements_ok(tx, policy, membership);
    if (ok) {
      for (const auto& r : tx.rwset.reads) {
        if (written_in_block.contains(r.key) || ledger.state().version(r.key) != r.version) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      for (const auto& w : tx.rwset.writes) {
        if (written_in_block.contains(w.key)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      for (const auto& w : tx.rwset.writes) written_in_block.insert(w.key);
    }
    flags.push_back(ok);
  }
  return flags;
}

void apply_block(Ledger& ledger, Block block) {
  if (!block.validity || block.validity->size() != block.transactions.size()) {
    fail(Errc::NotValidated, "block " + std::to_string(block.header.number) + " has no validity flags");
  }
  check_extends(ledger, block);
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    if ((*block.validity)[i]) ledger.state_.apply(block.transactions[i].rwset.writes);
  }
  block.commit_hash =
      compute_commit_hash(ledger.blocks_.back().commit_hash, block.header.digest(), *block.validity);
  ledger.blocks_.push_back(std::move(block));
}

namespace {

// Checks block `b` at position `index` given its predecessor (nullptr for
// genesis).
bool block_links(const Block& b, std::uint64_t index, const Block* prev) {
  if (b.header.number != index) return false;
  const Digest expected_prev = prev == nullptr ? Digest{} : prev->header.digest();
  if (b.header.prev_hash != expected_prev) return false;
  for (const auto& tx : b.transactions) {
    if (tx.compute_tx_id() != tx.tx_id) return false;
  }
  if (b.header.data_hash != compute_data_hash(b.transactions)) return false;
  if (!b.validity || b.validity->size() != b.transactions.size()) return false;
  const Digest commit =
      compute_commit_hash(prev == nullptr ? Digest{} : prev->commit_hash, b.header.digest(), *b.validity);
  return commit == b.commit_hash;
}

}  // namespace

std::optional<std::uint64_t> first_bad_block(const Ledger& ledger) {
  const auto& blocks = ledger.blocks();
  for (std::uint64_t i = 0; i < blocks.size(); ++i) {
    if (!block_links(blocks[i], i, i == 0 ? nullptr : &blocks[i - 1])) return i;
  }
  return std::nullopt;
}

namespace {

std::optional<std::uint64_t> first_bad_from(std::span<const Bytes> blocks, std::optional<Block> prev) {
  const std::uint64_t base = prev ? prev->number() + 1 : 0;
  for (std::uint64_t i = 0; i < blocks.size(); ++i) {
    Block b;
    try {
      b = decode_block(blocks[i]);
    } catch (const Error&) {
      return base + i;
    }
    if (!block_links(b, base + i, prev ? &*prev : nullptr)) return base + i;
    prev = std::move(b);
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::uint64_t> first_bad_encoded_block(std::span<const Bytes> blocks) {
  return first_bad_from(blocks, std::nullopt);
}

std::optional<std::uint64_t> first_bad_encoded_block(std::span<const Bytes> blocks, const Block& anchor) {
  return first_bad_from(blocks, anchor);
}

WorldState replay(const Ledger& ledger) {
  WorldState state;
  for (const auto& b : ledger.blocks()) {
    if (!b.validity) continue;
    for (std::size_t i = 0; i < b.transactions.size(); ++i) {
      if ((*b.validity)[i]) state.apply(b.transactions[i].rwset.writes);
    }
  }
  return state;
}

}  // namespace medchain::ledger
