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

// Per-channel hash-chained block store and the derived key-value world state.
//
// Block i links to block i-1 through prev_hash = digest(header(i-1)), where a
// header is (number, prev_hash, data_hash). data_hash covers every
// transaction's id and full encoding. Validity flags are not part of the
// header; they are folded into a separate commit-hash chain so that a flag
// edit is detectable too.

#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medchain/codec.hpp"
#include "medchain/common.hpp"
#include "medchain/hash.hpp"
#include "medchain/identity.hpp"

namespace medchain::ledger {

enum class PayloadKind : std::uint8_t {
  RecordHealthAbstract,
  GrantPermission,
  RevokePermission,
  DelegateAuthority,
  RevokeDelegation,
  ShareHealthRecord,
  RegisterMedicineReceipt,
  SellMedicine,
  QueryDrug,
};

inline constexpr std::size_t kPayloadKindCount = 9;

std::string_view to_string(PayloadKind kind) noexcept;
PayloadKind payload_kind_from_u8(std::uint8_t raw);

struct ReadEntry {
  std::string key;
  std::uint64_t version = 0;  // 0 means the key was absent

  friend bool operator==(const ReadEntry&, const ReadEntry&) = default;
};

struct WriteEntry {
  std::string key;
  std::optional<Bytes> value;  // nullopt writes a tombstone

  friend bool operator==(const WriteEntry&, const WriteEntry&) = default;
};

struct RwSet {
  std::vector<ReadEntry> reads;
  std::vector<WriteEntry> writes;

  void encode(codec::Writer& w) const;
  static RwSet decode(codec::Reader& r);

  friend bool operator==(const RwSet&, const RwSet&) = default;
};

struct SignatureEntry {
  std::string signer_id;
  identity::Signature signature;

  friend bool operator==(const SignatureEntry&, const SignatureEntry&) = default;
};

struct Endorsement {
  std::string peer_id;
  identity::Signature signature;

  friend bool operator==(const Endorsement&, const Endorsement&) = default;
};

struct Transaction {
  Digest tx_id;
  std::string channel_id;
  Tick created_at = 0;
  std::uint64_t nonce = 0;
  PayloadKind kind = PayloadKind::QueryDrug;
  Bytes payload;  // canonical encoding of the contract action
  identity::Certificate creator_cert;
  std::vector<SignatureEntry> signatures;
  RwSet rwset;
  std::vector<Endorsement> endorsements;

  /// Bytes every listed signature covers.
  [[nodiscard]] Bytes signed_bytes() const;
  /// Digest over signed_bytes and the signature list.
  [[nodiscard]] Digest compute_tx_id() const;
  /// Bytes an endorsing peer signs: tx_id followed by the read/write set.
  [[nodiscard]] Bytes endorsement_message() const;

  void encode(codec::Writer& w) const;
  static Transaction decode(codec::Reader& r);
  [[nodiscard]] Bytes encoded() const;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Builds a transaction signed by its creator, with tx_id filled in.
Transaction make_transaction(std::string channel_id, Tick created_at, std::uint64_t nonce,
                             PayloadKind kind, Bytes payload, const identity::Identity& creator,
                             const identity::Certificate& creator_cert);

struct BlockHeader {
  std::uint64_t number = 0;
  Digest prev_hash;
  Digest data_hash;

  [[nodiscard]] Digest digest() const;

  friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

struct Block {
  BlockHeader header;
  std::vector<Transaction> transactions;
  std::optional<std::vector<bool>> validity;
  Digest commit_hash;  // zero until the block is applied

  [[nodiscard]] std::uint64_t number() const noexcept { return header.number; }

  friend bool operator==(const Block&, const Block&) = default;
};

Digest compute_data_hash(std::span<const Transaction> txs);
/// Same digest computed from (tx_id, content digest) pairs, as listed in a dump.
Digest compute_data_hash(std::span<const std::pair<Digest, Digest>> ids_and_digests);
Digest compute_commit_hash(const Digest& prev_commit, const Digest& header_digest,
                           const std::vector<bool>& validity);

Bytes encode_block(const Block& block);
/// Strict decoding; ParseError on any malformed or trailing byte.
Block decode_block(ByteView data);

struct BlockPolicy {
  std::uint32_t max_txs = 10;
  Tick timeout = 2000;

  friend bool operator==(const BlockPolicy&, const BlockPolicy&) = default;
};

/// Takes min(|pending|, max_txs) transactions in arrival order. Returns
/// nothing while the batch is short of max_txs and the timeout has not
/// expired. Throws EmptyQueue when pending is empty.
std::optional<Block> cut_block(std::deque<Transaction>& pending, const BlockPolicy& policy,
                               const BlockHeader& prev, bool timeout_expired);

struct VersionedValue {
  std::optional<Bytes> value;
  std::uint64_t version = 0;

  friend bool operator==(const VersionedValue&, const VersionedValue&) = default;
};

class WorldState {
 public:
  using Map = std::map<std::string, VersionedValue, std::less<>>;

  [[nodiscard]] const VersionedValue* find(std::string_view key) const;
  /// Live value, or nullopt for absent and tombstoned keys.
  [[nodiscard]] std::optional<Bytes> get(std::string_view key) const;
  [[nodiscard]] std::uint64_t version(std::string_view key) const;

  /// Every write bumps the key's version by one.
  void apply(std::span<const WriteEntry> writes);

  /// Live entries whose key starts with prefix, in key order.
  template <typename Fn>
  void for_each_prefix(std::string_view prefix, Fn&& fn) const {
    for (auto it = entries_.lower_bound(prefix); it != entries_.end(); ++it) {
      if (it->first.compare(0, prefix.size(), prefix) != 0) break;
      if (it->second.value) fn(it->first, *it->second.value, it->second.version);
    }
  }

  [[nodiscard]] const Map& entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  friend bool operator==(const WorldState&, const WorldState&) = default;

 private:
  Map entries_;
};

struct EndorsementPolicy {
  std::uint32_t required = 2;
  std::set<std::string, std::less<>> members;
};

class Ledger {
 public:
  /// Starts with the genesis block (number 0, no transactions).
  explicit Ledger(std::string channel_id);

  [[nodiscard]] const std::string& channel_id() const noexcept { return channel_id_; }
  [[nodiscard]] const std::vector<Block>& blocks() const noexcept { return blocks_; }
  [[nodiscard]] const WorldState& state() const noexcept { return state_; }
  [[nodiscard]] std::uint64_t height() const noexcept { return blocks_.size(); }
  [[nodiscard]] const BlockHeader& last_header() const { return blocks_.back().header; }

  /// Test hook for tamper experiments; production code never mutates a
  /// committed block.
  std::vector<Block>& mutable_blocks_for_testing() noexcept { return blocks_; }

 private:
  friend void apply_block(Ledger& ledger, Block block);

  std::string channel_id_;
  std::vector<Block> blocks_;
  WorldState state_;
};

Block make_genesis_block();

/// Flags each transaction valid iff its signatures verify, the endorsement
/// policy is met, and its read versions match current state with
/// first-writer-wins inside the block. ChainGap / HashMismatch on a block
/// that does not extend the ledger.
std::vector<bool> validate_block(const Ledger& ledger, const Block& block,
                                 const EndorsementPolicy& policy,
                                 const identity::LicensingNode& membership);

/// Applies valid write-sets in order and appends the block. NotValidated if
/// no flags are attached.
void apply_block(Ledger& ledger, Block block);

/// Index of the first block that breaks number/prev_hash/data_hash/commit
/// chain invariants, or nullopt if the chain is intact.
std::optional<std::uint64_t> first_bad_block(const Ledger& ledger);
inline bool verify_chain(const Ledger& ledger) { return !first_bad_block(ledger).has_value(); }

/// The same check over serialized blocks. A block that fails to decode
/// counts as bad.
std::optional<std::uint64_t> first_bad_encoded_block(std::span<const Bytes> blocks);
/// Checks a suffix: blocks[0] must link to the already verified `anchor`.
/// Returns the absolute number of the first bad block.
std::optional<std::uint64_t> first_bad_encoded_block(std::span<const Bytes> blocks, const Block& anchor);

/// Rebuilds world state by applying every valid write-set from genesis.
WorldState replay(const Ledger& ledger);

// Newline-delimited dump, one compact JSON object per block:
// {"commit_hash":..,"data_hash":..,"number":..,"prev_hash":..,"txs":[{"digest":..,"id":..,"valid":..}]}
std::string dump_block_line(const Block& block);
void write_dump(std::ostream& out, const Ledger& ledger);

struct DumpVerdict {
  bool ok = true;
  std::uint64_t blocks = 0;
  std::optional<std::uint64_t> bad_block;
  std::string reason;
};

DumpVerdict verify_dump(std::istream& in);

}  // namespace medchain::ledger
