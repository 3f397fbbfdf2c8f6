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

#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "medchain/ledger.hpp"

namespace medchain::ledger {

namespace {

using json = nlohmann::json;

struct DumpedBlock {
  BlockHeader header;
  std::vector<std::pair<Digest, Digest>> txs;
  std::vector<bool> validity;
  Digest commit_hash;
};

void require_keys(const json& obj, std::initializer_list<const char*> keys) {
  if (!obj.is_object() || obj.size() != keys.size()) fail(Errc::ParseError, "unexpected field set");
  for (const char* k : keys) {
    if (!obj.contains(k)) fail(Errc::ParseError, std::string("missing field ") + k);
  }
}

Digest digest_field(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) fail(Errc::ParseError, std::string(key) + " must be a string");
  return Digest::from_hex(v.get_ref<const std::string&>());
}

DumpedBlock parse_line(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(Errc::ParseError, e.what());
  }
  require_keys(obj, {"commit_hash", "data_hash", "number", "prev_hash", "txs"});
  DumpedBlock b;
  const json& number = obj.at("number");
  if (!number.is_number_unsigned()) fail(Errc::ParseError, "number must be unsigned");
  b.header.number = number.get<std::uint64_t>();
  b.header.prev_hash = digest_field(obj, "prev_hash");
  b.header.data_hash = digest_field(obj, "data_hash");
  b.commit_hash = digest_field(obj, "commit_hash");
  const json& txs = obj.at("txs");
  if (!txs.is_array()) fail(Errc::ParseError, "txs must be an array");
  for (const json& tx : txs) {
    require_keys(tx, {"digest", "id", "valid"});
    if (!tx.at("valid").is_boolean()) fail(Errc::ParseError, "valid must be boolean");
    b.txs.emplace_back(digest_field(tx, "id"), digest_field(tx, "digest"));
    b.validity.push_back(tx.at("valid").get<bool>());
  }
  return b;
}

}  // namespace

std::string dump_block_line(const Block& block) {
  json txs = json::array();
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    const auto& tx = block.transactions[i];
    const bool valid = block.validity && (*block.validity)[i];
    txs.push_back({{"id", tx.tx_id.hex()}, {"digest", hash_content(tx.encoded()).hex()}, {"valid", valid}});
  }
  json obj = {
      {"number", block.header.number},
      {"prev_hash", block.header.prev_hash.hex()},
      {"data_hash", block.header.data_hash.hex()},
      {"commit_hash", block.commit_hash.hex()},
      {"txs", std::move(txs)},
  };
  return obj.dump();
}

void write_dump(std::ostream& out, const Ledger& ledger) {
  for (const auto& b : ledger.blocks()) out << dump_block_line(b) << '\n';
}

DumpVerdict verify_dump(std::istream& in) {
  DumpVerdict verdict;
  std::string line;
  std::optional<DumpedBlock> prev;
  std::uint64_t index = 0;
  auto reject = [&](std::string reason) {
    verdict.ok = false;
    verdict.bad_block = index;
    verdict.reason = std::move(reason);
    return verdict;
  };

  while (std::getline(in, line)) {
    DumpedBlock b;
    try {
      b = parse_line(line);
    } catch (const Error& e) {
      return reject(std::string("malformed record: ") + e.what());
    }
    if (b.header.number != index) return reject("block number out of sequence");
    const Digest expected_prev = prev ? prev->header.digest() : Digest{};
    if (b.header.prev_hash != expected_prev) return reject("prev_hash does not match previous header");
    if (b.header.data_hash != compute_data_hash(std::span<const std::pair<Digest, Digest>>(b.txs))) {
      return reject("data_hash does not match transaction list");
    }
    const Digest expected_commit =
        compute_commit_hash(prev ? prev->commit_hash : Digest{}, b.header.digest(), b.validity);
    if (b.commit_hash != expected_commit) return reject("commit_hash does not match validity flags");
    prev = std::move(b);
    ++index;
  }
  verdict.blocks = index;
  return verdict;
}

}  // namespace medchain::ledger
