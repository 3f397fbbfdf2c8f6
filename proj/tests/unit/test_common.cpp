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

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "medchain/codec.hpp"
#include "medchain/common.hpp"
#include "medchain/hash.hpp"

namespace medchain {
namespace {

using ledger::Hasher;
using ledger::hash_content;

TEST(Hash, KnownVectors) {
  EXPECT_EQ(hash_content(std::string_view{}).hex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(hash_content(std::string_view{"abc"}).hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hash, IncrementalMatchesOneShot) {
  Hasher h;
  h.update(as_bytes("ab")).update(as_bytes("c"));
  EXPECT_EQ(h.finish(), hash_content(std::string_view{"abc"}));
}

TEST(Hash, SingleBitFlipChangesDigest) {
  std::mt19937_64 rng(2026);
  for (int i = 0; i < 1000; ++i) {
    Bytes data(1 + rng() % 256);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    const Digest before = hash_content(data);
    const std::size_t bit = rng() % (data.size() * 8);
    data[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    ASSERT_NE(before, hash_content(data)) << "input " << i;
  }
}

TEST(Hash, DistinctInputsDistinctDigests) {
  std::set<Digest> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(hash_content(std::to_string(i)));
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Hex, RoundTrip) {
  const Digest d = hash_content(std::string_view{"x"});
  EXPECT_EQ(Digest::from_hex(d.hex()), d);
  EXPECT_EQ(from_hex("00ff10"), (Bytes{0x00, 0xff, 0x10}));
  EXPECT_THROW(from_hex("0"), Error);
  EXPECT_THROW(from_hex("zz"), Error);
}

TEST(Codec, RoundTripAndStrictness) {
  codec::Writer w;
  w.u8(7).u32(0xdeadbeef).u64(1ull << 40).str("medchain").boolean(true).opt_u64(std::nullopt).opt_u64(5);
  const Bytes bytes = std::move(w).take();
  codec::Reader r(bytes);
  EXPECT_EQ(r.u8(), 7);
  EXPECT_EQ(r.u32(), 0xdeadbeefu);
  EXPECT_EQ(r.u64(), 1ull << 40);
  EXPECT_EQ(r.str(), "medchain");
  EXPECT_TRUE(r.boolean());
  EXPECT_EQ(r.opt_u64(), std::nullopt);
  EXPECT_EQ(r.opt_u64(), 5u);
  EXPECT_NO_THROW(r.finish());

  Bytes truncated(bytes.begin(), bytes.end() - 1);
  codec::Reader t(truncated);
  t.u8();
  t.u32();
  t.u64();
  t.str();
  t.boolean();
  t.opt_u64();
  EXPECT_THROW(t.opt_u64(), Error);
}

TEST(Errors, CodeAndMessage) {
  try {
    fail(Errc::BadConfig, "detail here");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadConfig);
    EXPECT_NE(std::string(e.what()).find("detail here"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("BadConfig"), std::string::npos);
  }
}

}  // namespace
}  // namespace medchain
