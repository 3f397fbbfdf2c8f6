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

// Canonical binary encoding. Field order is fixed by the caller, integers
// are big-endian, and variable-length data is prefixed with a u32 length.
// Every digest in the system is computed over bytes produced here, so the
// encoding must never depend on host byte order or struct layout.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "medchain/common.hpp"

namespace medchain::codec {

class Writer {
 public:
  Writer& u8(std::uint8_t v) {
    buf_.push_back(v);
    return *this;
  }
  Writer& boolean(bool v) { return u8(v ? 1 : 0); }
  Writer& u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
  }
  Writer& u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
  }
  Writer& raw(ByteView data) {
    buf_.insert(buf_.end(), data.begin(), data.end());
    return *this;
  }
  Writer& bytes(ByteView data) {
    u32(static_cast<std::uint32_t>(data.size()));
    return raw(data);
  }
  Writer& str(std::string_view s) { return bytes(as_bytes(s)); }
  Writer& digest(const Digest& d) { return raw(d.bytes); }
  template <std::size_t N>
  Writer& fixed(const std::array<std::uint8_t, N>& a) {
    return raw(a);
  }
  Writer& opt_u64(const std::optional<std::uint64_t>& v) {
    boolean(v.has_value());
    if (v) u64(*v);
    return *this;
  }

  [[nodiscard]] const Bytes& data() const& noexcept { return buf_; }
  [[nodiscard]] Bytes take() && noexcept { return std::move(buf_); }

 private:
  Bytes buf_;
};

/// Strict reader: any underflow, non-canonical boolean, or trailing byte
/// (via finish()) raises ParseError.
class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  bool boolean() {
    const auto v = u8();
    if (v > 1) fail(Errc::ParseError, "non-canonical boolean");
    return v == 1;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  Bytes bytes() {
    const auto n = u32();
    need(n);
    Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
              data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string out(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return out;
  }
  Digest digest() {
    Digest d;
    fixed(d.bytes);
    return d;
  }
  template <std::size_t N>
  void fixed(std::array<std::uint8_t, N>& out) {
    need(N);
    for (std::size_t i = 0; i < N; ++i) out[i] = data_[pos_++];
  }
  std::optional<std::uint64_t> opt_u64() {
    if (!boolean()) return std::nullopt;
    return u64();
  }

  [[nodiscard]] bool done() const noexcept { return pos_ == data_.size(); }
  void finish() const {
    if (!done()) fail(Errc::ParseError, "trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail(Errc::ParseError, "truncated input");
  }

  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace medchain::codec
