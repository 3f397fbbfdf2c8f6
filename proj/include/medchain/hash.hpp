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

#pragma once

#include "medchain/common.hpp"

namespace medchain::ledger {

/// SHA-256 of the input.
Digest hash_content(ByteView data);

inline Digest hash_content(std::string_view text) { return hash_content(as_bytes(text)); }

/// Incremental SHA-256 for digests over several fields.
class Hasher {
 public:
  Hasher();
  Hasher& update(ByteView data);
  Hasher& update(const Digest& d) { return update(d.view()); }
  Digest finish();

 private:
  alignas(64) unsigned char state_[208];
};

}  // namespace medchain::ledger
