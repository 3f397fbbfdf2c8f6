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

// Operator entry point.
//
//   medchain [run] --scenario N | --all [--seed S] [--config FILE] [--out DIR]
//                  [--format table,csv,json] [--trace] [--concurrent]
//   medchain verify DUMP            (or --verify DUMP)
//   medchain compare A.json B.json  (or --compare A B)
//   medchain roster FILE [--seed S]
//   medchain query --scenario N [--seed S] [--drug NAME] [--threshold T]
//
// Every flag can also be set through MEDCHAIN_<FLAG> in the environment,
// e.g. MEDCHAIN_SEED=7. Command-line values win.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace medchain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitUsage = 2;      // bad flags, config, scenario id or unparsable input
inline constexpr int kExitIntegrity = 3;  // a ledger failed verification

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace medchain::cli
