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

// Run configuration and its JSON file form:
//
//   {
//     "network":    {"organizations": 2, "peers_per_org": 8, "endorsement_policy": 2,
//                    "block": {"max_txs": 10, "timeout": 2000}, "epoch_day": 20000},
//     "cost_model": {"endorse_cost": 4, ..., "sizes": {"sale": 300, ...}},
//     "scenario":   {"id": 1, "topology": "parallel", "workload": "sales", ...}
//   }
//
// Every section and key is optional; unknown keys are rejected.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medchain/bench.hpp"
#include "medchain/netsim.hpp"

namespace medchain::config {

struct RunConfig {
  netsim::NetworkConfig network;
  /// A "scenario" section in the config file replaces the built-in spec.
  std::optional<bench::ScenarioSpec> custom;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::vector<bench::ReportFormat> formats{bench::ReportFormat::Table, bench::ReportFormat::Delimited,
                                           bench::ReportFormat::Structured};
  bool trace = false;
  bool concurrent = false;
};

/// Applies a JSON config document on top of `config`; BadConfig on any
/// malformed, unknown or out-of-range field.
void apply_config_text(std::string_view text, RunConfig& config);
void apply_config_file(const std::string& path, RunConfig& config);

/// Resolved configuration for the given scenario specs, as sorted-key JSON.
std::string resolved_config_json(const RunConfig& config, const std::vector<bench::ScenarioSpec>& specs);

}  // namespace medchain::config
