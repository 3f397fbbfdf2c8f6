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

// Scenario harness: provisions actors and drug stock, drives a closed-loop
// workload through netsim, and turns the result into a metrics report.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "medchain/contracts.hpp"
#include "medchain/netsim.hpp"

namespace medchain::bench {

enum class WorkloadKind : std::uint8_t { SalesRegistration, InfoRetrieval };
std::string_view to_string(WorkloadKind kind) noexcept;
WorkloadKind workload_from_string(std::string_view name);

/// How retrieval clients pick the channel for a lookup.
enum class RetrievalDispatch : std::uint8_t {
  Affinity,         // each client queries its own channel for drugs held there
  SequentialProbe,  // own channel first, then the other channels on UnknownLot
  SingleChannel,    // every client queries channel 0 only
};
std::string_view to_string(RetrievalDispatch d) noexcept;
RetrievalDispatch dispatch_from_string(std::string_view name);

struct ScenarioSpec {
  std::uint32_t id = 0;
  netsim::TopologyKind topology = netsim::TopologyKind::Parallel;
  WorkloadKind workload = WorkloadKind::SalesRegistration;
  std::uint64_t tx_or_query_total = 0;
  std::uint64_t drugs_preloaded_per_ledger = 0;
  std::uint32_t clients = 20;
  RetrievalDispatch dispatch = RetrievalDispatch::Affinity;
  std::uint64_t lot_quantity = 600;
  std::uint32_t doctors_per_org = 2;
  std::uint32_t patients_per_org = 50;

  /// BadConfig on inconsistent fields.
  void validate(const netsim::NetworkConfig& network) const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

inline constexpr std::uint32_t kScenarioCount = 5;

/// BadScenarioId unless 1 <= id <= 5.
ScenarioSpec builtin_scenario(std::int64_t id);

/// Seeded generator. The standard distributions are implementation-defined,
/// so index draws and shuffles are done by hand for cross-platform streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n) by rejection sampling; n must be positive.
  std::uint64_t index(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct LotPlan {
  std::string qr_code;
  std::string name;
  std::string pharmacy_id;
  std::uint32_t channel = 0;
};

/// Deterministic actor and stock layout for a scenario.
struct Cast {
  std::vector<std::string> pharmacies;  // the clients, org-major order
  std::vector<std::uint32_t> pharmacy_org;
  std::map<std::uint32_t, std::vector<std::string>> doctors;   // by org
  std::map<std::uint32_t, std::vector<std::string>> hospitals;
  std::map<std::uint32_t, std::vector<std::string>> patients;
  std::vector<LotPlan> lots;
};

Cast plan_cast(const ScenarioSpec& spec, const netsim::NetworkConfig& network);

/// Enrolls every actor of the cast, registers clients and preloads stock.
void provision(netsim::Network& network, const ScenarioSpec& spec, const Cast& cast);

struct ClientStream {
  std::string client_id;
  std::vector<netsim::Request> requests;
};

struct Workload {
  std::vector<ClientStream> streams;  // in client order

  [[nodiscard]] std::uint64_t total() const noexcept;
};

/// Per-client request streams. Each client gets total / clients requests,
/// the first total % clients clients one more.
Workload generate_workload(const ScenarioSpec& spec, const Cast& cast, const netsim::Network& network,
                           std::uint64_t seed);

struct NodeRow {
  std::string node_id;
  netsim::NodeKind kind = netsim::NodeKind::Peer;
  std::uint64_t work_units = 0;
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;

  friend bool operator==(const NodeRow&, const NodeRow&) = default;
};

struct MetricsReport {
  std::uint32_t scenario_id = 0;
  std::uint64_t seed = 0;
  netsim::TopologyKind topology = netsim::TopologyKind::Parallel;
  WorkloadKind workload = WorkloadKind::SalesRegistration;
  std::vector<NodeRow> rows;
  std::uint64_t total_in = 0;
  std::uint64_t total_out = 0;
  std::uint64_t total_bytes = 0;
  std::uint64_t total_work = 0;
  std::uint64_t requests = 0;   // operations the workload issued
  std::uint64_t completed = 0;  // committed transactions or successful lookups
  std::uint64_t failed = 0;
  std::uint64_t messages = 0;
  std::uint64_t cross_channel_messages = 0;
  Tick elapsed_ticks = 0;
  double throughput = 0.0;  // completed per simulated second

  /// Recomputes aggregates from rows and throughput from completed/elapsed.
  void finalize();

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct RunOptions {
  netsim::RunMode mode = netsim::RunMode::Serial;
  /// Number of sales from the first client whose endorsements get corrupted.
  std::uint64_t inject_invalid = 0;
};

struct ScenarioResult {
  MetricsReport report;
  std::unique_ptr<netsim::Network> network;
  Cast cast;
};

/// Builds the network from `network` (topology taken from `spec`, seed
/// from `seed`), provisions, runs to quiescence and verifies every chain.
/// IntegrityFailure if a chain does not verify.
ScenarioResult run_scenario(const ScenarioSpec& spec, const netsim::NetworkConfig& network, std::uint64_t seed,
                            const RunOptions& options = {});

enum class ReportFormat : std::uint8_t { Table, Delimited, Structured };
/// "table", "delimited"/"csv", "structured"/"json"; UnsupportedFormat otherwise.
ReportFormat format_from_string(std::string_view name);
std::string_view extension(ReportFormat format) noexcept;
std::string report_file_name(const MetricsReport& report, ReportFormat format);

std::string emit_report(const MetricsReport& report, ReportFormat format);
/// Parses the structured format; ParseError on anything else.
MetricsReport parse_report(std::string_view text);

struct MetricDelta {
  std::string metric;
  double a = 0;
  double b = 0;
  double delta = 0;             // a - b
  std::optional<double> ratio;  // a / b, nullopt when b == 0
};

struct Comparison {
  std::uint32_t scenario_a = 0;
  std::uint32_t scenario_b = 0;
  std::optional<double> throughput_ratio;
  std::optional<double> traffic_ratio;
  std::vector<MetricDelta> metrics;
};

Comparison compare_reports(const MetricsReport& a, const MetricsReport& b);
std::string render_comparison(const Comparison& c);

}  // namespace medchain::bench
