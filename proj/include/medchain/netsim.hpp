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

// Deterministic discrete-event model of the endorse -> order -> validate ->
// commit pipeline.
//
// Timing model: every channel owns one sequential executor that all of its
// member peers share, so endorsements, block validation and queries on one
// channel never overlap in simulated time. Each channel's ordering service
// has its own timeline. Links add a fixed latency and clients cost nothing.
// Channels are fully independent, which is where parallel topologies gain
// their throughput.
//
// Traffic: a message of payload p adds message_overhead + p to the sender's
// bytes_out and the receiver's bytes_in when it is sent.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medchain/contracts.hpp"
#include "medchain/identity.hpp"
#include "medchain/ledger.hpp"

namespace medchain::netsim {

struct PayloadSizes {
  std::uint64_t sale = 300;
  std::uint64_t register_lot = 300;
  std::uint64_t record_abstract = 250;
  std::uint64_t grant = 200;
  std::uint64_t revoke = 150;
  std::uint64_t delegate = 150;
  std::uint64_t revoke_delegation = 150;
  std::uint64_t share = 350;
  std::uint64_t query_request = 120;
  std::uint64_t drug_record = 400;
  std::uint64_t error_response = 60;
  std::uint64_t block_header = 100;

  /// Size of a proposal, endorsement response, envelope or block entry.
  [[nodiscard]] std::uint64_t for_kind(ledger::PayloadKind kind) const noexcept;

  friend bool operator==(const PayloadSizes&, const PayloadSizes&) = default;
};

struct CostModel {
  Tick endorse_cost = 4;
  Tick validate_cost = 2;
  Tick commit_cost = 2;
  Tick order_cost = 1;
  Tick query_cost = 3;
  Tick link_latency = 1;
  std::uint64_t message_overhead = 200;
  PayloadSizes sizes;

  /// BadConfig unless every value is strictly positive.
  void validate() const;

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

enum class TopologyKind : std::uint8_t { Parallel, Integrated };

std::string_view to_string(TopologyKind kind) noexcept;
/// Accepts "parallel" / "integrated" (any case); BadConfig otherwise.
TopologyKind topology_from_string(std::string_view name);

struct NetworkConfig {
  TopologyKind kind = TopologyKind::Parallel;
  std::uint32_t organizations = 2;
  std::uint32_t peers_per_org = 8;
  std::uint32_t endorsement_policy = 2;
  ledger::BlockPolicy block;
  CostModel cost;
  std::uint64_t seed = 1;
  std::uint32_t epoch_day = contracts::kDefaultEpochDay;
  bool record_trace = true;

  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

enum class NodeKind : std::uint8_t { Peer, Orderer, Client };
std::string_view to_string(NodeKind kind) noexcept;

struct NodeStats {
  std::string node_id;
  NodeKind kind = NodeKind::Peer;
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;
  std::uint64_t work_units = 0;
  std::uint64_t messages_in = 0;
  std::uint64_t messages_out = 0;

  friend bool operator==(const NodeStats&, const NodeStats&) = default;
};

struct TrafficSnapshot {
  std::vector<NodeStats> nodes;  // peers, then orderers, then clients
  std::uint64_t total_in = 0;
  std::uint64_t total_out = 0;
  std::uint64_t total_work = 0;
  std::uint64_t messages = 0;

  friend bool operator==(const TrafficSnapshot&, const TrafficSnapshot&) = default;
};

enum class EventKind : std::uint8_t {
  ClientNext,
  ProposalArrive,
  EndorsementReturn,
  OrderSubmit,
  BlockCut,
  BlockDeliver,
  CommitDone,
  QueryArrive,
  QueryReturn,
};
std::string_view to_string(EventKind kind) noexcept;

struct TraceRecord {
  Tick tick = 0;
  std::uint32_t channel = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::ClientNext;
  std::string node;
  std::uint64_t ref = 0;  // operation id, or block number for block events

  [[nodiscard]] std::string to_line() const;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

enum class OutcomeStatus : std::uint8_t {
  Committed,
  Invalid,              // ordered but flagged invalid at validation
  Rejected,             // a contract precondition failed at endorsement
  EndorsementMismatch,  // endorsers returned different read/write sets
  QueryOk,
  QueryError,
};
std::string_view to_string(OutcomeStatus s) noexcept;

struct Outcome {
  std::string client_id;
  std::uint64_t op_id = 0;
  std::uint32_t channel = 0;
  ledger::PayloadKind kind = ledger::PayloadKind::QueryDrug;
  OutcomeStatus status = OutcomeStatus::Committed;
  std::optional<Errc> error;
  std::optional<Digest> tx_id;
  Tick submitted_at = 0;
  Tick completed_at = 0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct SubmitOptions {
  /// Channel index to use instead of the routed one.
  std::optional<std::uint32_t> channel;
  /// Corrupts the first endorsement signature after endorsement, producing a
  /// transaction that is ordered but fails validation.
  bool corrupt_endorsement = false;
};

struct Request {
  contracts::Action action;
  SubmitOptions options;
};

/// Closed-loop load source. The network asks for a client's next request
/// whenever that client becomes idle. In concurrent mode calls for clients of
/// different channels may overlap, so state must be per client.
class Driver {
 public:
  virtual ~Driver() = default;
  virtual std::optional<Request> on_ready(const std::string& client_id, Tick now) = 0;
  virtual void on_complete(const Outcome& outcome) { (void)outcome; }
};

enum class RunMode : std::uint8_t { Serial, Concurrent };

struct ChannelInfo {
  std::string channel_id;
  std::vector<std::string> members;
  std::string orderer_id;
};

class Network {
 public:
  explicit Network(NetworkConfig config);
  ~Network();
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  [[nodiscard]] const NetworkConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::size_t channel_count() const noexcept;
  [[nodiscard]] ChannelInfo channel_info(std::uint32_t channel) const;
  [[nodiscard]] const ledger::Ledger& ledger(std::uint32_t channel) const;
  [[nodiscard]] const ledger::EndorsementPolicy& endorsement_policy(std::uint32_t channel) const;
  [[nodiscard]] const identity::LicensingNode& licensing() const noexcept { return *licensing_; }
  [[nodiscard]] identity::LicensingNode& licensing() noexcept { return *licensing_; }
  [[nodiscard]] contracts::Context contract_context() const noexcept;

  /// Creates and certifies an actor. Keys derive from (id, role, config seed).
  const identity::Identity& enroll(const std::string& id, identity::Role role);
  [[nodiscard]] const identity::Identity* find_identity(std::string_view id) const;
  [[nodiscard]] const identity::Certificate& certificate(std::string_view id) const;

  /// Makes an enrolled actor a client affiliated with organization `org`
  /// (1-based). Its gateway peer is picked round-robin among that org's peers.
  void add_client(const std::string& id, std::uint32_t org);
  [[nodiscard]] std::vector<std::string> clients() const;

  /// Channel index a client's requests go to; UnknownClient if not a client.
  [[nodiscard]] std::uint32_t route_request(std::string_view client_id) const;
  [[nodiscard]] const std::string& route_request_id(std::string_view client_id) const;

  /// Schedules the full pipeline for `action` at tick `now`. Returns the
  /// operation id.
  std::uint64_t submit_transaction(const std::string& client_id, const contracts::Action& action, Tick now,
                                   const SubmitOptions& options = {});
  std::uint64_t submit_query(const std::string& client_id, const contracts::QueryDrug& query, Tick now,
                             const SubmitOptions& options = {});

  /// Commits a signed, endorsed transaction straight into the ledger without
  /// traffic or simulated time. Batches flush every max_txs transactions and
  /// on flush_preload; a batch must be conflict-free.
  void preload(const std::string& client_id, const contracts::Action& action);
  void flush_preload();

  /// Installs a driver and schedules the first ClientNext for every client.
  void start(Driver* driver, Tick at = 0);
  /// Detaches the driver; later completions schedule nothing.
  void clear_driver() noexcept;

  /// Processes events in (tick, channel, sequence) order until idle, or
  /// until every remaining event is later than `until`. Concurrent mode runs
  /// one thread per channel and requires channel-bound clients.
  std::uint64_t run(RunMode mode = RunMode::Serial, std::optional<Tick> until = std::nullopt);

  [[nodiscard]] TrafficSnapshot traffic_snapshot() const;
  /// Merged trace in (tick, channel, sequence) order.
  [[nodiscard]] std::vector<TraceRecord> trace() const;
  /// Completed operations in completion order.
  [[nodiscard]] std::vector<Outcome> outcomes() const;
  [[nodiscard]] std::uint64_t message_count() const;
  [[nodiscard]] std::uint64_t cross_channel_messages() const;
  [[nodiscard]] bool idle() const;
  [[nodiscard]] Tick now() const noexcept { return now_; }

 private:
  struct Impl;
  NetworkConfig config_;
  identity::Registry registry_;
  std::unique_ptr<identity::LicensingNode> licensing_;
  std::unique_ptr<Impl> impl_;
  Tick now_ = 0;
};

/// Convenience constructor with default policies.
std::unique_ptr<Network> build_topology(TopologyKind kind, std::uint32_t peers_per_org, const CostModel& cost,
                                        std::uint64_t seed);

}  // namespace medchain::netsim
