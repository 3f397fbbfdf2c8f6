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

#include "medchain/netsim.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <exception>
#include <queue>
#include <thread>
#include <tuple>

#include <fmt/format.h>

namespace medchain::netsim {

using identity::Role;
using ledger::PayloadKind;

std::uint64_t PayloadSizes::for_kind(PayloadKind kind) const noexcept {
  switch (kind) {
    case PayloadKind::RecordHealthAbstract: return record_abstract;
    case PayloadKind::GrantPermission: return grant;
    case PayloadKind::RevokePermission: return revoke;
    case PayloadKind::DelegateAuthority: return delegate;
    case PayloadKind::RevokeDelegation: return revoke_delegation;
    case PayloadKind::ShareHealthRecord: return share;
    case PayloadKind::RegisterMedicineReceipt: return register_lot;
    case PayloadKind::SellMedicine: return sale;
    case PayloadKind::QueryDrug: return query_request;
  }
  return 0;
}

void CostModel::validate() const {
  const std::pair<const char*, std::uint64_t> fields[] = {
      {"endorse_cost", endorse_cost},
      {"validate_cost", validate_cost},
      {"commit_cost", commit_cost},
      {"order_cost", order_cost},
      {"query_cost", query_cost},
      {"link_latency", link_latency},
      {"message_overhead", message_overhead},
      {"sizes.sale", sizes.sale},
      {"sizes.register_lot", sizes.register_lot},
      {"sizes.record_abstract", sizes.record_abstract},
      {"sizes.grant", sizes.grant},
      {"sizes.revoke", sizes.revoke},
      {"sizes.delegate", sizes.delegate},
      {"sizes.revoke_delegation", sizes.revoke_delegation},
      {"sizes.share", sizes.share},
      {"sizes.query_request", sizes.query_request},
      {"sizes.drug_record", sizes.drug_record},
      {"sizes.error_response", sizes.error_response},
      {"sizes.block_header", sizes.block_header},
  };
  for (const auto& [name, value] : fields) {
    if (value == 0) fail(Errc::BadConfig, fmt::format("cost model field {} must be positive", name));
  }
}

std::string_view to_string(TopologyKind kind) noexcept {
  return kind == TopologyKind::Parallel ? "parallel" : "integrated";
}

TopologyKind topology_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "parallel") return TopologyKind::Parallel;
  if (lower == "integrated") return TopologyKind::Integrated;
  fail(Errc::BadConfig, fmt::format("unknown topology '{}' (expected parallel or integrated)", name));
}

void NetworkConfig::validate() const {
  if (organizations == 0) fail(Errc::BadConfig, "organizations must be at least 1");
  if (peers_per_org == 0) fail(Errc::BadConfig, "peers_per_org must be at least 1");
  if (block.max_txs == 0) fail(Errc::BadConfig, "block max_txs must be at least 1");
  if (block.timeout == 0) fail(Errc::BadConfig, "block timeout must be positive");
  cost.validate();
  const std::uint64_t members =
      kind == TopologyKind::Parallel ? peers_per_org : std::uint64_t{peers_per_org} * organizations;
  if (endorsement_policy == 0 || endorsement_policy > members) {
    fail(Errc::BadConfig, fmt::format("endorsement_policy must be in 1..{}", members));
  }
}

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::Peer: return "peer";
    case NodeKind::Orderer: return "orderer";
    case NodeKind::Client: return "client";
  }
  return "?";
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::ClientNext: return "ClientNext";
    case EventKind::ProposalArrive: return "ProposalArrive";
    case EventKind::EndorsementReturn: return "EndorsementReturn";
    case EventKind::OrderSubmit: return "OrderSubmit";
    case EventKind::BlockCut: return "BlockCut";
    case EventKind::BlockDeliver: return "BlockDeliver";
    case EventKind::CommitDone: return "CommitDone";
    case EventKind::QueryArrive: return "QueryArrive";
    case EventKind::QueryReturn: return "QueryReturn";
  }
  return "?";
}

std::string_view to_string(OutcomeStatus s) noexcept {
  switch (s) {
    case OutcomeStatus::Committed: return "committed";
    case OutcomeStatus::Invalid: return "invalid";
    case OutcomeStatus::Rejected: return "rejected";
    case OutcomeStatus::EndorsementMismatch: return "endorsement-mismatch";
    case OutcomeStatus::QueryOk: return "query-ok";
    case OutcomeStatus::QueryError: return "query-error";
  }
  return "?";
}

std::string TraceRecord::to_line() const {
  return fmt::format("{} {} {} {} {} {}", tick, channel, seq, to_string(kind), node, ref);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kNoChannel = UINT32_MAX;
constexpr int kOpChannelShift = 40;

struct Event {
  Tick tick = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::ClientNext;
  std::uint32_t node = 0;
  std::uint64_t ref = 0;
  std::uint64_t aux = 0;  // endorser slot, or cut kind for BlockCut
  std::uint64_t epoch = 0;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.tick, a.seq) > std::tie(b.tick, b.seq);
  }
};

enum CutKind : std::uint64_t { kSizeCut = 0, kTimeoutCut = 1 };

struct NodeRec {
  NodeStats stats;
  std::uint32_t channel = kNoChannel;
  const identity::Identity* identity = nullptr;
};

struct ClientRec {
  std::uint32_t node = 0;
  std::string id;
  std::uint32_t org = 0;
  std::uint32_t home = 0;
  std::uint32_t gateway = 0;  // member index within the serving channel
  std::uint64_t nonce = 0;
  std::uint64_t queries = 0;
  const identity::Identity* identity = nullptr;
  const identity::Certificate* cert = nullptr;
};

struct Op {
  std::uint32_t client = 0;
  bool query = false;
  PayloadKind kind = PayloadKind::QueryDrug;
  SubmitOptions options;
  ledger::Transaction tx;
  std::string qr_code;
  std::uint32_t gateway_node = 0;
  std::vector<std::optional<ledger::RwSet>> rwsets;
  std::vector<ledger::Endorsement> endorsements;
  std::vector<std::optional<Errc>> errors;
  std::uint32_t responses = 0;
  std::optional<Errc> query_error;
  Tick submitted = 0;
};

struct InFlightBlock {
  std::vector<PayloadKind> kinds;
  std::vector<std::uint64_t> ops;
  std::vector<std::uint32_t> gateways;  // per op, the peer whose commit notifies the client
  std::optional<ledger::Block> block;  // moved into the ledger on first commit
  std::vector<bool> flags;
  std::uint32_t commits = 0;
};

struct OrderedOutcome {
  Tick tick;
  std::uint32_t channel;
  std::uint64_t seq;
  Outcome outcome;
};

struct Channel {
  std::uint32_t index = 0;
  std::string id;
  std::vector<std::uint32_t> members;  // node indexes
  std::uint32_t orderer = 0;
  ledger::Ledger ledger;
  ledger::EndorsementPolicy policy;

  std::priority_queue<Event, std::vector<Event>, Later> queue;
  std::uint64_t next_seq = 0;
  Tick executor_busy = 0;
  Tick orderer_busy = 0;
  Tick last_tick = 0;

  std::deque<ledger::Transaction> pending;
  std::deque<std::uint64_t> pending_ops;
  std::uint64_t epoch = 0;
  ledger::BlockHeader head;
  std::map<std::uint64_t, InFlightBlock> blocks;

  std::uint64_t next_op = 0;
  std::map<std::uint64_t, Op> ops;

  std::vector<TraceRecord> trace;
  std::vector<OrderedOutcome> outcomes;
  std::uint64_t outcome_seq = 0;
  std::uint64_t messages = 0;
  std::uint64_t cross_messages = 0;

  std::deque<ledger::Transaction> preload;

  explicit Channel(std::string channel_id) : id(channel_id), ledger(std::move(channel_id)) {
    head = ledger.last_header();
  }
};

}  // namespace

struct Network::Impl {
  Network& net;
  std::vector<NodeRec> nodes;
  std::vector<std::unique_ptr<Channel>> channels;
  std::vector<ClientRec> clients;
  std::map<std::string, std::uint32_t, std::less<>> client_index;
  std::map<std::string, std::uint32_t, std::less<>> node_index;
  std::vector<std::uint32_t> org_client_count;
  Driver* driver = nullptr;
  bool concurrent = false;

  explicit Impl(Network& n) : net(n) {}

  const CostModel& cost() const { return net.config_.cost; }

  void push(Channel& ch, Event ev) {
    ev.seq = ch.next_seq++;
    ch.queue.push(ev);
  }

  Tick reserve_executor(Channel& ch, Tick now, Tick cost_ticks, std::uint32_t node) {
    const Tick start = std::max(now, ch.executor_busy);
    ch.executor_busy = start + cost_ticks;
    nodes[node].stats.work_units += cost_ticks;
    return ch.executor_busy;
  }

  void send(Channel& ch, std::uint32_t from, std::uint32_t to, std::uint64_t payload) {
    const std::uint64_t bytes = cost().message_overhead + payload;
    auto& src = nodes[from];
    auto& dst = nodes[to];
    src.stats.bytes_out += bytes;
    src.stats.messages_out += 1;
    dst.stats.bytes_in += bytes;
    dst.stats.messages_in += 1;
    ch.messages += 1;
    if (src.channel != kNoChannel && dst.channel != kNoChannel && src.channel != dst.channel) {
      ch.cross_messages += 1;
    }
  }

  std::uint32_t index_of(std::string_view id) const {
    auto it = client_index.find(id);
    if (it == client_index.end()) fail(Errc::UnknownClient, std::string(id));
    return it->second;
  }
  const ClientRec& client_of(std::string_view id) const { return clients[index_of(id)]; }

  Channel& serving_channel(const ClientRec& c, const SubmitOptions& options) {
    const std::uint32_t index = options.channel.value_or(c.home);
    if (index >= channels.size()) fail(Errc::BadConfig, fmt::format("channel index {} out of range", index));
    if (concurrent && index != c.home) {
      fail(Errc::BadConfig, "concurrent mode requires clients to stay on their routed channel");
    }
    return *channels[index];
  }

  std::uint64_t new_op(Channel& ch, Op op) {
    const std::uint64_t id = (std::uint64_t{ch.index} << kOpChannelShift) | ch.next_op++;
    ch.ops.emplace(id, std::move(op));
    return id;
  }

  std::uint64_t submit_transaction(const std::string& client_id, const contracts::Action& action, Tick now,
                                   const SubmitOptions& options) {
    const std::uint32_t ci = index_of(client_id);
    auto& c = clients[ci];
    Channel& ch = serving_channel(c, options);
    const auto kind = contracts::kind_of(action);
    Op op;
    op.client = ci;
    op.kind = kind;
    op.options = options;
    op.submitted = now;
    op.tx = ledger::make_transaction(ch.id, now, c.nonce++, kind, contracts::encode_action(action), *c.identity,
                                     *c.cert);
    const std::uint32_t m = static_cast<std::uint32_t>(ch.members.size());
    const std::uint32_t n = ch.policy.required;
    op.gateway_node = ch.members[c.gateway % m];
    op.rwsets.resize(n);
    op.endorsements.resize(n);
    op.errors.resize(n);
    const std::uint64_t id = new_op(ch, std::move(op));
    for (std::uint32_t j = 0; j < n; ++j) {
      const std::uint32_t peer = ch.members[(c.gateway + j) % m];
      send(ch, c.node, peer, cost().sizes.for_kind(kind));
      push(ch, Event{now + cost().link_latency, 0, EventKind::ProposalArrive, peer, id, j, 0});
    }
    return id;
  }

  std::uint64_t submit_query(const std::string& client_id, const contracts::QueryDrug& query, Tick now,
                             const SubmitOptions& options) {
    const std::uint32_t ci = index_of(client_id);
    auto& c = clients[ci];
    Channel& ch = serving_channel(c, options);
    Op op;
    op.client = ci;
    op.query = true;
    op.kind = PayloadKind::QueryDrug;
    op.options = options;
    op.submitted = now;
    op.qr_code = query.qr_code;
    const std::uint32_t peer = ch.members[c.queries++ % ch.members.size()];
    const std::uint64_t id = new_op(ch, std::move(op));
    send(ch, c.node, peer, cost().sizes.query_request);
    push(ch, Event{now + cost().link_latency, 0, EventKind::QueryArrive, peer, id, 0, 0});
    return id;
  }

  void complete(Channel& ch, std::uint64_t op_id, OutcomeStatus status, std::optional<Errc> error, Tick now) {
    auto it = ch.ops.find(op_id);
    const Op& op = it->second;
    const ClientRec& c = clients[op.client];
    Outcome out;
    out.client_id = c.id;
    out.op_id = op_id;
    out.channel = ch.index;
    out.kind = op.kind;
    out.status = status;
    out.error = error;
    if (!op.query) out.tx_id = op.tx.tx_id;
    out.submitted_at = op.submitted;
    out.completed_at = now;
    ch.ops.erase(it);
    ch.outcomes.push_back({now, ch.index, ch.outcome_seq++, out});
    if (driver != nullptr) {
      driver->on_complete(out);
      push(*channels[c.home], Event{now, 0, EventKind::ClientNext, c.node, 0, 0, 0});
    }
  }

  void on_client_next(const Event& ev) {
    if (driver == nullptr) return;
    const auto& c = clients[client_index.at(nodes[ev.node].stats.node_id)];
    auto request = driver->on_ready(c.id, ev.tick);
    if (!request) return;
    if (const auto* q = std::get_if<contracts::QueryDrug>(&request->action)) {
      submit_query(c.id, *q, ev.tick, request->options);
    } else {
      submit_transaction(c.id, request->action, ev.tick, request->options);
    }
  }

  void on_proposal(Channel& ch, const Event& ev) {
    Op& op = ch.ops.at(ev.ref);
    const Tick done = reserve_executor(ch, ev.tick, cost().endorse_cost, ev.node);
    const auto slot = static_cast<std::size_t>(ev.aux);
    const auto& peer = *nodes[ev.node].identity;
    try {
      const auto& tx = op.tx;
      if (!net.licensing_->accepts(tx.creator_cert)) fail(Errc::BadCertificate, tx.creator_cert.subject_id);
      if (tx.signatures.empty() || tx.signatures.front().signer_id != tx.creator_cert.subject_id ||
          !identity::verify(tx.creator_cert.public_key, tx.signed_bytes(), tx.signatures.front().signature)) {
        fail(Errc::BadCreatorSignature, tx.creator_cert.subject_id);
      }
      const auto action = contracts::decode_action(tx.kind, tx.payload);
      auto rwset = contracts::execute(net.contract_context(), ch.ledger.state(), tx.creator_cert, action, ev.tick);
      ledger::Transaction signed_view;
      signed_view.tx_id = tx.tx_id;
      signed_view.rwset = rwset;
      op.endorsements[slot] = {peer.id(), peer.sign(signed_view.endorsement_message())};
      op.rwsets[slot] = std::move(rwset);
    } catch (const Error& e) {
      op.errors[slot] = e.code();
    }
    const std::uint64_t size = op.errors[slot] ? cost().sizes.error_response : cost().sizes.for_kind(op.kind);
    const std::uint32_t client_node = clients[op.client].node;
    send(ch, ev.node, client_node, size);
    push(ch, Event{done + cost().link_latency, 0, EventKind::EndorsementReturn, client_node, ev.ref, ev.aux, 0});
  }

  void on_endorsement_return(Channel& ch, const Event& ev) {
    Op& op = ch.ops.at(ev.ref);
    op.responses += 1;
    if (op.responses < op.rwsets.size()) return;
    for (const auto& e : op.errors) {
      if (e) return complete(ch, ev.ref, OutcomeStatus::Rejected, *e, ev.tick);
    }
    for (std::size_t i = 1; i < op.rwsets.size(); ++i) {
      if (*op.rwsets[i] != *op.rwsets[0]) {
        return complete(ch, ev.ref, OutcomeStatus::EndorsementMismatch, Errc::EndorsementMismatch, ev.tick);
      }
    }
    op.tx.rwset = std::move(*op.rwsets[0]);
    op.tx.endorsements = std::move(op.endorsements);
    op.rwsets.clear();
    if (op.options.corrupt_endorsement && !op.tx.endorsements.empty()) {
      op.tx.endorsements.front().signature.bytes[0] ^= 0x01;
    }
    send(ch, ev.node, ch.orderer, cost().sizes.for_kind(op.kind));
    push(ch, Event{ev.tick + cost().link_latency, 0, EventKind::OrderSubmit, ch.orderer, ev.ref, 0, 0});
  }

  void on_order_submit(Channel& ch, const Event& ev) {
    Op& op = ch.ops.at(ev.ref);
    ch.orderer_busy = std::max(ev.tick, ch.orderer_busy) + cost().order_cost;
    nodes[ch.orderer].stats.work_units += cost().order_cost;
    ch.pending.push_back(op.tx);
    ch.pending_ops.push_back(ev.ref);
    const auto& policy = net.config_.block;
    if (ch.pending.size() == policy.max_txs) {
      push(ch, Event{ch.orderer_busy, 0, EventKind::BlockCut, ch.orderer, 0, kSizeCut, ch.epoch});
    } else if (ch.pending.size() == 1) {
      push(ch, Event{ev.tick + policy.timeout, 0, EventKind::BlockCut, ch.orderer, 0, kTimeoutCut, ch.epoch});
    }
  }

  void on_block_cut(Channel& ch, const Event& ev) {
    if (ev.epoch != ch.epoch || ch.pending.empty()) return;
    const auto& policy = net.config_.block;
    auto block = ledger::cut_block(ch.pending, policy, ch.head, ev.aux == kTimeoutCut);
    if (!block) return;
    ch.head = block->header;
    ch.epoch += 1;
    InFlightBlock f;
    std::uint64_t payload = cost().sizes.block_header;
    for (const auto& tx : block->transactions) {
      f.kinds.push_back(tx.kind);
      payload += cost().sizes.for_kind(tx.kind);
      f.ops.push_back(ch.pending_ops.front());
      f.gateways.push_back(ch.ops.at(f.ops.back()).gateway_node);
      ch.pending_ops.pop_front();
    }
    const std::uint64_t number = block->header.number;
    f.block = std::move(block);
    ch.blocks.emplace(number, std::move(f));
    for (std::uint32_t peer : ch.members) {
      send(ch, ch.orderer, peer, payload);
      push(ch, Event{ev.tick + cost().link_latency, 0, EventKind::BlockDeliver, peer, number, 0, 0});
    }
    if (ch.pending.size() >= policy.max_txs) {
      push(ch, Event{std::max(ev.tick, ch.orderer_busy), 0, EventKind::BlockCut, ch.orderer, 0, kSizeCut, ch.epoch});
    } else if (!ch.pending.empty()) {
      push(ch, Event{ev.tick + policy.timeout, 0, EventKind::BlockCut, ch.orderer, 0, kTimeoutCut, ch.epoch});
    }
  }

  void on_block_deliver(Channel& ch, const Event& ev) {
    const auto& f = ch.blocks.at(ev.ref);
    const Tick per_tx = cost().validate_cost + cost().commit_cost;
    const Tick done = reserve_executor(ch, ev.tick, per_tx * f.kinds.size(), ev.node);
    push(ch, Event{done, 0, EventKind::CommitDone, ev.node, ev.ref, 0, 0});
  }

  void on_commit_done(Channel& ch, const Event& ev) {
    auto it = ch.blocks.find(ev.ref);
    InFlightBlock& f = it->second;
    if (f.block) {
      f.flags = ledger::validate_block(ch.ledger, *f.block, ch.policy, *net.licensing_);
      f.block->validity = f.flags;
      ledger::apply_block(ch.ledger, std::move(*f.block));
      f.block.reset();
    }
    for (std::size_t i = 0; i < f.ops.size(); ++i) {
      if (f.gateways[i] != ev.node) continue;
      if (f.flags[i]) {
        complete(ch, f.ops[i], OutcomeStatus::Committed, std::nullopt, ev.tick);
      } else {
        complete(ch, f.ops[i], OutcomeStatus::Invalid, Errc::NotValidated, ev.tick);
      }
    }
    if (++f.commits == ch.members.size()) ch.blocks.erase(it);
  }

  void on_query(Channel& ch, const Event& ev) {
    Op& op = ch.ops.at(ev.ref);
    const Tick done = reserve_executor(ch, ev.tick, cost().query_cost, ev.node);
    std::uint64_t size = cost().sizes.drug_record;
    try {
      (void)contracts::query_drug(ch.ledger.state(), op.qr_code);
    } catch (const Error& e) {
      op.query_error = e.code();
      size = cost().sizes.error_response;
    }
    const std::uint32_t client_node = clients[op.client].node;
    send(ch, ev.node, client_node, size);
    push(ch, Event{done + cost().link_latency, 0, EventKind::QueryReturn, client_node, ev.ref, 0, 0});
  }

  void on_query_return(Channel& ch, const Event& ev) {
    const auto err = ch.ops.at(ev.ref).query_error;
    complete(ch, ev.ref, err ? OutcomeStatus::QueryError : OutcomeStatus::QueryOk, err, ev.tick);
  }

  void process(Channel& ch, const Event& ev) {
    ch.last_tick = ev.tick;
    if (net.config_.record_trace) {
      ch.trace.push_back({ev.tick, ch.index, ev.seq, ev.kind, nodes[ev.node].stats.node_id, ev.ref});
    }
    switch (ev.kind) {
      case EventKind::ClientNext: on_client_next(ev); break;
      case EventKind::ProposalArrive: on_proposal(ch, ev); break;
      case EventKind::EndorsementReturn: on_endorsement_return(ch, ev); break;
      case EventKind::OrderSubmit: on_order_submit(ch, ev); break;
      case EventKind::BlockCut: on_block_cut(ch, ev); break;
      case EventKind::BlockDeliver: on_block_deliver(ch, ev); break;
      case EventKind::CommitDone: on_commit_done(ch, ev); break;
      case EventKind::QueryArrive: on_query(ch, ev); break;
      case EventKind::QueryReturn: on_query_return(ch, ev); break;
    }
  }

  std::uint64_t run_channel(Channel& ch, std::optional<Tick> until) {
    std::uint64_t count = 0;
    while (!ch.queue.empty()) {
      const Event ev = ch.queue.top();
      if (until && ev.tick > *until) break;
      ch.queue.pop();
      process(ch, ev);
      ++count;
    }
    return count;
  }

  std::uint64_t run_serial(std::optional<Tick> until) {
    std::uint64_t count = 0;
    for (;;) {
      Channel* next = nullptr;
      for (auto& ch : channels) {
        if (ch->queue.empty()) continue;
        if (next == nullptr || ch->queue.top().tick < next->queue.top().tick) next = ch.get();
      }
      if (next == nullptr) break;
      const Event ev = next->queue.top();
      if (until && ev.tick > *until) break;
      next->queue.pop();
      process(*next, ev);
      ++count;
    }
    return count;
  }

  std::uint64_t run_concurrent(std::optional<Tick> until) {
    std::vector<std::uint64_t> counts(channels.size(), 0);
    std::vector<std::exception_ptr> errors(channels.size());
    concurrent = true;
    {
      std::vector<std::jthread> workers;
      for (std::size_t i = 0; i < channels.size(); ++i) {
        workers.emplace_back([&, i] {
          try {
            counts[i] = run_channel(*channels[i], until);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
    }
    concurrent = false;
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    return total;
  }

  void flush_preload(Channel& ch) {
    if (ch.preload.empty()) return;
    if (!ch.blocks.empty() || !ch.pending.empty()) fail(Errc::BadConfig, "preload requires an idle channel");
    auto block = ledger::cut_block(ch.preload, net.config_.block, ch.ledger.last_header(), true);
    auto flags = ledger::validate_block(ch.ledger, *block, ch.policy, *net.licensing_);
    if (std::find(flags.begin(), flags.end(), false) != flags.end()) {
      fail(Errc::BadConfig, "preload batch contains an invalid transaction");
    }
    block->validity = std::move(flags);
    ledger::apply_block(ch.ledger, std::move(*block));
    ch.head = ch.ledger.last_header();
    if (!ch.preload.empty()) flush_preload(ch);
  }
};

// ---------------------------------------------------------------------------

Network::Network(NetworkConfig config) : config_(std::move(config)) {
  config_.validate();
  impl_ = std::make_unique<Impl>(*this);
  const auto& authority = registry_.generate_identity("licensing-0", Role::LicensingAuthority, config_.seed);
  licensing_ = std::make_unique<identity::LicensingNode>(authority);

  const std::uint32_t orgs = config_.organizations;
  const std::uint32_t n = config_.peers_per_org;
  auto add_node = [&](const std::string& id, NodeKind kind, std::uint32_t channel) {
    const Role role = kind == NodeKind::Peer ? Role::Peer : Role::Orderer;
    NodeRec rec;
    rec.stats.node_id = id;
    rec.stats.kind = kind;
    rec.channel = channel;
    rec.identity = &enroll(id, role);
    impl_->node_index.emplace(id, static_cast<std::uint32_t>(impl_->nodes.size()));
    impl_->nodes.push_back(std::move(rec));
    return static_cast<std::uint32_t>(impl_->nodes.size() - 1);
  };

  if (config_.kind == TopologyKind::Parallel) {
    for (std::uint32_t k = 1; k <= orgs; ++k) impl_->channels.push_back(std::make_unique<Channel>(fmt::format("channel-{}", k)));
  } else {
    impl_->channels.push_back(std::make_unique<Channel>("shared-channel"));
  }
  for (std::uint32_t k = 1; k <= orgs; ++k) {
    const std::uint32_t ch = config_.kind == TopologyKind::Parallel ? k - 1 : 0;
    for (std::uint32_t j = 0; j < n; ++j) {
      impl_->channels[ch]->members.push_back(add_node(fmt::format("p{}o{}", j, k), NodeKind::Peer, ch));
    }
  }
  for (std::uint32_t c = 0; c < impl_->channels.size(); ++c) {
    auto& ch = *impl_->channels[c];
    ch.index = c;
    ch.orderer = add_node(fmt::format("orderer{}", c), NodeKind::Orderer, c);
    ch.policy.required = config_.endorsement_policy;
    for (auto m : ch.members) ch.policy.members.insert(impl_->nodes[m].stats.node_id);
  }
  impl_->org_client_count.assign(orgs + 1, 0);
}

Network::~Network() = default;

std::size_t Network::channel_count() const noexcept { return impl_->channels.size(); }

ChannelInfo Network::channel_info(std::uint32_t channel) const {
  const auto& ch = *impl_->channels.at(channel);
  ChannelInfo info;
  info.channel_id = ch.id;
  for (auto m : ch.members) info.members.push_back(impl_->nodes[m].stats.node_id);
  info.orderer_id = impl_->nodes[ch.orderer].stats.node_id;
  return info;
}

const ledger::Ledger& Network::ledger(std::uint32_t channel) const { return impl_->channels.at(channel)->ledger; }

const ledger::EndorsementPolicy& Network::endorsement_policy(std::uint32_t channel) const {
  return impl_->channels.at(channel)->policy;
}

contracts::Context Network::contract_context() const noexcept {
  return contracts::Context{*licensing_, config_.epoch_day};
}

const identity::Identity& Network::enroll(const std::string& id, Role role) {
  const auto& ident = registry_.generate_identity(id, role, config_.seed);
  licensing_->issue(ident);
  return ident;
}

const identity::Identity* Network::find_identity(std::string_view id) const { return registry_.find(id); }

const identity::Certificate& Network::certificate(std::string_view id) const {
  const auto* cert = licensing_->find(id);
  if (cert == nullptr) fail(Errc::UnknownActor, std::string(id));
  return *cert;
}

void Network::add_client(const std::string& id, std::uint32_t org) {
  if (org == 0 || org > config_.organizations) {
    fail(Errc::BadConfig, fmt::format("organization {} out of range 1..{}", org, config_.organizations));
  }
  const auto* ident = registry_.find(id);
  if (ident == nullptr) fail(Errc::UnknownActor, id);
  if (impl_->client_index.contains(id) || impl_->node_index.contains(id)) fail(Errc::DuplicateId, id);

  ClientRec c;
  c.id = id;
  c.org = org;
  c.identity = ident;
  c.cert = &certificate(id);
  c.home = config_.kind == TopologyKind::Parallel ? org - 1 : 0;
  const std::uint32_t org_offset = config_.kind == TopologyKind::Parallel ? 0 : (org - 1) * config_.peers_per_org;
  c.gateway = org_offset + impl_->org_client_count[org]++ % config_.peers_per_org;

  NodeRec rec;
  rec.stats.node_id = id;
  rec.stats.kind = NodeKind::Client;
  rec.identity = ident;
  c.node = static_cast<std::uint32_t>(impl_->nodes.size());
  impl_->nodes.push_back(std::move(rec));
  impl_->node_index.emplace(id, c.node);
  impl_->client_index.emplace(id, static_cast<std::uint32_t>(impl_->clients.size()));
  impl_->clients.push_back(std::move(c));
}

std::vector<std::string> Network::clients() const {
  std::vector<std::string> out;
  for (const auto& c : impl_->clients) out.push_back(c.id);
  return out;
}

std::uint32_t Network::route_request(std::string_view client_id) const { return impl_->client_of(client_id).home; }

const std::string& Network::route_request_id(std::string_view client_id) const {
  return impl_->channels[route_request(client_id)]->id;
}

std::uint64_t Network::submit_transaction(const std::string& client_id, const contracts::Action& action, Tick now,
                                          const SubmitOptions& options) {
  if (std::holds_alternative<contracts::QueryDrug>(action)) {
    return submit_query(client_id, std::get<contracts::QueryDrug>(action), now, options);
  }
  return impl_->submit_transaction(client_id, action, now, options);
}

std::uint64_t Network::submit_query(const std::string& client_id, const contracts::QueryDrug& query, Tick now,
                                    const SubmitOptions& options) {
  return impl_->submit_query(client_id, query, now, options);
}

void Network::preload(const std::string& client_id, const contracts::Action& action) {
  auto& impl = *impl_;
  auto& c = impl.clients[impl.index_of(client_id)];
  auto& ch = *impl.channels[c.home];
  const auto kind = contracts::kind_of(action);
  auto tx = ledger::make_transaction(ch.id, 0, c.nonce++, kind, contracts::encode_action(action), *c.identity, *c.cert);
  tx.rwset = contracts::execute(contract_context(), ch.ledger.state(), *c.cert, action, 0);
  const Bytes message = tx.endorsement_message();
  for (std::uint32_t j = 0; j < ch.policy.required; ++j) {
    const auto& peer = *impl.nodes[ch.members[j]].identity;
    tx.endorsements.push_back({peer.id(), peer.sign(message)});
  }
  ch.preload.push_back(std::move(tx));
  if (ch.preload.size() >= config_.block.max_txs) impl.flush_preload(ch);
}

void Network::flush_preload() {
  for (auto& ch : impl_->channels) impl_->flush_preload(*ch);
}

void Network::start(Driver* driver, Tick at) {
  impl_->driver = driver;
  for (const auto& c : impl_->clients) {
    impl_->push(*impl_->channels[c.home], Event{at, 0, EventKind::ClientNext, c.node, 0, 0, 0});
  }
}

void Network::clear_driver() noexcept { impl_->driver = nullptr; }

std::uint64_t Network::run(RunMode mode, std::optional<Tick> until) {
  const std::uint64_t count = mode == RunMode::Serial ? impl_->run_serial(until) : impl_->run_concurrent(until);
  for (const auto& ch : impl_->channels) now_ = std::max(now_, ch->last_tick);
  return count;
}

TrafficSnapshot Network::traffic_snapshot() const {
  TrafficSnapshot snap;
  for (const auto& n : impl_->nodes) {
    snap.nodes.push_back(n.stats);
    snap.total_in += n.stats.bytes_in;
    snap.total_out += n.stats.bytes_out;
    snap.total_work += n.stats.work_units;
  }
  snap.messages = message_count();
  return snap;
}

std::vector<TraceRecord> Network::trace() const {
  std::vector<TraceRecord> out;
  for (const auto& ch : impl_->channels) out.insert(out.end(), ch->trace.begin(), ch->trace.end());
  std::sort(out.begin(), out.end(), [](const TraceRecord& a, const TraceRecord& b) {
    return std::tie(a.tick, a.channel, a.seq) < std::tie(b.tick, b.channel, b.seq);
  });
  return out;
}

std::vector<Outcome> Network::outcomes() const {
  std::vector<const OrderedOutcome*> all;
  for (const auto& ch : impl_->channels) {
    for (const auto& o : ch->outcomes) all.push_back(&o);
  }
  std::sort(all.begin(), all.end(), [](const OrderedOutcome* a, const OrderedOutcome* b) {
    return std::tie(a->tick, a->channel, a->seq) < std::tie(b->tick, b->channel, b->seq);
  });
  std::vector<Outcome> out;
  out.reserve(all.size());
  for (const auto* o : all) out.push_back(o->outcome);
  return out;
}

std::uint64_t Network::message_count() const {
  std::uint64_t total = 0;
  for (const auto& ch : impl_->channels) total += ch->messages;
  return total;
}

std::uint64_t Network::cross_channel_messages() const {
  std::uint64_t total = 0;
  for (const auto& ch : impl_->channels) total += ch->cross_messages;
  return total;
}

bool Network::idle() const {
  return std::all_of(impl_->channels.begin(), impl_->channels.end(),
                     [](const auto& ch) { return ch->queue.empty(); });
}

std::unique_ptr<Network> build_topology(TopologyKind kind, std::uint32_t peers_per_org, const CostModel& cost,
                                        std::uint64_t seed) {
  NetworkConfig config;
  config.kind = kind;
  config.peers_per_org = peers_per_org;
  config.cost = cost;
  config.seed = seed;
  if (config.endorsement_policy > peers_per_org * (kind == TopologyKind::Parallel ? 1U : config.organizations)) {
    config.endorsement_policy = 1;
  }
  return std::make_unique<Network>(std::move(config));
}

}  // namespace medchain::netsim
