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

#include "medchain/bench.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>

#include <fmt/format.h>

namespace medchain::bench {

using identity::Role;
using netsim::TopologyKind;

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

constexpr std::array<std::string_view, 20> kDrugCatalog = {
    "amoxicillin", "atorvastatin", "azithromycin", "cetirizine",  "ciprofloxacin", "clopidogrel", "diclofenac",
    "enalapril",   "fluoxetine",   "ibuprofen",    "insulin",     "levothyroxine", "lisinopril",  "losartan",
    "metformin",   "omeprazole",   "paracetamol",  "prednisone",  "salbutamol",    "warfarin",
};

constexpr std::uint32_t kLotShelfDays = 365;

std::uint32_t ledger_count(const ScenarioSpec& spec, const netsim::NetworkConfig& net) {
  return spec.topology == TopologyKind::Parallel ? net.organizations : 1;
}

std::uint32_t channel_of_org(const ScenarioSpec& spec, std::uint32_t org) {
  return spec.topology == TopologyKind::Parallel ? org - 1 : 0;
}

// Splits `total` into `parts` shares; the first total % parts get one more.
std::vector<std::uint64_t> quotas(std::uint64_t total, std::size_t parts) {
  std::vector<std::uint64_t> out(parts, parts == 0 ? 0 : total / parts);
  for (std::size_t i = 0; i < parts && i < total % parts; ++i) out[i] += 1;
  return out;
}

class ScenarioDriver final : public netsim::Driver {
 public:
  ScenarioDriver(const Workload& workload, const std::vector<std::uint32_t>& homes, std::uint32_t channels,
                 RetrievalDispatch dispatch)
      : channels_(channels), dispatch_(dispatch) {
    for (std::size_t i = 0; i < workload.streams.size(); ++i) {
      index_.emplace(workload.streams[i].client_id, i);
      State st;
      st.stream = &workload.streams[i];
      st.home = homes[i];
      states_.push_back(std::move(st));
    }
  }

  std::optional<netsim::Request> on_ready(const std::string& client_id, Tick) override {
    auto& st = states_[index_.at(client_id)];
    if (st.retry) {
      auto req = std::move(*st.retry);
      st.retry.reset();
      return req;
    }
    if (st.next >= st.stream->requests.size()) return std::nullopt;
    st.probes = 0;
    st.last = st.next;
    return st.stream->requests[st.next++];
  }

  void on_complete(const netsim::Outcome& outcome) override {
    if (dispatch_ != RetrievalDispatch::SequentialProbe) return;
    if (outcome.status != netsim::OutcomeStatus::QueryError || outcome.error != Errc::UnknownLot) return;
    auto& st = states_[index_.at(outcome.client_id)];
    st.probes += 1;
    if (st.probes >= channels_) return;
    netsim::Request retry = st.stream->requests[st.last];
    retry.options.channel = (st.home + st.probes) % channels_;
    st.retry = std::move(retry);
  }

 private:
  struct State {
    const ClientStream* stream = nullptr;
    std::uint32_t home = 0;
    std::size_t next = 0;
    std::size_t last = 0;
    std::uint32_t probes = 0;
    std::optional<netsim::Request> retry;
  };

  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<State> states_;
  std::uint32_t channels_;
  RetrievalDispatch dispatch_;
};

}  // namespace

std::string_view to_string(WorkloadKind kind) noexcept {
  return kind == WorkloadKind::SalesRegistration ? "sales-registration" : "info-retrieval";
}

WorkloadKind workload_from_string(std::string_view name) {
  const auto n = lowercase(name);
  if (n == "sales-registration" || n == "sales") return WorkloadKind::SalesRegistration;
  if (n == "info-retrieval" || n == "retrieval") return WorkloadKind::InfoRetrieval;
  fail(Errc::BadConfig, fmt::format("unknown workload '{}' (expected sales or retrieval)", name));
}

std::string_view to_string(RetrievalDispatch d) noexcept {
  switch (d) {
    case RetrievalDispatch::Affinity: return "affinity";
    case RetrievalDispatch::SequentialProbe: return "sequential-probe";
    case RetrievalDispatch::SingleChannel: return "single-channel";
  }
  return "?";
}

RetrievalDispatch dispatch_from_string(std::string_view name) {
  const auto n = lowercase(name);
  if (n == "affinity") return RetrievalDispatch::Affinity;
  if (n == "sequential-probe") return RetrievalDispatch::SequentialProbe;
  if (n == "single-channel") return RetrievalDispatch::SingleChannel;
  fail(Errc::BadConfig,
       fmt::format("unknown dispatch '{}' (expected affinity, sequential-probe or single-channel)", name));
}

void ScenarioSpec::validate(const netsim::NetworkConfig& network) const {
  if (clients < network.organizations) {
    fail(Errc::BadConfig, fmt::format("need at least {} clients, one per organization", network.organizations));
  }
  if (tx_or_query_total == 0) fail(Errc::BadConfig, "tx_or_query_total must be positive");
  if (drugs_preloaded_per_ledger == 0) fail(Errc::BadConfig, "drugs_preloaded_per_ledger must be positive");
  if (doctors_per_org == 0 || patients_per_org == 0) fail(Errc::BadConfig, "each org needs doctors and patients");
  if (lot_quantity == 0) fail(Errc::BadConfig, "lot_quantity must be positive");
  if (workload == WorkloadKind::SalesRegistration) {
    const std::uint64_t orgs = network.organizations;
    const std::uint64_t holders = topology == TopologyKind::Parallel ? (clients + orgs - 1) / orgs : clients;
    if (drugs_preloaded_per_ledger < holders) {
      fail(Errc::BadConfig, fmt::format("every pharmacy needs a lot to sell from: drugs_preloaded_per_ledger must be "
                                        "at least {}",
                                        holders));
    }
  }
}

ScenarioSpec builtin_scenario(std::int64_t id) {
  if (id < 1 || id > kScenarioCount) {
    fail(Errc::BadScenarioId, fmt::format("scenario id {} is out of range; valid range is 1..{}", id, kScenarioCount));
  }
  ScenarioSpec s;
  s.id = static_cast<std::uint32_t>(id);
  switch (id) {
    case 1:
      s.topology = TopologyKind::Parallel;
      s.workload = WorkloadKind::SalesRegistration;
      s.tx_or_query_total = 10'000;
      s.drugs_preloaded_per_ledger = 50;
      break;
    case 2:
      s.topology = TopologyKind::Integrated;
      s.workload = WorkloadKind::SalesRegistration;
      s.tx_or_query_total = 10'000;
      s.drugs_preloaded_per_ledger = 100;
      break;
    case 3:
      s.topology = TopologyKind::Parallel;
      s.workload = WorkloadKind::InfoRetrieval;
      s.drugs_preloaded_per_ledger = 500;
      s.tx_or_query_total = 1'000;
      break;
    case 4:
      s.topology = TopologyKind::Parallel;
      s.workload = WorkloadKind::InfoRetrieval;
      s.drugs_preloaded_per_ledger = 1'000;
      s.tx_or_query_total = 2'000;
      s.dispatch = RetrievalDispatch::SequentialProbe;
      break;
    default:
      s.topology = TopologyKind::Integrated;
      s.workload = WorkloadKind::InfoRetrieval;
      s.drugs_preloaded_per_ledger = 1'000;
      s.tx_or_query_total = 1'000;
      break;
  }
  return s;
}

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) fail(Errc::BadConfig, "Rng::index of an empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

Cast plan_cast(const ScenarioSpec& spec, const netsim::NetworkConfig& network) {
  Cast cast;
  const std::uint32_t orgs = network.organizations;
  std::vector<std::uint32_t> per_org(orgs + 1, 0);
  for (std::uint32_t i = 0; i < spec.clients; ++i) {
    const std::uint32_t org = static_cast<std::uint32_t>(std::uint64_t{i} * orgs / spec.clients) + 1;
    cast.pharmacies.push_back(fmt::format("pharmacy-{}-o{}", per_org[org]++, org));
    cast.pharmacy_org.push_back(org);
  }
  for (std::uint32_t k = 1; k <= orgs; ++k) {
    for (std::uint32_t j = 0; j < spec.doctors_per_org; ++j) cast.doctors[k].push_back(fmt::format("doctor-{}-o{}", j, k));
    cast.hospitals[k].push_back(fmt::format("hospital-o{}", k));
    for (std::uint32_t j = 0; j < spec.patients_per_org; ++j) {
      cast.patients[k].push_back(fmt::format("patient-{:02}-o{}", j, k));
    }
  }
  const std::uint32_t ledgers = ledger_count(spec, network);
  for (std::uint32_t l = 0; l < ledgers; ++l) {
    std::vector<std::string> holders;
    for (std::size_t i = 0; i < cast.pharmacies.size(); ++i) {
      if (channel_of_org(spec, cast.pharmacy_org[i]) == l) holders.push_back(cast.pharmacies[i]);
    }
    for (std::uint64_t i = 0; i < spec.drugs_preloaded_per_ledger; ++i) {
      cast.lots.push_back(LotPlan{fmt::format("QR-{}-{:05}", l + 1, i), std::string(kDrugCatalog[i % kDrugCatalog.size()]),
                                  holders[i % holders.size()], l});
    }
  }
  return cast;
}

void provision(netsim::Network& network, const ScenarioSpec& spec, const Cast& cast) {
  for (std::size_t i = 0; i < cast.pharmacies.size(); ++i) {
    network.enroll(cast.pharmacies[i], Role::Pharmacy);
    network.add_client(cast.pharmacies[i], cast.pharmacy_org[i]);
  }
  for (const auto& [org, ids] : cast.doctors) {
    for (const auto& id : ids) network.enroll(id, Role::Doctor);
  }
  for (const auto& [org, ids] : cast.hospitals) {
    for (const auto& id : ids) network.enroll(id, Role::Hospital);
  }
  for (const auto& [org, ids] : cast.patients) {
    for (const auto& id : ids) network.enroll(id, Role::Patient);
  }
  std::uint64_t n = 0;
  for (const auto& lot : cast.lots) {
    contracts::RegisterMedicineReceipt r;
    r.qr_code = lot.qr_code;
    r.name = lot.name;
    r.expiration = network.config().epoch_day + kLotShelfDays;
    r.tracking_number = fmt::format("TRK-{:06}", n++);
    r.quantity = spec.lot_quantity;
    network.preload(lot.pharmacy_id, r);
  }
  network.flush_preload();
}

std::uint64_t Workload::total() const noexcept {
  std::uint64_t n = 0;
  for (const auto& s : streams) n += s.requests.size();
  return n;
}

Workload generate_workload(const ScenarioSpec& spec, const Cast& cast, const netsim::Network& network,
                           std::uint64_t seed) {
  Rng rng(seed);
  Workload w;
  for (const auto& id : cast.pharmacies) w.streams.push_back(ClientStream{id, {}});
  const auto quota = quotas(spec.tx_or_query_total, cast.pharmacies.size());

  if (spec.workload == WorkloadKind::SalesRegistration) {
    std::map<std::string, std::vector<std::size_t>> lots_of;
    for (std::size_t i = 0; i < cast.lots.size(); ++i) lots_of[cast.lots[i].pharmacy_id].push_back(i);
    std::vector<std::uint64_t> stock(cast.lots.size(), spec.lot_quantity);
    std::uint64_t serial = 0;
    for (std::size_t c = 0; c < cast.pharmacies.size(); ++c) {
      const std::uint32_t org = cast.pharmacy_org[c];
      std::vector<std::string> prescribers = cast.doctors.at(org);
      prescribers.insert(prescribers.end(), cast.hospitals.at(org).begin(), cast.hospitals.at(org).end());
      const auto& patients = cast.patients.at(org);
      const auto& own = lots_of[cast.pharmacies[c]];
      for (std::uint64_t r = 0; r < quota[c]; ++r) {
        std::vector<std::size_t> available;
        for (auto i : own) {
          if (stock[i] > 0) available.push_back(i);
        }
        if (available.empty()) {
          fail(Errc::BadConfig, fmt::format("{} runs out of stock; raise lot_quantity", cast.pharmacies[c]));
        }
        const auto lot = available[rng.index(available.size())];
        stock[lot] -= 1;
        const auto& patient = patients[rng.index(patients.size())];
        const auto& prescriber = prescribers[rng.index(prescribers.size())];
        auto rx = contracts::Prescription::issue(*network.find_identity(prescriber), patient, cast.lots[lot].name,
                                                 serial++);
        w.streams[c].requests.push_back(
            netsim::Request{contracts::SellMedicine{std::move(rx), cast.lots[lot].qr_code}, {}});
      }
    }
    return w;
  }

  // Retrieval: every drug is looked up once per pass in a shuffled order and
  // the passes repeat until the total is reached.
  auto deal = [&](const std::vector<std::size_t>& clients, std::vector<std::size_t> drugs, std::uint64_t total,
                  std::optional<std::uint32_t> channel) {
    rng.shuffle(drugs);
    std::vector<std::size_t> queue;
    while (queue.size() < total) {
      for (auto d : drugs) {
        if (queue.size() == total) break;
        queue.push_back(d);
      }
    }
    const auto share = quotas(total, clients.size());
    std::size_t next = 0;
    for (std::size_t k = 0; k < clients.size(); ++k) {
      for (std::uint64_t r = 0; r < share[k]; ++r) {
        netsim::Request req{contracts::QueryDrug{cast.lots[queue[next++]].qr_code}, {}};
        req.options.channel = channel;
        w.streams[clients[k]].requests.push_back(std::move(req));
      }
    }
  };

  std::vector<std::size_t> all_clients(cast.pharmacies.size());
  for (std::size_t i = 0; i < all_clients.size(); ++i) all_clients[i] = i;
  const std::uint32_t ledgers = static_cast<std::uint32_t>(network.channel_count());

  if (spec.dispatch == RetrievalDispatch::Affinity) {
    const auto per_ledger = quotas(spec.tx_or_query_total, ledgers);
    for (std::uint32_t l = 0; l < ledgers; ++l) {
      std::vector<std::size_t> clients;
      for (std::size_t i = 0; i < cast.pharmacies.size(); ++i) {
        if (channel_of_org(spec, cast.pharmacy_org[i]) == l) clients.push_back(i);
      }
      std::vector<std::size_t> drugs;
      for (std::size_t i = 0; i < cast.lots.size(); ++i) {
        if (cast.lots[i].channel == l) drugs.push_back(i);
      }
      deal(clients, drugs, per_ledger[l], std::nullopt);
    }
  } else if (spec.dispatch == RetrievalDispatch::SequentialProbe) {
    std::vector<std::size_t> drugs(cast.lots.size());
    for (std::size_t i = 0; i < drugs.size(); ++i) drugs[i] = i;
    deal(all_clients, drugs, spec.tx_or_query_total, std::nullopt);
  } else {
    std::vector<std::size_t> drugs;
    for (std::size_t i = 0; i < cast.lots.size(); ++i) {
      if (cast.lots[i].channel == 0) drugs.push_back(i);
    }
    deal(all_clients, drugs, spec.tx_or_query_total, 0U);
  }
  return w;
}

void MetricsReport::finalize() {
  total_in = total_out = total_work = 0;
  for (const auto& r : rows) {
    total_in += r.bytes_in;
    total_out += r.bytes_out;
    total_work += r.work_units;
  }
  total_bytes = total_in + total_out;
  throughput = elapsed_ticks == 0 ? 0.0
                                  : static_cast<double>(completed) * static_cast<double>(kTicksPerSecond) /
                                        static_cast<double>(elapsed_ticks);
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const netsim::NetworkConfig& network, std::uint64_t seed,
                            const RunOptions& options) {
  netsim::NetworkConfig config = network;
  config.kind = spec.topology;
  config.seed = seed;
  config.validate();
  spec.validate(config);

  ScenarioResult result;
  result.network = std::make_unique<netsim::Network>(config);
  auto& net = *result.network;
  result.cast = plan_cast(spec, config);
  provision(net, spec, result.cast);
  Workload workload = generate_workload(spec, result.cast, net, seed);
  if (spec.workload == WorkloadKind::SalesRegistration && !workload.streams.empty()) {
    auto& first = workload.streams.front().requests;
    for (std::uint64_t i = 0; i < options.inject_invalid && i < first.size(); ++i) {
      first[i].options.corrupt_endorsement = true;
    }
  }

  std::vector<std::uint32_t> homes;
  for (const auto& s : workload.streams) homes.push_back(net.route_request(s.client_id));
  const auto channels = static_cast<std::uint32_t>(net.channel_count());
  ScenarioDriver driver(workload, homes, channels, spec.dispatch);
  const bool channel_bound = spec.workload == WorkloadKind::SalesRegistration ||
                             spec.dispatch == RetrievalDispatch::Affinity || channels == 1;
  net.start(&driver);
  net.run(channel_bound ? options.mode : netsim::RunMode::Serial);
  net.clear_driver();

  for (std::uint32_t c = 0; c < channels; ++c) {
    if (const auto bad = ledger::first_bad_block(net.ledger(c))) {
      fail(Errc::IntegrityFailure, fmt::format("{} fails verification at block {}", net.ledger(c).channel_id(), *bad));
    }
  }

  auto& report = result.report;
  report.scenario_id = spec.id;
  report.seed = seed;
  report.topology = spec.topology;
  report.workload = spec.workload;
  const auto snap = net.traffic_snapshot();
  for (const auto& n : snap.nodes) report.rows.push_back(NodeRow{n.node_id, n.kind, n.work_units, n.bytes_in, n.bytes_out});
  report.requests = workload.total();
  const auto success = spec.workload == WorkloadKind::SalesRegistration ? netsim::OutcomeStatus::Committed
                                                                        : netsim::OutcomeStatus::QueryOk;
  for (const auto& o : net.outcomes()) {
    if (o.status == success) report.completed += 1;
    report.elapsed_ticks = std::max(report.elapsed_ticks, o.completed_at);
  }
  report.failed = report.requests - report.completed;
  report.messages = snap.messages;
  report.cross_channel_messages = net.cross_channel_messages();
  report.finalize();
  return result;
}

}  // namespace medchain::bench
