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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Tolerances are the constants below.

#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "access_oracle.hpp"
#include "medchain/bench.hpp"
#include "medchain/hash.hpp"
#include "medchain/ledger.hpp"
#include "medchain/netsim.hpp"

namespace {

using namespace medchain;
using bench::ReportFormat;
using bench::ScenarioResult;
using netsim::TopologyKind;

constexpr std::uint64_t kSeed = 7;
constexpr double kMinThroughputRatio = 2.5;
constexpr double kMaxTrafficRatio = 0.70;
constexpr double kMaxS1S2Seconds = 60.0;
constexpr std::uint64_t kS1Transactions = 10000;
constexpr std::uint64_t kAccessSequences = 1000;
constexpr std::size_t kAccessSteps = 80;
constexpr std::size_t kExhaustiveBlocksPerLedger = 24;
constexpr std::size_t kRandomFlipsPerBlock = 256;

int g_failures = 0;

void report(int n, bool pass, const std::string& name, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", n, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

// Digest over every report format, the trace and the ledger dumps.
std::string fingerprint(const ScenarioResult& r) {
  ledger::Hasher h;
  for (auto f : {ReportFormat::Table, ReportFormat::Delimited, ReportFormat::Structured}) {
    h.update(as_bytes(bench::emit_report(r.report, f)));
  }
  for (const auto& t : r.network->trace()) h.update(as_bytes(t.to_line() + "\n"));
  for (std::uint32_t c = 0; c < r.network->channel_count(); ++c) {
    for (const auto& b : r.network->ledger(c).blocks()) h.update(as_bytes(ledger::dump_block_line(b)));
  }
  return to_hex(h.finish().view());
}

std::vector<ScenarioResult> run_all(netsim::RunMode mode, double* s1s2_seconds = nullptr) {
  std::vector<ScenarioResult> out;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint32_t id = 1; id <= bench::kScenarioCount; ++id) {
    out.push_back(bench::run_scenario(bench::builtin_scenario(id), {}, kSeed, {mode, 0}));
    if (id == 2 && s1s2_seconds != nullptr) {
      *s1s2_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  }
  return out;
}

// One sale through a fresh network; returns {messages, bytes}.
std::pair<std::uint64_t, std::uint64_t> one_sale(TopologyKind kind) {
  netsim::NetworkConfig cfg;
  cfg.kind = kind;
  netsim::Network net(cfg);
  const auto& doctor = net.enroll("doctor-0-o1", identity::Role::Doctor);
  net.enroll("patient-00-o1", identity::Role::Patient);
  net.enroll("pharmacy-0-o1", identity::Role::Pharmacy);
  net.add_client("pharmacy-0-o1", 1);
  net.preload("pharmacy-0-o1", contracts::RegisterMedicineReceipt{"QR-1", "Amoxicillin",
                                                                  contracts::kDefaultEpochDay + 365, "TRK", 10});
  net.flush_preload();
  const auto before = net.traffic_snapshot();
  net.submit_transaction("pharmacy-0-o1",
                         contracts::SellMedicine{contracts::Prescription::issue(doctor, "patient-00-o1", "Amoxicillin", 1),
                                                 "QR-1"},
                         net.now());
  net.run();
  const auto after = net.traffic_snapshot();
  const auto out = net.outcomes();
  if (out.empty() || out.back().status != netsim::OutcomeStatus::Committed) return {0, 0};
  return {after.messages - before.messages, after.total_out - before.total_out};
}

void criterion_throughput(const std::vector<ScenarioResult>& r, double seconds) {
  const double ratio = r[0].report.throughput / r[1].report.throughput;
  report(1, ratio >= kMinThroughputRatio && seconds <= kMaxS1S2Seconds, "parallel throughput advantage",
         fmt::format("S1 {:.3f} / S2 {:.3f} = {:.4f} (need >= {}), S1+S2 wall time {:.1f} s (limit {} s)",
                     r[0].report.throughput, r[1].report.throughput, ratio, kMinThroughputRatio, seconds,
                     kMaxS1S2Seconds));
}

void criterion_traffic(const std::vector<ScenarioResult>& r) {
  const double ratio =
      static_cast<double>(r[0].report.total_bytes) / static_cast<double>(r[1].report.total_bytes);
  report(2, ratio <= kMaxTrafficRatio, "traffic reduction",
         fmt::format("S1 {} / S2 {} bytes = {:.4f} (need <= {})", r[0].report.total_bytes, r[1].report.total_bytes,
                     ratio, kMaxTrafficRatio));
}

void criterion_retrieval(const std::vector<ScenarioResult>& r) {
  const double s3 = r[2].report.throughput, s4 = r[3].report.throughput, s5 = r[4].report.throughput;
  report(3, s3 > s4 && s4 > s5, "retrieval ordering", fmt::format("S3 {:.3f} > S4 {:.3f} > S5 {:.3f}", s3, s4, s5));
}

void criterion_messages() {
  const netsim::CostModel c;
  auto expected = [&](std::uint64_t endorsers, std::uint64_t members) {
    const std::uint64_t messages = 2 * endorsers + 1 + members;
    const std::uint64_t bytes = messages * c.message_overhead + (2 * endorsers + 1) * c.sizes.sale +
                                members * (c.sizes.block_header + c.sizes.sale);
    return std::pair{messages, bytes};
  };
  const auto par = one_sale(TopologyKind::Parallel);
  const auto integ = one_sale(TopologyKind::Integrated);
  const auto want_par = expected(2, 8);
  const auto want_integ = expected(2, 16);
  const bool pass = par == want_par && integ == want_integ && want_par.first == 13 && want_integ.first == 21;
  report(4, pass, "message-count oracle",
         fmt::format("8 peers: {} msgs / {} bytes (want {} / {}); 16 peers: {} msgs / {} bytes (want {} / {})",
                     par.first, par.second, want_par.first, want_par.second, integ.first, integ.second,
                     want_integ.first, want_integ.second));
}

void criterion_determinism(const std::vector<ScenarioResult>& a) {
  const auto b = run_all(netsim::RunMode::Serial);
  const auto c = run_all(netsim::RunMode::Concurrent);
  std::string bad;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto fa = fingerprint(a[i]);
    if (fa != fingerprint(b[i])) bad += fmt::format(" S{} rerun differs;", i + 1);
    if (fa != fingerprint(c[i])) bad += fmt::format(" S{} concurrent differs;", i + 1);
  }
  report(5, bad.empty(), "determinism",
         bad.empty() ? "reports, traces and ledgers identical across serial reruns and concurrent mode, S1..S5" : bad);
}

// Checks that a copy of encoded[k] with one byte flipped is rejected. Only
// block k and its successor can change verdict; earlier blocks are intact
// and later ones link only to the unchanged k + 1.
bool flip_detected(const std::vector<Bytes>& encoded, const std::vector<ledger::Block>& blocks, std::size_t k,
                   std::size_t pos, std::uint8_t mask) {
  std::vector<Bytes> window;
  window.push_back(encoded[k]);
  window.back()[pos] ^= mask;
  if (k + 1 < encoded.size()) window.push_back(encoded[k + 1]);
  const auto bad = k == 0 ? ledger::first_bad_encoded_block(window)
                          : ledger::first_bad_encoded_block(window, blocks[k - 1]);
  return bad.has_value() && (*bad == k || *bad == k + 1);
}

void criterion_integrity(const ScenarioResult& s1) {
  std::string detail;
  bool pass = s1.report.completed == kS1Transactions;
  detail += fmt::format("{} committed", s1.report.completed);
  std::mt19937_64 rng(kSeed);
  std::uint64_t flips = 0, missed = 0, cross_checked = 0, cross_mismatch = 0;
  for (std::uint32_t c = 0; c < s1.network->channel_count(); ++c) {
    const auto& l = s1.network->ledger(c);
    const bool chain_ok = ledger::verify_chain(l);
    const bool replay_ok = ledger::replay(l) == l.state();
    pass = pass && chain_ok && replay_ok;
    detail += fmt::format("; {} {} blocks verify={} replay={}", l.channel_id(), l.height(), chain_ok, replay_ok);

    const auto& blocks = l.blocks();
    std::vector<Bytes> encoded;
    for (const auto& b : blocks) encoded.push_back(ledger::encode_block(b));
    const bool encoded_ok = !ledger::first_bad_encoded_block(encoded).has_value();
    pass = pass && encoded_ok;

    std::set<std::size_t> exhaustive{0, 1, blocks.size() / 2, blocks.size() - 1};
    while (exhaustive.size() < kExhaustiveBlocksPerLedger) exhaustive.insert(rng() % blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const auto size = encoded[k].size();
      if (exhaustive.contains(k)) {
        for (std::size_t pos = 0; pos < size; ++pos) {
          ++flips;
          if (!flip_detected(encoded, blocks, k, pos, 0x01)) ++missed;
        }
      }
      for (std::size_t i = 0; i < kRandomFlipsPerBlock; ++i) {
        const std::size_t pos = rng() % size;
        const auto mask = static_cast<std::uint8_t>(1u + rng() % 255);
        ++flips;
        if (!flip_detected(encoded, blocks, k, pos, mask)) ++missed;
      }
    }
    // The windowed check must agree with a full-chain scan.
    for (int i = 0; i < 8; ++i) {
      const std::size_t k = rng() % blocks.size();
      auto copy = encoded;
      copy[k][rng() % copy[k].size()] ^= 0x80;
      const auto full = ledger::first_bad_encoded_block(copy);
      ++cross_checked;
      if (!full || (*full != k && *full != k + 1)) ++cross_mismatch;
    }
  }
  pass = pass && missed == 0 && cross_mismatch == 0;
  detail += fmt::format("; {} single-byte flips, {} undetected; {} full-chain cross-checks, {} disagree", flips,
                        missed, cross_checked, cross_mismatch);
  report(6, pass, "chain integrity at scale", detail);
}

void criterion_access() {
  std::uint64_t checks = 0, mismatches = 0;
  std::string first;
  for (std::uint64_t seed = 1; seed <= kAccessSequences; ++seed) {
    const auto r = medchain::testing::run_access_sequence(seed, kAccessSteps);
    checks += r.checks;
    mismatches += r.mismatches;
    if (first.empty() && r.mismatches > 0) first = fmt::format(" first at seed {}: {}", seed, r.first_mismatch);
  }
  report(7, mismatches == 0 && checks > 0, "access-control oracle equivalence",
         fmt::format("{} sequences, {} checks, {} mismatches{}", kAccessSequences, checks, mismatches, first));
}

void criterion_supply(const ScenarioResult& s1) {
  bool pass = true;
  std::string detail;
  std::set<std::string> prescriptions;
  std::uint64_t duplicates = 0, sales_total = 0;
  for (std::uint32_t c = 0; c < s1.network->channel_count(); ++c) {
    const auto& state = s1.network->ledger(c).state();
    struct Tally { std::uint64_t registered = 0, remaining = 0, sold = 0; };
    std::map<std::string, Tally> by_drug;
    std::map<std::string, std::string> name_of;
    for (const auto& lot : contracts::all_lots(state)) {
      auto& t = by_drug[lot.name];
      t.registered += lot.registered_quantity;
      t.remaining += lot.quantity;
      name_of[lot.qr_code] = lot.name;
    }
    for (const auto& sale : contracts::all_sales(state)) {
      ++sales_total;
      by_drug[name_of.at(sale.qr_code)].sold += 1;
      if (!prescriptions.insert(to_hex(sale.prescription_id.view())).second) ++duplicates;
    }
    std::uint64_t bad = 0;
    for (const auto& [name, t] : by_drug) {
      if (t.registered < t.sold || t.registered - t.sold != t.remaining) ++bad;
    }
    pass = pass && bad == 0;
    detail += fmt::format("{}: {} drugs, {} unbalanced; ", s1.network->ledger(c).channel_id(), by_drug.size(), bad);
  }
  pass = pass && duplicates == 0 && sales_total == kS1Transactions;
  detail += fmt::format("{} sales, {} reused prescription ids", sales_total, duplicates);
  report(8, pass, "supply conservation", detail);
}

void criterion_flow(const std::vector<ScenarioResult>& r) {
  bool pass = true;
  std::string detail;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto snap = r[i].network->traffic_snapshot();
    std::uint64_t in = 0, out = 0;
    for (const auto& n : snap.nodes) {
      in += n.bytes_in;
      out += n.bytes_out;
    }
    const auto cross = r[i].network->cross_channel_messages();
    const bool parallel = r[i].report.topology == TopologyKind::Parallel;
    const bool ok = in == out && in == snap.total_in && (!parallel || cross == 0);
    pass = pass && ok;
    detail += fmt::format("S{} in {} out {} cross {}{}", i + 1, in, out, cross, i + 1 < r.size() ? "; " : "");
  }
  report(9, pass, "flow conservation", detail);
}

}  // namespace

int main() {
  try {
    double s1s2 = 0;
    const auto runs = run_all(netsim::RunMode::Serial, &s1s2);
    criterion_throughput(runs, s1s2);
    criterion_traffic(runs);
    criterion_retrieval(runs);
    criterion_messages();
    criterion_determinism(runs);
    criterion_integrity(runs[0]);
    criterion_access();
    criterion_supply(runs[0]);
    criterion_flow(runs);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criteria failed\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
