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

#include "medchain/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "medchain/bench.hpp"
#include "medchain/config.hpp"
#include "medchain/identity.hpp"
#include "medchain/ledger.hpp"

namespace medchain::cli {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::BadConfig, fmt::format("cannot read '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::BadConfig, fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) fail(Errc::BadConfig, fmt::format("write to '{}' failed", path.string()));
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::IntegrityFailure: return kExitIntegrity;
    case Errc::BadConfig:
    case Errc::BadScenarioId:
    case Errc::UnsupportedFormat:
    case Errc::ParseError: return kExitUsage;
    default: return kExitUnexpected;
  }
}

struct Options {
  std::optional<std::int64_t> scenario;
  bool all = false;
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> formats;
  bool trace = false;
  bool concurrent = false;
  std::string verify_path;
  std::vector<std::string> compare_paths;
  std::string roster_path;
  std::string drug;
  std::uint64_t threshold = 100;
};

config::RunConfig resolve(const Options& o) {
  config::RunConfig rc;
  if (!o.config_path.empty()) config::apply_config_file(o.config_path, rc);
  rc.seed = o.seed;
  rc.out_dir = o.out_dir;
  rc.trace = o.trace;
  rc.concurrent = o.concurrent;
  if (!o.formats.empty()) {
    rc.formats.clear();
    for (const auto& f : o.formats) {
      const auto fmt = bench::format_from_string(f);
      if (std::find(rc.formats.begin(), rc.formats.end(), fmt) == rc.formats.end()) rc.formats.push_back(fmt);
    }
  }
  return rc;
}

std::vector<bench::ScenarioSpec> selected_specs(const Options& o, const config::RunConfig& rc) {
  std::vector<bench::ScenarioSpec> specs;
  if (o.all) {
    for (std::uint32_t id = 1; id <= bench::kScenarioCount; ++id) specs.push_back(bench::builtin_scenario(id));
  } else if (o.scenario) {
    specs.push_back(bench::builtin_scenario(*o.scenario));
  } else if (rc.custom) {
    specs.push_back(*rc.custom);
  } else {
    fail(Errc::BadConfig, "nothing to run: pass --scenario N (1..5), --all, or a config with a scenario section");
  }
  return specs;
}

void write_outputs(const bench::ScenarioResult& result, const config::RunConfig& rc, std::ostream& out) {
  const fs::path dir(rc.out_dir);
  const auto& r = result.report;
  for (auto f : rc.formats) write_file(dir / bench::report_file_name(r, f), bench::emit_report(r, f));
  const auto& net = *result.network;
  for (std::uint32_t c = 0; c < net.channel_count(); ++c) {
    const auto& ledger = net.ledger(c);
    std::ostringstream dump;
    ledger::write_dump(dump, ledger);
    write_file(dir / fmt::format("scenario-{}-{}-{}.ledger", r.scenario_id, r.seed, ledger.channel_id()), dump.str());
  }
  if (rc.trace) {
    std::string text;
    for (const auto& t : net.trace()) text += t.to_line() + "\n";
    write_file(dir / fmt::format("scenario-{}-{}.trace", r.scenario_id, r.seed), text);
  }
  out << fmt::format("scenario {}: {} of {} completed, throughput {:.3f} ops/s, traffic {} bytes, {} messages\n",
                     r.scenario_id, r.completed, r.requests, r.throughput, r.total_bytes, r.messages);
}

int cmd_run(const Options& o, std::ostream& out) {
  const auto rc = resolve(o);
  const auto specs = selected_specs(o, rc);
  const auto mode = rc.concurrent ? netsim::RunMode::Concurrent : netsim::RunMode::Serial;
  fs::create_directories(rc.out_dir);
  write_file(fs::path(rc.out_dir) / "config-resolved.json", config::resolved_config_json(rc, specs));

  std::vector<bench::ScenarioResult> results;
  if (rc.concurrent && specs.size() > 1) {
    std::vector<std::future<bench::ScenarioResult>> jobs;
    for (const auto& s : specs) {
      jobs.push_back(std::async(std::launch::async, [&rc, s, mode] {
        return bench::run_scenario(s, rc.network, rc.seed, {mode, 0});
      }));
    }
    for (auto& j : jobs) results.push_back(j.get());
  } else {
    for (const auto& s : specs) results.push_back(bench::run_scenario(s, rc.network, rc.seed, {mode, 0}));
  }
  for (const auto& r : results) write_outputs(r, rc, out);

  if (o.all) {
    std::string summary;
    const std::pair<std::size_t, std::size_t> pairs[] = {{0, 1}, {2, 3}, {3, 4}};
    for (auto [a, b] : pairs) {
      summary += bench::render_comparison(bench::compare_reports(results[a].report, results[b].report));
      summary += "\n";
    }
    write_file(fs::path(rc.out_dir) / fmt::format("comparison-{}.txt", rc.seed), summary);
    out << summary;
  }
  return kExitOk;
}

int cmd_verify(const std::string& path, std::ostream& out, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << fmt::format("error: cannot read ledger dump '{}'\n", path);
    return kExitUsage;
  }
  const auto verdict = ledger::verify_dump(in);
  if (verdict.ok) {
    out << fmt::format("ok: {} blocks verified\n", verdict.blocks);
    return kExitOk;
  }
  err << fmt::format("integrity failure at block {}: {}\n", verdict.bad_block.value_or(0), verdict.reason);
  return kExitIntegrity;
}

int cmd_compare(const std::vector<std::string>& paths, std::ostream& out) {
  if (paths.size() != 2) fail(Errc::BadConfig, "compare needs exactly two report paths");
  const auto a = bench::parse_report(read_file(paths[0]));
  const auto b = bench::parse_report(read_file(paths[1]));
  out << bench::render_comparison(bench::compare_reports(a, b));
  return kExitOk;
}

int cmd_roster(const Options& o, std::ostream& out) {
  const auto entries = identity::parse_roster(read_file(o.roster_path));
  const auto authority = identity::Identity::derive("licensing-0", identity::Role::LicensingAuthority, o.seed);
  identity::LicensingNode node(authority);
  for (const auto& e : entries) {
    const auto ident = identity::Identity::derive(e.id, e.role, e.seed);
    const auto cert = node.issue(ident);
    out << fmt::format("{} {} {} {}\n", e.id, identity::to_string(e.role), to_hex(ident.public_key()),
                       identity::verify_certificate(node.public_key(), cert) ? "certified" : "uncertified");
  }
  return kExitOk;
}

int cmd_query(const Options& o, std::ostream& out) {
  const auto rc = resolve(o);
  const auto specs = selected_specs(o, rc);
  for (const auto& spec : specs) {
    const auto result = bench::run_scenario(spec, rc.network, rc.seed);
    const auto& net = *result.network;
    const auto today = net.contract_context().today(result.report.elapsed_ticks);
    for (std::uint32_t c = 0; c < net.channel_count(); ++c) {
      const auto& ledger = net.ledger(c);
      const auto report = contracts::c2_supply_report(ledger.state(), o.threshold, today);
      out << fmt::format("# scenario {} {} height {}\n", spec.id, ledger.channel_id(), ledger.height());
      out << "drug,lots,registered,sold,available,near_expiry,expired,shortage\n";
      for (const auto& d : report.drugs) {
        if (!o.drug.empty() && d.drug_name != o.drug) continue;
        out << fmt::format("{},{},{},{},{},{},{},{}\n", d.drug_name, d.lots, d.registered, d.sold, d.available,
                           d.lots_near_expiry, d.lots_expired, d.shortage ? "yes" : "no");
      }
    }
  }
  return kExitOk;
}

void add_run_flags(CLI::App& app, Options& o) {
  app.add_option("--scenario", o.scenario, "Built-in scenario id (1..5)")->envname("MEDCHAIN_SCENARIO");
  app.add_flag("--all", o.all, "Run all built-in scenarios and compare them")->envname("MEDCHAIN_ALL");
  app.add_option("--seed", o.seed, "Seed for every random choice")->envname("MEDCHAIN_SEED");
  app.add_option("--config", o.config_path, "JSON config file")->envname("MEDCHAIN_CONFIG");
  app.add_option("--out", o.out_dir, "Output directory")->envname("MEDCHAIN_OUT");
  app.add_option("--format", o.formats, "Report formats: table, csv, json")
      ->delimiter(',')
      ->envname("MEDCHAIN_FORMAT");
  app.add_flag("--trace", o.trace, "Write the event trace")->envname("MEDCHAIN_TRACE");
  app.add_flag("--concurrent", o.concurrent, "Run channels (and scenarios) on threads")
      ->envname("MEDCHAIN_CONCURRENT");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"medchain: multi-channel medical ledger simulator"};
  app.set_version_flag("--version", "medchain 1.0.0");
  add_run_flags(app, o);
  app.add_option("--verify", o.verify_path, "Verify a ledger dump")->envname("MEDCHAIN_VERIFY");
  app.add_option("--compare", o.compare_paths, "Compare two structured reports")
      ->expected(2)
      ->envname("MEDCHAIN_COMPARE");

  auto* run = app.add_subcommand("run", "Run scenarios and write reports")->fallthrough();
  auto* verify = app.add_subcommand("verify", "Verify a ledger dump");
  verify->add_option("path", o.verify_path, "Ledger dump")->required();
  auto* compare = app.add_subcommand("compare", "Compare two structured reports");
  compare->add_option("reports", o.compare_paths, "Two report files")->expected(2)->required();
  auto* roster = app.add_subcommand("roster", "Derive and certify the identities of a roster file")->fallthrough();
  roster->add_option("path", o.roster_path, "Roster file")->required();
  auto* query = app.add_subcommand("query", "Print per-channel drug supply after a run")->fallthrough();
  query->add_option("--drug", o.drug, "Only this drug name");
  query->add_option("--threshold", o.threshold, "Shortage threshold in units");
  app.require_subcommand(0, 1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (verify->parsed() || (run->count() == 0 && !o.verify_path.empty())) {
      return cmd_verify(o.verify_path, out, err);
    }
    if (compare->parsed() || (run->count() == 0 && !o.compare_paths.empty())) return cmd_compare(o.compare_paths, out);
    if (roster->parsed()) return cmd_roster(o, out);
    if (query->parsed()) return cmd_query(o, out);
    return cmd_run(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnexpected;
  }
}

}  // namespace medchain::cli
