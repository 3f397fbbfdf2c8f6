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

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "json.hpp"
#include "medchain/bench.hpp"

namespace medchain::bench {

namespace {

using json = nlohmann::json;

netsim::NodeKind node_kind_from_string(std::string_view s) {
  if (s == "peer") return netsim::NodeKind::Peer;
  if (s == "orderer") return netsim::NodeKind::Orderer;
  if (s == "client") return netsim::NodeKind::Client;
  fail(Errc::ParseError, fmt::format("unknown node kind '{}'", s));
}

std::string header_line(const MetricsReport& r) {
  return fmt::format("scenario {} ({}, {}), seed {}", r.scenario_id, netsim::to_string(r.topology),
                     to_string(r.workload), r.seed);
}

std::string emit_table(const MetricsReport& r) {
  std::string out;
  out += "# medchain " + header_line(r) + "\n";
  out += "# work = simulated processing ticks; it stands in for CPU and memory columns\n";
  std::size_t width = 5;
  for (const auto& row : r.rows) width = std::max(width, row.node_id.size());
  out += fmt::format("{:<{}}  {:>12}  {:>16}  {:>16}\n", "node", width, "work", "bytes in", "bytes out");
  for (const auto& row : r.rows) {
    out += fmt::format("{:<{}}  {:>12}  {:>16}  {:>16}\n", row.node_id, width, row.work_units, row.bytes_in,
                       row.bytes_out);
  }
  out += fmt::format("{:<{}}  {:>12}  {:>16}  {:>16}\n", "TOTAL", width, r.total_work, r.total_in, r.total_out);
  out += fmt::format("total traffic: {} bytes in {} messages\n", r.total_bytes, r.messages);
  out += fmt::format("completed: {} of {} ({} failed) in {} ticks\n", r.completed, r.requests, r.failed,
                     r.elapsed_ticks);
  out += fmt::format("throughput: {:.3f} ops/s\n", r.throughput);
  return out;
}

std::string emit_delimited(const MetricsReport& r) {
  std::string out;
  out += fmt::format("# scenario_id={}\n# seed={}\n# topology={}\n# workload={}\n", r.scenario_id, r.seed,
                     netsim::to_string(r.topology), to_string(r.workload));
  out += fmt::format("# requests={}\n# completed={}\n# failed={}\n# messages={}\n# cross_channel_messages={}\n",
                     r.requests, r.completed, r.failed, r.messages, r.cross_channel_messages);
  out += fmt::format("# elapsed_ticks={}\n# throughput={:.6f}\n# total_bytes={}\n", r.elapsed_ticks, r.throughput,
                     r.total_bytes);
  out += "node,kind,work_units,bytes_in,bytes_out\n";
  for (const auto& row : r.rows) {
    out += fmt::format("{},{},{},{},{}\n", row.node_id, netsim::to_string(row.kind), row.work_units, row.bytes_in,
                       row.bytes_out);
  }
  out += fmt::format("TOTAL,,{},{},{}\n", r.total_work, r.total_in, r.total_out);
  return out;
}

std::string emit_structured(const MetricsReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"node_id", row.node_id},
                    {"kind", std::string(netsim::to_string(row.kind))},
                    {"work_units", row.work_units},
                    {"bytes_in", row.bytes_in},
                    {"bytes_out", row.bytes_out}});
  }
  json j = {
      {"scenario_id", r.scenario_id},
      {"seed", r.seed},
      {"topology", std::string(netsim::to_string(r.topology))},
      {"workload", std::string(to_string(r.workload))},
      {"rows", std::move(rows)},
      {"aggregates",
       {{"total_in", r.total_in}, {"total_out", r.total_out}, {"total_bytes", r.total_bytes}, {"total_work", r.total_work}}},
      {"requests", r.requests},
      {"completed", r.completed},
      {"failed", r.failed},
      {"messages", r.messages},
      {"cross_channel_messages", r.cross_channel_messages},
      {"elapsed_ticks", r.elapsed_ticks},
      {"throughput", r.throughput},
  };
  return j.dump(2) + "\n";
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) fail(Errc::ParseError, fmt::format("report is missing '{}'", key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(Errc::ParseError, fmt::format("report field '{}': {}", key, e.what()));
  }
}

std::optional<double> ratio(double a, double b) {
  if (b == 0.0) return std::nullopt;
  return a / b;
}

std::string fmt_ratio(const std::optional<double>& r) { return r ? fmt::format("{:.4f}", *r) : "undefined"; }

}  // namespace

ReportFormat format_from_string(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n == "table" || n == "txt") return ReportFormat::Table;
  if (n == "delimited" || n == "csv") return ReportFormat::Delimited;
  if (n == "structured" || n == "json") return ReportFormat::Structured;
  fail(Errc::UnsupportedFormat, fmt::format("unsupported report format '{}' (expected table, delimited or structured)", name));
}

std::string_view extension(ReportFormat format) noexcept {
  switch (format) {
    case ReportFormat::Table: return "txt";
    case ReportFormat::Delimited: return "csv";
    case ReportFormat::Structured: return "json";
  }
  return "txt";
}

std::string report_file_name(const MetricsReport& report, ReportFormat format) {
  return fmt::format("scenario-{}-{}.{}", report.scenario_id, report.seed, extension(format));
}

std::string emit_report(const MetricsReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Table: return emit_table(report);
    case ReportFormat::Delimited: return emit_delimited(report);
    case ReportFormat::Structured: return emit_structured(report);
  }
  fail(Errc::UnsupportedFormat, "unknown report format");
}

MetricsReport parse_report(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::ParseError, fmt::format("report is not structured text: {}", e.what()));
  }
  if (!j.is_object()) fail(Errc::ParseError, "report must be an object");
  MetricsReport r;
  r.scenario_id = field<std::uint32_t>(j, "scenario_id");
  r.seed = field<std::uint64_t>(j, "seed");
  try {
    r.topology = netsim::topology_from_string(field<std::string>(j, "topology"));
    r.workload = workload_from_string(field<std::string>(j, "workload"));
  } catch (const Error& e) {
    fail(Errc::ParseError, e.what());
  }
  const json& rows = j.contains("rows") ? j.at("rows") : json();
  if (!rows.is_array()) fail(Errc::ParseError, "report rows must be an array");
  for (const auto& row : rows) {
    NodeRow n;
    n.node_id = field<std::string>(row, "node_id");
    n.kind = node_kind_from_string(field<std::string>(row, "kind"));
    n.work_units = field<std::uint64_t>(row, "work_units");
    n.bytes_in = field<std::uint64_t>(row, "bytes_in");
    n.bytes_out = field<std::uint64_t>(row, "bytes_out");
    r.rows.push_back(std::move(n));
  }
  r.requests = field<std::uint64_t>(j, "requests");
  r.completed = field<std::uint64_t>(j, "completed");
  r.failed = field<std::uint64_t>(j, "failed");
  r.messages = field<std::uint64_t>(j, "messages");
  r.cross_channel_messages = field<std::uint64_t>(j, "cross_channel_messages");
  r.elapsed_ticks = field<std::uint64_t>(j, "elapsed_ticks");
  const double throughput = field<double>(j, "throughput");
  if (!j.contains("aggregates") || !j.at("aggregates").is_object()) fail(Errc::ParseError, "report is missing 'aggregates'");
  const json& agg = j.at("aggregates");
  r.finalize();
  if (field<std::uint64_t>(agg, "total_in") != r.total_in || field<std::uint64_t>(agg, "total_out") != r.total_out ||
      field<std::uint64_t>(agg, "total_bytes") != r.total_bytes ||
      field<std::uint64_t>(agg, "total_work") != r.total_work) {
    fail(Errc::ParseError, "report aggregates do not match its rows");
  }
  r.throughput = throughput;
  return r;
}

Comparison compare_reports(const MetricsReport& a, const MetricsReport& b) {
  Comparison c;
  c.scenario_a = a.scenario_id;
  c.scenario_b = b.scenario_id;
  auto add = [&](const char* name, double va, double vb) {
    c.metrics.push_back(MetricDelta{name, va, vb, va - vb, ratio(va, vb)});
  };
  add("throughput", a.throughput, b.throughput);
  add("total_bytes", static_cast<double>(a.total_bytes), static_cast<double>(b.total_bytes));
  add("total_in", static_cast<double>(a.total_in), static_cast<double>(b.total_in));
  add("total_out", static_cast<double>(a.total_out), static_cast<double>(b.total_out));
  add("total_work", static_cast<double>(a.total_work), static_cast<double>(b.total_work));
  add("completed", static_cast<double>(a.completed), static_cast<double>(b.completed));
  add("elapsed_ticks", static_cast<double>(a.elapsed_ticks), static_cast<double>(b.elapsed_ticks));
  add("messages", static_cast<double>(a.messages), static_cast<double>(b.messages));
  c.throughput_ratio = c.metrics[0].ratio;
  c.traffic_ratio = c.metrics[1].ratio;
  return c;
}

std::string render_comparison(const Comparison& c) {
  std::string out = fmt::format("comparison: scenario {} vs scenario {}\n", c.scenario_a, c.scenario_b);
  out += fmt::format("throughput ratio: {}\n", fmt_ratio(c.throughput_ratio));
  out += fmt::format("traffic ratio: {}\n", fmt_ratio(c.traffic_ratio));
  out += fmt::format("{:<14}  {:>18}  {:>18}  {:>18}  {:>10}\n", "metric", "a", "b", "a - b", "a / b");
  for (const auto& m : c.metrics) {
    out += fmt::format("{:<14}  {:>18.3f}  {:>18.3f}  {:>18.3f}  {:>10}\n", m.metric, m.a, m.b, m.delta,
                       fmt_ratio(m.ratio));
  }
  return out;
}

}  // namespace medchain::bench
