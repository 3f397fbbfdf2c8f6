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

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "medchain/bench.hpp"
#include "medchain/cli.hpp"
#include "medchain/hash.hpp"
#include "medchain/ledger.hpp"

namespace py = pybind11;
using namespace medchain;

namespace {

py::dict scenario_dict(const bench::ScenarioSpec& s) {
  py::dict d;
  d["id"] = s.id;
  d["topology"] = std::string(netsim::to_string(s.topology));
  d["workload"] = std::string(bench::to_string(s.workload));
  d["dispatch"] = std::string(bench::to_string(s.dispatch));
  d["total"] = s.tx_or_query_total;
  d["drugs_per_ledger"] = s.drugs_preloaded_per_ledger;
  d["clients"] = s.clients;
  return d;
}

// Structured report text; scenario runs release the GIL.
std::string run_report(std::int64_t id, std::uint64_t seed, bool concurrent, const std::string& format) {
  const auto spec = bench::builtin_scenario(id);
  const auto fmt = bench::format_from_string(format);
  py::gil_scoped_release release;
  const auto mode = concurrent ? netsim::RunMode::Concurrent : netsim::RunMode::Serial;
  const auto result = bench::run_scenario(spec, {}, seed, {mode, 0});
  return bench::emit_report(result.report, fmt);
}

py::dict verify_dump_text(const std::string& text) {
  std::istringstream in(text);
  const auto v = ledger::verify_dump(in);
  py::dict d;
  d["ok"] = v.ok;
  d["blocks"] = v.blocks;
  d["bad_block"] = v.bad_block ? py::cast(*v.bad_block) : py::none();
  d["reason"] = v.reason;
  return d;
}

py::dict compare_text(const std::string& a, const std::string& b) {
  const auto c = bench::compare_reports(bench::parse_report(a), bench::parse_report(b));
  py::dict d;
  auto opt = [](const std::optional<double>& r) { return r ? py::cast(*r) : py::none(); };
  d["throughput_ratio"] = opt(c.throughput_ratio);
  d["traffic_ratio"] = opt(c.traffic_ratio);
  py::dict metrics;
  for (const auto& m : c.metrics) metrics[py::str(m.metric)] = py::make_tuple(m.a, m.b, m.delta, opt(m.ratio));
  d["metrics"] = metrics;
  return d;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run_cli(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "medchain simulator core";

  py::register_exception<Error>(m, "MedchainError", PyExc_RuntimeError);

  m.attr("SCENARIO_COUNT") = bench::kScenarioCount;
  m.def("scenario", [](std::int64_t id) { return scenario_dict(bench::builtin_scenario(id)); }, py::arg("id"));
  m.def("run_report", &run_report, py::arg("id"), py::arg("seed") = 1, py::arg("concurrent") = false,
        py::arg("format") = "json");
  m.def("verify_dump", &verify_dump_text, py::arg("text"));
  m.def("compare", &compare_text, py::arg("a"), py::arg("b"));
  m.def("cli", &run_cli, py::arg("args"));
  m.def("sha256_hex", [](py::bytes data) {
    const std::string s = data;
    return ledger::hash_content(std::string_view(s)).hex();
  });
}
