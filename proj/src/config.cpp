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

#include "medchain/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace medchain::config {

namespace {

using json = nlohmann::json;

void only_keys(const json& obj, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(Errc::BadConfig, fmt::format("'{}' must be an object", section));
  const std::set<std::string_view> keys(allowed);
  for (const auto& [key, value] : obj.items()) {
    if (!keys.contains(key)) fail(Errc::BadConfig, fmt::format("unknown key '{}' in '{}'", key, section));
  }
}

template <typename T>
void read_uint(const json& obj, std::string_view section, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() > std::numeric_limits<T>::max()) {
    fail(Errc::BadConfig, fmt::format("'{}.{}' must be a non-negative integer", section, key));
  }
  out = static_cast<T>(v.get<std::uint64_t>());
}

std::optional<std::string> read_string(const json& obj, std::string_view section, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  if (!obj.at(key).is_string()) fail(Errc::BadConfig, fmt::format("'{}.{}' must be a string", section, key));
  return obj.at(key).get<std::string>();
}

void apply_network(const json& j, netsim::NetworkConfig& n) {
  only_keys(j, "network", {"organizations", "peers_per_org", "endorsement_policy", "block", "epoch_day"});
  read_uint(j, "network", "organizations", n.organizations);
  read_uint(j, "network", "peers_per_org", n.peers_per_org);
  read_uint(j, "network", "endorsement_policy", n.endorsement_policy);
  read_uint(j, "network", "epoch_day", n.epoch_day);
  if (j.contains("block")) {
    const json& b = j.at("block");
    only_keys(b, "network.block", {"max_txs", "timeout"});
    read_uint(b, "network.block", "max_txs", n.block.max_txs);
    read_uint(b, "network.block", "timeout", n.block.timeout);
  }
}

void apply_cost(const json& j, netsim::CostModel& c) {
  only_keys(j, "cost_model",
            {"endorse_cost", "validate_cost", "commit_cost", "order_cost", "query_cost", "link_latency",
             "message_overhead", "sizes"});
  read_uint(j, "cost_model", "endorse_cost", c.endorse_cost);
  read_uint(j, "cost_model", "validate_cost", c.validate_cost);
  read_uint(j, "cost_model", "commit_cost", c.commit_cost);
  read_uint(j, "cost_model", "order_cost", c.order_cost);
  read_uint(j, "cost_model", "query_cost", c.query_cost);
  read_uint(j, "cost_model", "link_latency", c.link_latency);
  read_uint(j, "cost_model", "message_overhead", c.message_overhead);
  if (j.contains("sizes")) {
    const json& s = j.at("sizes");
    const char* section = "cost_model.sizes";
    only_keys(s, section,
              {"sale", "register_lot", "record_abstract", "grant", "revoke", "delegate", "revoke_delegation", "share",
               "query_request", "drug_record", "error_response", "block_header"});
    auto& z = c.sizes;
    read_uint(s, section, "sale", z.sale);
    read_uint(s, section, "register_lot", z.register_lot);
    read_uint(s, section, "record_abstract", z.record_abstract);
    read_uint(s, section, "grant", z.grant);
    read_uint(s, section, "revoke", z.revoke);
    read_uint(s, section, "delegate", z.delegate);
    read_uint(s, section, "revoke_delegation", z.revoke_delegation);
    read_uint(s, section, "share", z.share);
    read_uint(s, section, "query_request", z.query_request);
    read_uint(s, section, "drug_record", z.drug_record);
    read_uint(s, section, "error_response", z.error_response);
    read_uint(s, section, "block_header", z.block_header);
  }
}

bench::ScenarioSpec read_scenario(const json& j) {
  only_keys(j, "scenario",
            {"id", "topology", "workload", "total", "drugs_per_ledger", "clients", "dispatch", "lot_quantity",
             "doctors_per_org", "patients_per_org"});
  bench::ScenarioSpec s;
  s.id = 0;
  if (j.contains("id")) {
    std::uint32_t id = 0;
    read_uint(j, "scenario", "id", id);
    try {
      s = bench::builtin_scenario(id);
    } catch (const Error& e) {
      fail(Errc::BadConfig, e.what());
    }
  }
  if (auto t = read_string(j, "scenario", "topology")) s.topology = netsim::topology_from_string(*t);
  if (auto w = read_string(j, "scenario", "workload")) s.workload = bench::workload_from_string(*w);
  if (auto d = read_string(j, "scenario", "dispatch")) s.dispatch = bench::dispatch_from_string(*d);
  read_uint(j, "scenario", "total", s.tx_or_query_total);
  read_uint(j, "scenario", "drugs_per_ledger", s.drugs_preloaded_per_ledger);
  read_uint(j, "scenario", "clients", s.clients);
  read_uint(j, "scenario", "lot_quantity", s.lot_quantity);
  read_uint(j, "scenario", "doctors_per_org", s.doctors_per_org);
  read_uint(j, "scenario", "patients_per_org", s.patients_per_org);
  return s;
}

json network_json(const netsim::NetworkConfig& n) {
  return {{"organizations", n.organizations},
          {"peers_per_org", n.peers_per_org},
          {"endorsement_policy", n.endorsement_policy},
          {"block", {{"max_txs", n.block.max_txs}, {"timeout", n.block.timeout}}},
          {"epoch_day", n.epoch_day}};
}

json cost_json(const netsim::CostModel& c) {
  const auto& z = c.sizes;
  return {{"endorse_cost", c.endorse_cost},
          {"validate_cost", c.validate_cost},
          {"commit_cost", c.commit_cost},
          {"order_cost", c.order_cost},
          {"query_cost", c.query_cost},
          {"link_latency", c.link_latency},
          {"message_overhead", c.message_overhead},
          {"sizes",
           {{"sale", z.sale},
            {"register_lot", z.register_lot},
            {"record_abstract", z.record_abstract},
            {"grant", z.grant},
            {"revoke", z.revoke},
            {"delegate", z.delegate},
            {"revoke_delegation", z.revoke_delegation},
            {"share", z.share},
            {"query_request", z.query_request},
            {"drug_record", z.drug_record},
            {"error_response", z.error_response},
            {"block_header", z.block_header}}}};
}

json scenario_json(const bench::ScenarioSpec& s) {
  return {{"id", s.id},
          {"topology", std::string(netsim::to_string(s.topology))},
          {"workload", std::string(bench::to_string(s.workload))},
          {"dispatch", std::string(bench::to_string(s.dispatch))},
          {"total", s.tx_or_query_total},
          {"drugs_per_ledger", s.drugs_preloaded_per_ledger},
          {"clients", s.clients},
          {"lot_quantity", s.lot_quantity},
          {"doctors_per_org", s.doctors_per_org},
          {"patients_per_org", s.patients_per_org}};
}

}  // namespace

void apply_config_text(std::string_view text, RunConfig& config) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::BadConfig, fmt::format("config is not valid JSON: {}", e.what()));
  }
  only_keys(j, "config", {"network", "cost_model", "scenario"});
  if (j.contains("network")) apply_network(j.at("network"), config.network);
  if (j.contains("cost_model")) apply_cost(j.at("cost_model"), config.network.cost);
  if (j.contains("scenario")) config.custom = read_scenario(j.at("scenario"));
  config.network.validate();
}

void apply_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) fail(Errc::BadConfig, fmt::format("cannot read config file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(buf.str(), config);
}

std::string resolved_config_json(const RunConfig& config, const std::vector<bench::ScenarioSpec>& specs) {
  json scenarios = json::array();
  for (const auto& s : specs) scenarios.push_back(scenario_json(s));
  json formats = json::array();
  for (auto f : config.formats) formats.push_back(std::string(bench::extension(f)));
  const json j = {{"network", network_json(config.network)},
                  {"cost_model", cost_json(config.network.cost)},
                  {"scenarios", std::move(scenarios)},
                  {"seed", config.seed},
                  {"out", config.out_dir},
                  {"formats", std::move(formats)},
                  {"trace", config.trace},
                  {"concurrent", config.concurrent}};
  return j.dump(2) + "\n";
}

}  // namespace medchain::config
