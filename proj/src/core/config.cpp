#include "orgym/core/config.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace orgym {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "network-slicing", "slice-allocation", "slice-scheduling-policy", "slice-users",
    "total-rbgs",      "num-bs",           "ues-per-bs",              "tti-ms",
    "report-period-ms", "control-period-ms", "traffic",               "channel",
    "pf-alpha",        "pf-epsilon",       "rng-seed"};

[[noreturn]] void invalid(const std::string& key, const std::string& msg) {
  throw ConfigError(ConfigError::Kind::Validation, key, fmt::format("{}: {}", key, msg));
}

std::uint64_t as_uint(const json& v, const std::string& key, std::uint64_t max) {
  if (!v.is_number_unsigned()) {
    invalid(key, "expected a non-negative integer");
  }
  auto n = v.get<std::uint64_t>();
  if (n > max) invalid(key, fmt::format("value {} exceeds {}", n, max));
  return n;
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) invalid(key, "expected a number");
  return v.get<double>();
}

std::uint64_t parse_int_key(const std::string& text, const std::string& key, std::uint64_t max) {
  if (text.empty() || text.size() > 6 ||
      !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    invalid(key, fmt::format("'{}' is not a slice index", text));
  }
  auto n = std::stoull(text);
  if (n > max) invalid(key, fmt::format("slice index {} exceeds {}", n, max));
  return n;
}

/// Accepts an object, or a string in the compact `{0:[0,3],1:[5,7]}` form.
json as_slice_map(const json& v, const std::string& key) {
  if (v.is_object()) return v;
  if (v.is_string()) {
    static const std::regex kBareKey(R"(([{,]\s*)(\d+)\s*:)");
    auto quoted = std::regex_replace(v.get<std::string>(), kBareKey, "$1\"$2\":");
    json parsed = json::parse(quoted, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      invalid(key, fmt::format("cannot parse '{}'", v.get<std::string>()));
    }
    return parsed;
  }
  invalid(key, "expected an object");
}

json as_array(const json& v, const std::string& key) {
  if (v.is_array()) return v;
  if (v.is_string()) {
    json parsed = json::parse(v.get<std::string>(), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_array()) return parsed;
  }
  invalid(key, "expected an array");
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) {
      invalid(where.empty() ? k : where + "." + k, "unknown key");
    }
  }
}

}  // namespace

SliceTraffic default_traffic(SliceId slice) {
  switch (slice) {
    case 1: return {500.0, 125};
    case 2: return {100.0, 250};
    default: return {200.0, 1500};
  }
}

std::vector<UeId> ScenarioConfig::ue_ids() const {
  std::vector<UeId> ids;
  for (const auto& [slice, ues] : slice_users) ids.insert(ids.end(), ues.begin(), ues.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

SliceId ScenarioConfig::slice_of(UeId ue) const {
  for (const auto& [slice, ues] : slice_users) {
    if (std::find(ues.begin(), ues.end(), ue) != ues.end()) return slice;
  }
  throw std::out_of_range(fmt::format("UE {} is not assigned to a slice", ue));
}

ControlAction ScenarioConfig::initial_action() const {
  return ControlAction{slice_allocation, slice_scheduling_policy};
}

void check_report_period(std::uint32_t period_ms, const std::string& key) {
  if (period_ms < kMinReportPeriodMs || period_ms > kMaxReportPeriodMs) {
    invalid(key, fmt::format("{} ms outside the near-RT band [{}, {}] ms", period_ms,
                             kMinReportPeriodMs, kMaxReportPeriodMs));
  }
}

void validate_scenario_config(const ScenarioConfig& c) {
  if (c.slice_allocation.total_rbgs == 0 || c.slice_allocation.total_rbgs > 0xFFFF) {
    invalid("total-rbgs", "must be in 1..65535");
  }
  const auto n = c.slice_scheduling_policy.size();
  if (n == 0) invalid("slice-scheduling-policy", "at least one slice is required");
  if (n > 255) invalid("slice-scheduling-policy", "at most 255 slices");
  if (auto err = validate_allocation(c.slice_allocation, c.slice_allocation.total_rbgs)) {
    invalid("slice-allocation", err->detail);
  }
  if (c.slice_allocation.ranges.size() != n) {
    invalid("slice-scheduling-policy",
            fmt::format("{} policies for {} allocated slices", n, c.slice_allocation.ranges.size()));
  }
  for (const auto& [slice, _] : c.slice_allocation.ranges) {
    if (slice >= n) invalid("slice-allocation", fmt::format("slice {} has no policy", slice));
  }

  std::set<UeId> seen;
  for (const auto& [slice, ues] : c.slice_users) {
    if (slice >= n) invalid("slice-users", fmt::format("slice {} is not declared", slice));
    for (auto ue : ues) {
      if (ue == 0) invalid("slice-users", "UE id 0 is reserved for the base station");
      if (!seen.insert(ue).second) {
        invalid("slice-users", fmt::format("UE {} assigned to more than one slice", ue));
      }
    }
  }
  if (seen.empty()) invalid("slice-users", "no UEs assigned");
  if (c.ues_per_bs != seen.size()) {
    invalid("ues-per-bs", fmt::format("{} does not match the {} UEs in slice-users", c.ues_per_bs,
                                      seen.size()));
  }
  if (c.num_bs == 0) invalid("num-bs", "must be at least 1");
  if (c.num_bs > 999) invalid("num-bs", "at most 999 base stations");
  if (c.tti_ms == 0) invalid("tti-ms", "must be at least 1");
  check_report_period(c.report_period_ms, "report-period-ms");
  if (c.report_period_ms % c.tti_ms != 0) invalid("report-period-ms", "must be a multiple of tti-ms");
  if (c.control_period_ms < c.report_period_ms || c.control_period_ms % c.report_period_ms != 0) {
    invalid("control-period-ms", "must be a positive multiple of report-period-ms");
  }
  if (c.traffic.size() != n) invalid("traffic", fmt::format("expected {} entries", n));
  for (const auto& t : c.traffic) {
    if (!(t.rate_pps > 0.0) || t.packet_bytes == 0) {
      invalid("traffic", "rate-pps and packet-bytes must be positive");
    }
  }
  if (!(c.channel.cqi_step_prob >= 0.0 && c.channel.cqi_step_prob <= 0.5)) {
    invalid("channel.cqi-step-prob", "must be in [0, 0.5]");
  }
  if (c.channel.initial_cqi_min < 1 || c.channel.initial_cqi_max > 15 ||
      c.channel.initial_cqi_min > c.channel.initial_cqi_max) {
    invalid("channel.initial-cqi-min", "initial CQI range must lie within 1..15");
  }
  if (!(c.pf_alpha > 0.0 && c.pf_alpha <= 1.0)) invalid("pf-alpha", "must be in (0, 1]");
  if (!(c.pf_epsilon > 0.0)) invalid("pf-epsilon", "must be positive");
}

ScenarioConfig parse_scenario_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::Syntax, "", fmt::format("malformed JSON: {}", e.what()));
  }
  if (!doc.is_object()) invalid("<root>", "expected a JSON object");
  check_keys(doc, kKnownKeys, "");
  for (const char* required : {"slice-allocation", "slice-scheduling-policy", "slice-users"}) {
    if (!doc.contains(required)) invalid(required, "missing required key");
  }

  ScenarioConfig c;
  if (doc.contains("network-slicing")) {
    const auto& v = doc["network-slicing"];
    if (v.is_boolean()) {
      c.network_slicing = v.get<bool>();
    } else if (v.is_string() && (v == "True" || v == "False" || v == "true" || v == "false")) {
      c.network_slicing = v == "True" || v == "true";
    } else {
      invalid("network-slicing", "expected a boolean");
    }
  }
  if (doc.contains("total-rbgs")) {
    c.slice_allocation.total_rbgs = static_cast<std::uint32_t>(as_uint(doc["total-rbgs"], "total-rbgs", 0xFFFF));
  }

  const json policies = as_array(doc["slice-scheduling-policy"], "slice-scheduling-policy");
  for (const auto& code : policies) {
    auto n = as_uint(code, "slice-scheduling-policy", 255);
    auto p = policy_from_code(static_cast<long long>(n));
    if (!p) invalid("slice-scheduling-policy", fmt::format("policy code {} not in {{0,1,2}}", n));
    c.slice_scheduling_policy.push_back(*p);
  }

  const json allocation = as_slice_map(doc["slice-allocation"], "slice-allocation");
  for (const auto& [k, v] : allocation.items()) {
    auto slice = static_cast<SliceId>(parse_int_key(k, "slice-allocation", 255));
    if (!v.is_array() || v.size() != 2) invalid("slice-allocation", "ranges are [first_rbg, last_rbg]");
    RbgRange r{static_cast<std::uint32_t>(as_uint(v[0], "slice-allocation", 0xFFFF)),
               static_cast<std::uint32_t>(as_uint(v[1], "slice-allocation", 0xFFFF))};
    if (!c.slice_allocation.ranges.emplace(slice, r).second) {
      invalid("slice-allocation", fmt::format("slice {} listed twice", slice));
    }
  }

  const json users = as_slice_map(doc["slice-users"], "slice-users");
  for (const auto& [k, v] : users.items()) {
    auto slice = static_cast<SliceId>(parse_int_key(k, "slice-users", 255));
    if (!v.is_array()) invalid("slice-users", "expected a list of UE ids");
    auto& ues = c.slice_users[slice];
    for (const auto& ue : v) ues.push_back(static_cast<UeId>(as_uint(ue, "slice-users", 0xFFFF)));
  }
  std::size_t n_ues = 0;
  for (const auto& [_, ues] : c.slice_users) n_ues += ues.size();
  c.ues_per_bs = static_cast<std::uint32_t>(
      doc.contains("ues-per-bs") ? as_uint(doc["ues-per-bs"], "ues-per-bs", 0xFFFF) : n_ues);

  auto opt_u32 = [&](const char* key, std::uint32_t& field) {
    if (doc.contains(key)) field = static_cast<std::uint32_t>(as_uint(doc[key], key, 0xFFFFFFFFu));
  };
  opt_u32("num-bs", c.num_bs);
  opt_u32("tti-ms", c.tti_ms);
  opt_u32("report-period-ms", c.report_period_ms);
  opt_u32("control-period-ms", c.control_period_ms);
  if (doc.contains("pf-alpha")) c.pf_alpha = as_double(doc["pf-alpha"], "pf-alpha");
  if (doc.contains("pf-epsilon")) c.pf_epsilon = as_double(doc["pf-epsilon"], "pf-epsilon");
  if (doc.contains("rng-seed")) c.rng_seed = as_uint(doc["rng-seed"], "rng-seed", UINT64_MAX);

  if (doc.contains("traffic")) {
    const auto& t = doc["traffic"];
    if (!t.is_array()) invalid("traffic", "expected a list with one entry per slice");
    for (const auto& entry : t) {
      if (!entry.is_object()) invalid("traffic", "entries are objects");
      check_keys(entry, {"rate-pps", "packet-bytes"}, "traffic");
      auto slice = static_cast<SliceId>(c.traffic.size());
      SliceTraffic st = default_traffic(slice);
      if (entry.contains("rate-pps")) st.rate_pps = as_double(entry["rate-pps"], "traffic.rate-pps");
      if (entry.contains("packet-bytes")) {
        st.packet_bytes = static_cast<std::uint32_t>(as_uint(entry["packet-bytes"], "traffic.packet-bytes", 0xFFFFFFFFu));
      }
      c.traffic.push_back(st);
    }
  } else {
    for (std::size_t s = 0; s < c.slice_scheduling_policy.size(); ++s) {
      c.traffic.push_back(default_traffic(static_cast<SliceId>(s)));
    }
  }

  if (doc.contains("channel")) {
    const auto& ch = doc["channel"];
    if (!ch.is_object()) invalid("channel", "expected an object");
    check_keys(ch, {"cqi-step-prob", "initial-cqi-min", "initial-cqi-max"}, "channel");
    if (ch.contains("cqi-step-prob")) c.channel.cqi_step_prob = as_double(ch["cqi-step-prob"], "channel.cqi-step-prob");
    if (ch.contains("initial-cqi-min")) c.channel.initial_cqi_min = static_cast<int>(as_uint(ch["initial-cqi-min"], "channel.initial-cqi-min", 15));
    if (ch.contains("initial-cqi-max")) c.channel.initial_cqi_max = static_cast<int>(as_uint(ch["initial-cqi-max"], "channel.initial-cqi-max", 15));
  }

  validate_scenario_config(c);
  return c;
}

std::string serialize_scenario_config(const ScenarioConfig& c) {
  json doc = json::object();
  doc["network-slicing"] = c.network_slicing;
  doc["total-rbgs"] = c.slice_allocation.total_rbgs;
  json alloc = json::object();
  for (const auto& [slice, r] : c.slice_allocation.ranges) {
    alloc[std::to_string(slice)] = json::array({r.first, r.last});
  }
  doc["slice-allocation"] = alloc;
  json policies = json::array();
  for (auto p : c.slice_scheduling_policy) policies.push_back(policy_code(p));
  doc["slice-scheduling-policy"] = policies;
  json users = json::object();
  for (const auto& [slice, ues] : c.slice_users) users[std::to_string(slice)] = ues;
  doc["slice-users"] = users;
  doc["num-bs"] = c.num_bs;
  doc["ues-per-bs"] = c.ues_per_bs;
  doc["tti-ms"] = c.tti_ms;
  doc["report-period-ms"] = c.report_period_ms;
  doc["control-period-ms"] = c.control_period_ms;
  json traffic = json::array();
  for (const auto& t : c.traffic) traffic.push_back({{"rate-pps", t.rate_pps}, {"packet-bytes", t.packet_bytes}});
  doc["traffic"] = traffic;
  doc["channel"] = {{"cqi-step-prob", c.channel.cqi_step_prob},
                    {"initial-cqi-min", c.channel.initial_cqi_min},
                    {"initial-cqi-max", c.channel.initial_cqi_max}};
  doc["pf-alpha"] = c.pf_alpha;
  doc["pf-epsilon"] = c.pf_epsilon;
  doc["rng-seed"] = c.rng_seed;
  return doc.dump(2);
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigError::Kind::Syntax, "", fmt::format("cannot read {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_config(ss.str());
}

}  // namespace orgym
