#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlansat/ctmc.hpp"
#include "wlansat/errors.hpp"
#include "wlansat/scenario.hpp"
#include "wlansat/simulator.hpp"
#include "wlansat/throughput.hpp"

namespace wlansat {

using Json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* name : allowed) known = known || key == name;
    if (!known) throw InvalidParameter(where + ": unknown key '" + key + "'");
  }
}

inline const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InvalidParameter(where + ": missing key '" + key + "'");
  return *it;
}

inline double number_field(const Json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number()) throw InvalidParameter(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline long long integer_field(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw InvalidParameter(where + ": expected an integer");
}

inline long long integer_field(const Json& obj, const char* key, const std::string& where) {
  return integer_field(require(obj, key, where), where + "." + key);
}

}  // namespace detail

// Scenario document:
//   {"wlans": [{"id": 0, "n_nodes": 16}, ...],
//    "edges": [[0, 1], ...],
//    "params": {"t_e_s": 9e-6, "e_t_s": 6.63e-3, "e_tc_s": 6.63e-3,
//               "cw_min": 32, "m": 5, "l_bits": 768000}}
// t_e_s defaults to 9e-6 and e_tc_s to e_t_s when absent.
inline Scenario scenario_from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidParameter("scenario: expected a JSON object");
  detail::reject_unknown_keys(doc, {"wlans", "edges", "params"}, "scenario");

  const auto& wlans_json = detail::require(doc, "wlans", "scenario");
  if (!wlans_json.is_array()) throw InvalidParameter("wlans: expected an array");
  std::vector<Wlan> wlans;
  for (std::size_t k = 0; k < wlans_json.size(); ++k) {
    const auto& w = wlans_json[k];
    const std::string where = "wlans[" + std::to_string(k) + "]";
    if (!w.is_object()) throw InvalidParameter(where + ": expected an object");
    detail::reject_unknown_keys(w, {"id", "n_nodes"}, where);
    const auto id = detail::integer_field(w, "id", where);
    const auto n = detail::integer_field(w, "n_nodes", where);
    if (id < 0 || id >= static_cast<long long>(kMaxWlans)) {
      throw InvalidParameter(where + ".id: out of range");
    }
    if (n < 1 || n > 1'000'000) throw InvalidParameter(where + ".n_nodes: must be >= 1");
    wlans.push_back({static_cast<WlanId>(id), static_cast<int>(n)});
  }
  std::sort(wlans.begin(), wlans.end(), [](const Wlan& a, const Wlan& b) { return a.id < b.id; });

  std::vector<std::pair<WlanId, WlanId>> edges;
  if (auto it = doc.find("edges"); it != doc.end()) {
    if (!it->is_array()) throw InvalidParameter("edges: expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const auto& e = (*it)[k];
      const std::string where = "edges[" + std::to_string(k) + "]";
      if (!e.is_array() || e.size() != 2) throw InvalidParameter(where + ": expected [id, id]");
      const auto a = detail::integer_field(e[0], where);
      const auto b = detail::integer_field(e[1], where);
      if (a < 0 || b < 0 || a >= static_cast<long long>(wlans.size()) ||
          b >= static_cast<long long>(wlans.size())) {
        throw InvalidParameter(where + ": endpoint is not a WLAN id");
      }
      edges.emplace_back(static_cast<WlanId>(a), static_cast<WlanId>(b));
    }
  }

  const auto& pj = detail::require(doc, "params", "scenario");
  if (!pj.is_object()) throw InvalidParameter("params: expected an object");
  detail::reject_unknown_keys(pj, {"t_e_s", "e_t_s", "e_tc_s", "cw_min", "m", "l_bits"}, "params");
  PhyMacParams params;
  params.t_e = pj.contains("t_e_s") ? detail::number_field(pj, "t_e_s", "params") : 9e-6;
  params.e_t = detail::number_field(pj, "e_t_s", "params");
  params.e_tc = pj.contains("e_tc_s") ? detail::number_field(pj, "e_tc_s", "params") : params.e_t;
  const auto cw_min = detail::integer_field(pj, "cw_min", "params");
  const auto m = detail::integer_field(pj, "m", "params");
  if (cw_min < 2 || cw_min > (1LL << 40)) throw InvalidParameter("params.cw_min: must be >= 2");
  if (m < 0 || m > 40) throw InvalidParameter("params.m: must lie in [0, 40]");
  params.cw_min = static_cast<int>(cw_min);
  params.m = static_cast<int>(m);
  params.l_bits = detail::number_field(pj, "l_bits", "params");

  if (wlans.size() > kMaxWlans) throw StateSpaceTooLarge("wlans: too many WLANs");
  ConflictGraph graph(wlans.size());
  for (auto [a, b] : edges) graph.add_edge(a, b);
  return Scenario(std::move(wlans), std::move(graph), params);
}

inline Json scenario_to_json(const Scenario& s) {
  Json doc;
  doc["wlans"] = Json::array();
  for (const auto& w : s.wlans()) doc["wlans"].push_back({{"id", w.id}, {"n_nodes", w.n_nodes}});
  doc["edges"] = Json::array();
  for (auto [a, b] : s.graph().edges()) doc["edges"].push_back({a, b});
  const auto& p = s.params();
  doc["params"] = {{"t_e_s", p.t_e}, {"e_t_s", p.e_t},   {"e_tc_s", p.e_tc},
                   {"cw_min", p.cw_min}, {"m", p.m}, {"l_bits", p.l_bits}};
  return doc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open scenario file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidParameter("scenario file '" + path + "': " + e.what());
  }
  return scenario_from_json(doc);
}

// Six significant digits, stable across runs.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// wlan_id, x_bits_per_s, mode
inline void write_summary_csv(std::ostream& out, const ThroughputReport& report, bool header = true) {
  if (header) out << "wlan_id,x_bits_per_s,mode\n";
  for (std::size_t i = 0; i < report.per_wlan.size(); ++i) {
    out << i << ',' << format_number(report.per_wlan[i]) << ',' << to_string(report.mode) << '\n';
  }
}

// wlan_id, state, pi, gamma_raw, gamma, p, y_bits_per_s
inline void write_detail_csv(std::ostream& out, const ThroughputReport& report) {
  out << "wlan_id,state,pi,gamma_raw,gamma,p,y_bits_per_s\n";
  for (std::size_t k = 0; k < report.gammas.size(); ++k) {
    const auto& g = report.gammas[k];
    const auto& c = report.contributions[k];
    out << g.wlan << ',' << csv_quote(g.state.label()) << ',' << format_number(c.pi) << ','
        << format_number(g.gamma_raw) << ',' << format_number(g.gamma) << ',' << format_number(g.p) << ','
        << format_number(g.y) << '\n';
  }
}

inline Json report_to_json(const ThroughputReport& report) {
  Json doc;
  doc["mode"] = to_string(report.mode);
  doc["collisions"] = report.collisions;
  doc["dominant_mass"] = report.dominant_mass;
  doc["per_wlan"] = Json::array();
  for (std::size_t i = 0; i < report.per_wlan.size(); ++i) {
    doc["per_wlan"].push_back({{"wlan_id", i}, {"x_bits_per_s", report.per_wlan[i]}});
  }
  doc["contributions"] = Json::array();
  for (std::size_t k = 0; k < report.contributions.size(); ++k) {
    const auto& c = report.contributions[k];
    const auto& g = report.gammas[k];
    Json contenders = Json::array();
    for (auto j : FeasibleState(g.contenders).members()) contenders.push_back(j);
    doc["contributions"].push_back({{"wlan_id", c.wlan},
                                    {"state", c.state.label()},
                                    {"predecessor", g.predecessor.label()},
                                    {"contenders", contenders},
                                    {"k_nodes", g.k_nodes},
                                    {"pi", c.pi},
                                    {"y_bits_per_s", g.y},
                                    {"gamma_raw", g.gamma_raw},
                                    {"gamma", c.gamma},
                                    {"p", g.p},
                                    {"term_bits_per_s", c.term}});
  }
  return doc;
}

// start-slot wlan node type duration-slots, one event per line.
inline void write_event_log(std::ostream& out, const std::vector<ChannelEvent>& events) {
  for (const auto& e : events) {
    out << e.start_slot << ' ' << e.wlan << ' ' << e.node << ' ' << to_string(e.type) << ' '
        << e.duration_slots << '\n';
  }
}

inline std::vector<ChannelEvent> read_event_log(std::istream& in) {
  std::vector<ChannelEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    ChannelEvent e;
    std::string type;
    if (!(fields >> e.start_slot >> e.wlan >> e.node >> type >> e.duration_slots)) {
      throw InvalidParameter("event log: malformed line '" + line + "'");
    }
    if (type == "success") {
      e.type = ChannelEventType::success;
    } else if (type == "collision") {
      e.type = ChannelEventType::collision;
    } else {
      throw InvalidParameter("event log: unknown event type '" + type + "'");
    }
    events.push_back(e);
  }
  return events;
}

}  // namespace wlansat
