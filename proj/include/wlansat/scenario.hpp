#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wlansat/errors.hpp"

namespace wlansat {

using WlanId = std::uint32_t;

// Subset of WLAN ids; bit i set means WLAN i is a member.
using WlanMask = std::uint32_t;

inline constexpr std::size_t kMaxWlans = 24;

// PHY/MAC timing and contention parameters shared by every WLAN of a scenario.
// Durations are in seconds, payload in bits.
struct PhyMacParams {
  double t_e = 9e-6;       // empty backoff slot
  double e_t = 6.63e-3;    // successful transmission, mu = 1 / e_t
  double e_tc = 6.63e-3;   // collision
  int cw_min = 32;
  int m = 5;               // backoff stages, CW_max = 2^m * cw_min
  double l_bits = 768000;  // payload delivered per successful channel access

  double mu() const { return 1.0 / e_t; }
  long long cw_max() const { return static_cast<long long>(cw_min) << m; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(std::isfinite(v) && v > 0)) {
        throw InvalidParameter(std::string(name) + " must be a positive finite number");
      }
    };
    positive(t_e, "t_e_s");
    positive(e_t, "e_t_s");
    positive(e_tc, "e_tc_s");
    positive(l_bits, "l_bits");
    if (cw_min < 2) throw InvalidParameter("cw_min must be >= 2");
    if (m < 0) throw InvalidParameter("m must be >= 0");
    // CW_max has to fit comfortably in a 64-bit slot counter.
    if (m > 40 || (static_cast<long double>(cw_min) * std::ldexp(1.0L, m)) > 1e15L) {
      throw InvalidParameter("m: CW_max = 2^m * cw_min is not representable");
    }
  }
};

struct Wlan {
  WlanId id = 0;
  int n_nodes = 1;  // one AP plus n_nodes - 1 stations
};

// Undirected overlap graph over WLAN ids 0..W-1, stored as neighbor masks.
class ConflictGraph {
 public:
  ConflictGraph() = default;
  explicit ConflictGraph(std::size_t wlan_count) : neighbors_(wlan_count, 0) {
    if (wlan_count > kMaxWlans) {
      throw StateSpaceTooLarge("at most " + std::to_string(kMaxWlans) + " WLANs are supported");
    }
  }

  ConflictGraph(std::size_t wlan_count, const std::vector<std::pair<WlanId, WlanId>>& edges)
      : ConflictGraph(wlan_count) {
    for (auto [a, b] : edges) add_edge(a, b);
  }

  void add_edge(WlanId a, WlanId b) {
    if (a >= size() || b >= size()) {
      throw InvalidParameter("edges: endpoint " + std::to_string(a >= size() ? a : b) +
                             " is not a WLAN id");
    }
    if (a == b) throw InvalidParameter("edges: self-edge on WLAN " + std::to_string(a));
    neighbors_[a] |= WlanMask{1} << b;
    neighbors_[b] |= WlanMask{1} << a;
  }

  std::size_t size() const { return neighbors_.size(); }

  bool adjacent(WlanId a, WlanId b) const { return (neighbors_.at(a) >> b) & 1u; }

  WlanMask neighbors(WlanId a) const { return neighbors_.at(a); }

  // Neighbors plus the WLAN itself: everything a node of `a` carrier-senses.
  WlanMask closed_neighborhood(WlanId a) const { return neighbors_.at(a) | (WlanMask{1} << a); }

  bool independent(WlanMask set) const {
    for (WlanId i = 0; i < size(); ++i) {
      if (((set >> i) & 1u) && (neighbors_[i] & set)) return false;
    }
    return true;
  }

  std::vector<std::pair<WlanId, WlanId>> edges() const {
    std::vector<std::pair<WlanId, WlanId>> out;
    for (WlanId a = 0; a < size(); ++a) {
      for (WlanId b = a + 1; b < size(); ++b) {
        if (adjacent(a, b)) out.emplace_back(a, b);
      }
    }
    return out;
  }

 private:
  std::vector<WlanMask> neighbors_;
};

// The single input object: WLANs, who overlaps with whom, and PHY/MAC parameters.
// Immutable once constructed.
class Scenario {
 public:
  Scenario(std::vector<Wlan> wlans, ConflictGraph graph, PhyMacParams params)
      : wlans_(std::move(wlans)), graph_(std::move(graph)), params_(params) {
    if (wlans_.empty()) throw InvalidParameter("wlans: at least one WLAN is required");
    if (wlans_.size() > kMaxWlans) {
      throw StateSpaceTooLarge("wlans: at most " + std::to_string(kMaxWlans) +
                               " WLANs are supported, got " + std::to_string(wlans_.size()));
    }
    for (std::size_t i = 0; i < wlans_.size(); ++i) {
      if (wlans_[i].id != i) {
        throw InvalidParameter("wlans: ids must be dense 0..W-1 in order, found id " +
                               std::to_string(wlans_[i].id) + " at position " + std::to_string(i));
      }
      if (wlans_[i].n_nodes < 1) {
        throw InvalidParameter("wlans: n_nodes of WLAN " + std::to_string(i) + " must be >= 1");
      }
    }
    if (graph_.size() != wlans_.size()) {
      throw InvalidParameter("edges: conflict graph size does not match the WLAN count");
    }
    params_.validate();
  }

  // Convenience: WLANs 0..n_nodes.size()-1 with the given node counts.
  static Scenario make(const std::vector<int>& n_nodes,
                       const std::vector<std::pair<WlanId, WlanId>>& edges,
                       const PhyMacParams& params) {
    std::vector<Wlan> wlans;
    for (std::size_t i = 0; i < n_nodes.size(); ++i) {
      wlans.push_back({static_cast<WlanId>(i), n_nodes[i]});
    }
    return Scenario(std::move(wlans), ConflictGraph(n_nodes.size(), edges), params);
  }

  const std::vector<Wlan>& wlans() const { return wlans_; }
  const Wlan& wlan(WlanId id) const { return wlans_.at(id); }
  const ConflictGraph& graph() const { return graph_; }
  const PhyMacParams& params() const { return params_; }
  std::size_t size() const { return wlans_.size(); }

  Scenario with_params(const PhyMacParams& params) const { return Scenario(wlans_, graph_, params); }

  Scenario with_uniform_nodes(int n_nodes) const {
    auto wlans = wlans_;
    for (auto& w : wlans) w.n_nodes = n_nodes;
    return Scenario(std::move(wlans), graph_, params_);
  }

 private:
  std::vector<Wlan> wlans_;
  ConflictGraph graph_;
  PhyMacParams params_;
};

// Aggregate channel-access rate of a WLAN under continuous backoff, in 1/s.
inline double lambda_of(const Wlan& wlan, const PhyMacParams& params) {
  if (params.cw_min < 2) throw InvalidParameter("cw_min must be >= 2");
  if (!(params.t_e > 0)) throw InvalidParameter("t_e_s must be positive");
  return wlan.n_nodes * 2.0 / ((params.cw_min - 1) * params.t_e);
}

inline double theta_of(const Wlan& wlan, const PhyMacParams& params) {
  if (!(params.e_t > 0)) throw InvalidParameter("e_t_s must be positive");
  return lambda_of(wlan, params) * params.e_t;
}

inline std::vector<double> thetas_of(const Scenario& scenario) {
  std::vector<double> out;
  out.reserve(scenario.size());
  for (const auto& w : scenario.wlans()) out.push_back(theta_of(w, scenario.params()));
  return out;
}

inline std::vector<double> lambdas_of(const Scenario& scenario) {
  std::vector<double> out;
  out.reserve(scenario.size());
  for (const auto& w : scenario.wlans()) out.push_back(lambda_of(w, scenario.params()));
  return out;
}

// Letter names A, B, C, ... used in text output; falls back to numbers past Z.
inline std::string wlan_name(WlanId id) {
  if (id < 26) return std::string(1, static_cast<char>('A' + id));
  return std::to_string(id);
}

}  // namespace wlansat
