#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wlansat/bianchi.hpp"
#include "wlansat/ctmc.hpp"
#include "wlansat/scenario.hpp"

namespace wlansat {

enum class AnalysisMode { full, dominant_only };

inline std::string to_string(AnalysisMode mode) {
  return mode == AnalysisMode::full ? "full" : "dominant-only";
}

struct AnalysisOptions {
  AnalysisMode mode = AnalysisMode::full;
  // false reproduces the pure CTMC throughput (every gamma taken as 0).
  bool collisions = true;
};

// Collision correction for WLAN `wlan` entering `state` from `predecessor`.
struct GammaRecord {
  WlanId wlan = 0;
  FeasibleState state;
  FeasibleState predecessor;
  WlanMask contenders = 0;
  int k_nodes = 0;
  double y = 0;          // slotted-contention throughput, bits/s
  double gamma_raw = 0;  // before clamping to [0, 1]
  double gamma = 0;
  double p = 0;          // collision probability of the same slotted solve
  double tau = 0;
};

struct Contribution {
  WlanId wlan = 0;
  FeasibleState state;
  double pi = 0;
  double gamma = 0;  // value actually applied (0 when collisions are disabled)
  double term = 0;   // pi * (1 - gamma) * mu * L
};

struct ThroughputReport {
  AnalysisMode mode = AnalysisMode::full;
  bool collisions = true;
  std::vector<double> per_wlan;  // bits/s, indexed by WLAN id
  std::vector<Contribution> contributions;
  std::vector<GammaRecord> gammas;
  double dominant_mass = 1.0;  // occupancy covered by the states summed over
};

// Neighbors of `wlan` that are free to count down at `predecessor`: adjacent,
// not already active, and not blocked by an active WLAN.
inline WlanMask contender_set(WlanId wlan, FeasibleState predecessor, const FeasibleStateSpace& space) {
  if (wlan >= space.wlan_count()) throw ContractViolation("unknown WLAN id " + std::to_string(wlan));
  if (predecessor.contains(wlan) || !space.contains(predecessor) ||
      !space.contains(predecessor.with(wlan))) {
    throw ContractViolation("WLAN " + wlan_name(wlan) + " cannot be activated from " +
                            predecessor.label());
  }
  return space.graph().neighbors(wlan) & space.addable(predecessor);
}

namespace detail {

inline double renewal_throughput(const SlotProbabilities& slot, const PhyMacParams& params) {
  return slot.d * params.l_bits /
         (slot.a * params.t_e + slot.b * params.e_t + slot.c * params.e_tc);
}

}  // namespace detail

// Throughput of a WLAN with N_i nodes contending in a single collision domain
// against k other nodes, in bits/s.
inline double conditional_throughput(const Wlan& wlan, int k_nodes, const PhyMacParams& params) {
  if (k_nodes < 0) throw InvalidParameter("k_nodes must be >= 0");
  const auto point = solve_fixed_point(k_nodes + wlan.n_nodes, params.cw_min, params.m);
  return detail::renewal_throughput(slot_probabilities(point, wlan.n_nodes), params);
}

// Caches slotted fixed points by total node count; parameters are fixed per scenario.
class BianchiCache {
 public:
  explicit BianchiCache(const PhyMacParams& params) : params_(params) {}

  const BianchiPoint& at(int n_total) {
    auto it = points_.find(n_total);
    if (it == points_.end()) {
      it = points_.emplace(n_total, solve_fixed_point(n_total, params_.cw_min, params_.m)).first;
    }
    return it->second;
  }

 private:
  PhyMacParams params_;
  std::map<int, BianchiPoint> points_;
};

inline GammaRecord gamma_factor(WlanId wlan, FeasibleState predecessor, const Scenario& scenario,
                                const FeasibleStateSpace& space, std::span<const double> thetas,
                                BianchiCache& cache) {
  GammaRecord r;
  r.wlan = wlan;
  r.predecessor = predecessor;
  r.state = predecessor.with(wlan);
  r.contenders = contender_set(wlan, predecessor, space);

  double local = 1.0 + thetas[wlan];
  for (auto j : FeasibleState(r.contenders).members()) {
    r.k_nodes += scenario.wlan(j).n_nodes;
    local += thetas[j];
  }

  const auto& params = scenario.params();
  const int n_tagged = scenario.wlan(wlan).n_nodes;
  const auto& point = cache.at(r.k_nodes + n_tagged);
  r.p = point.p;
  r.tau = point.tau;
  r.y = detail::renewal_throughput(slot_probabilities(point, n_tagged), params);

  const double ctmc_local = params.mu() * params.l_bits * thetas[wlan] / local;
  r.gamma_raw = 1.0 - r.y / ctmc_local;
  r.gamma = std::clamp(r.gamma_raw, 0.0, 1.0);
  return r;
}

inline GammaRecord gamma_factor(WlanId wlan, FeasibleState predecessor, const Scenario& scenario,
                                const FeasibleStateSpace& space) {
  const auto thetas = thetas_of(scenario);
  BianchiCache cache(scenario.params());
  return gamma_factor(wlan, predecessor, scenario, space, thetas, cache);
}

// Dominant states plus every state one departure away from them.
inline std::vector<FeasibleState> dominant_support(const FeasibleStateSpace& space) {
  std::set<FeasibleState> support;
  for (auto s : dominant_states(space)) {
    support.insert(s);
    for (auto j : s.members()) support.insert(s.without(j));
  }
  return {support.begin(), support.end()};
}

// Per-WLAN throughput: sum over states s containing i of pi_s (1 - gamma) mu L,
// with gamma evaluated on the transition from s \ {i}.
inline ThroughputReport analyze(const Scenario& scenario, const FeasibleStateSpace& space,
                                const AnalysisOptions& options = {}) {
  const auto thetas = thetas_of(scenario);
  const auto pi = stationary_product_form(space, thetas);
  const auto& params = scenario.params();
  const double capacity = params.mu() * params.l_bits;

  ThroughputReport report;
  report.mode = options.mode;
  report.collisions = options.collisions;
  report.per_wlan.assign(scenario.size(), 0.0);

  std::vector<FeasibleState> support =
      options.mode == AnalysisMode::full ? space.states() : dominant_support(space);
  std::sort(support.begin(), support.end());

  BianchiCache cache(params);
  report.dominant_mass = 0.0;
  for (auto s : support) {
    const double pi_s = pi.of(space, s);
    report.dominant_mass += pi_s;
    for (auto i : s.members()) {
      auto record = gamma_factor(i, s.without(i), scenario, space, thetas, cache);
      const double gamma = options.collisions ? record.gamma : 0.0;
      const double term = pi_s * (1.0 - gamma) * capacity;
      report.contributions.push_back({i, s, pi_s, gamma, term});
      report.per_wlan[i] += term;
      report.gammas.push_back(std::move(record));
    }
  }
  return report;
}

inline ThroughputReport analyze(const Scenario& scenario, const AnalysisOptions& options = {}) {
  return analyze(scenario, enumerate_states(scenario), options);
}

}  // namespace wlansat
