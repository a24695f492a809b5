#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wlansat/errors.hpp"
#include "wlansat/scenario.hpp"

namespace wlansat {

struct SimConfig {
  explicit SimConfig(Scenario s) : scenario(std::move(s)) {}

  Scenario scenario;
  double duration = 60.0;  // simulated seconds, warmup included
  double warmup = 1.0;
  std::uint64_t seed = 1;
  int replications = 10;
  bool event_log = false;
  bool parallel = true;

  void validate() const {
    if (!(std::isfinite(duration) && std::isfinite(warmup))) {
      throw InvalidParameter("duration and warmup must be finite");
    }
    if (!(warmup >= 0.0)) throw InvalidParameter("warmup must be >= 0");
    if (!(duration > warmup)) throw InvalidParameter("duration must exceed warmup");
    if (replications < 1) throw InvalidParameter("replications must be >= 1");
  }
};

enum class ChannelEventType { success, collision };

inline const char* to_string(ChannelEventType t) {
  return t == ChannelEventType::success ? "success" : "collision";
}

// One transmission attempt on the channel.
struct ChannelEvent {
  std::int64_t start_slot = 0;
  WlanId wlan = 0;
  int node = 0;  // index within its WLAN
  ChannelEventType type = ChannelEventType::success;
  std::int64_t duration_slots = 0;
};

// Attempts classified by the set of WLANs already transmitting when they started.
struct ProbeCell {
  std::int64_t attempts = 0;
  std::int64_t collisions = 0;
  std::int64_t success_slots = 0;
  std::int64_t attempt_slots = 0;
};

struct ReplicationResult {
  std::vector<double> throughput;  // bits/s per WLAN
  std::vector<std::int64_t> successes;
  std::vector<std::int64_t> collisions;
  std::int64_t measured_slots = 0;
  std::map<WlanMask, std::int64_t> state_slots;  // airtime by set of transmitting WLANs
  std::map<std::pair<WlanId, WlanMask>, ProbeCell> probe;
  std::vector<ChannelEvent> events;
};

struct SimulationResult {
  std::vector<double> throughput;  // mean over replications, bits/s
  std::vector<double> std_error;
  std::vector<std::int64_t> successes;  // summed over replications
  std::vector<std::int64_t> collisions;
  std::map<WlanMask, double> state_share;  // fraction of measured airtime
  std::vector<ReplicationResult> replications;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Unbiased draw from [0, bound) by rejection; std distributions are not
// specified bit-exactly across standard libraries, the engine is.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

struct SimNode {
  WlanId wlan = 0;
  int index = 0;
  std::int64_t counter = 0;
  int stage = 0;
  bool starting = false;
};

inline std::int64_t to_slots(double seconds, double slot) {
  return std::max<std::int64_t>(1, std::llround(seconds / slot));
}

}  // namespace detail

// One replication of the slotted CSMA/CA process. Every node keeps its own
// backoff counter; a node counts down in slots where nothing in its WLAN or an
// adjacent WLAN is on air (the slot in which a neighbor starts still counts)
// and freezes otherwise. Nodes reaching zero transmit; a transmitter succeeds
// when no other transmitter in its sensing neighborhood started in that slot.
inline ReplicationResult simulate_replication(const SimConfig& config, std::uint64_t stream_seed) {
  const auto& scenario = config.scenario;
  const auto& params = scenario.params();
  const auto& graph = scenario.graph();
  const std::size_t w_count = scenario.size();

  const std::int64_t success_slots = detail::to_slots(params.e_t, params.t_e);
  const std::int64_t collision_slots = detail::to_slots(params.e_tc, params.t_e);
  const std::int64_t end_slot = std::llround(config.duration / params.t_e);
  const std::int64_t warmup_slot = std::llround(config.warmup / params.t_e);

  std::mt19937_64 rng(stream_seed);
  auto draw = [&](int stage) {
    const auto cw = static_cast<std::uint64_t>(params.cw_min) << stage;
    return static_cast<std::int64_t>(detail::uniform_below(rng, cw));
  };

  std::vector<detail::SimNode> nodes;
  for (const auto& w : scenario.wlans()) {
    for (int k = 0; k < w.n_nodes; ++k) nodes.push_back({w.id, k, 0, 0, false});
  }
  for (auto& n : nodes) n.counter = draw(0);

  std::vector<WlanMask> sense(w_count);
  for (WlanId w = 0; w < w_count; ++w) sense[w] = graph.closed_neighborhood(w);

  ReplicationResult out;
  out.throughput.assign(w_count, 0.0);
  out.successes.assign(w_count, 0);
  out.collisions.assign(w_count, 0);

  std::vector<std::int64_t> on_air_until(w_count, 0);  // last transmission end per WLAN
  std::vector<std::int64_t> busy_until(w_count, 0);
  std::vector<std::size_t> starters;
  std::vector<int> starters_per_wlan(w_count, 0);

  std::int64_t t = 0;
  while (t < end_slot) {
    WlanMask active = 0;
    for (WlanId w = 0; w < w_count; ++w) {
      if (on_air_until[w] > t) active |= WlanMask{1} << w;
    }
    for (WlanId w = 0; w < w_count; ++w) {
      std::int64_t until = 0;
      for (WlanMask rest = sense[w]; rest != 0; rest &= rest - 1) {
        until = std::max(until, on_air_until[static_cast<std::size_t>(std::countr_zero(rest))]);
      }
      busy_until[w] = until;
    }

    starters.clear();
    std::int64_t min_counter = std::numeric_limits<std::int64_t>::max();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto& n = nodes[k];
      if (busy_until[n.wlan] > t) continue;
      if (n.counter == 0) starters.push_back(k);
      min_counter = std::min(min_counter, n.counter);
    }

    std::int64_t step;
    WlanMask interval_active = active;
    if (starters.empty()) {
      // Nothing starts before the smallest running counter expires or an
      // ongoing transmission ends.
      step = min_counter;
      for (WlanId w = 0; w < w_count; ++w) {
        if (on_air_until[w] > t) step = std::min(step, on_air_until[w] - t);
      }
      step = std::min(step, end_slot - t);
      for (auto& n : nodes) {
        if (busy_until[n.wlan] <= t) n.counter -= step;
      }
    } else {
      step = 1;
      std::fill(starters_per_wlan.begin(), starters_per_wlan.end(), 0);
      for (auto k : starters) ++starters_per_wlan[nodes[k].wlan];
      const bool measured = t >= warmup_slot;
      for (auto k : starters) {
        auto& n = nodes[k];
        int contenders = 0;
        for (WlanMask rest = sense[n.wlan]; rest != 0; rest &= rest - 1) {
          contenders += starters_per_wlan[static_cast<std::size_t>(std::countr_zero(rest))];
        }
        const bool success = contenders == 1;
        const std::int64_t length = success ? success_slots : collision_slots;
        on_air_until[n.wlan] = std::max(on_air_until[n.wlan], t + length);
        if (measured) {
          auto& cell = out.probe[{n.wlan, active}];
          ++cell.attempts;
          cell.attempt_slots += length;
          if (success) {
            ++out.successes[n.wlan];
            cell.success_slots += length;
          } else {
            ++out.collisions[n.wlan];
            ++cell.collisions;
          }
        }
        if (config.event_log) {
          out.events.push_back({t, n.wlan, n.index,
                                success ? ChannelEventType::success : ChannelEventType::collision, length});
        }
        n.stage = success ? 0 : std::min(n.stage + 1, params.m);
        // Full buffer: the next backoff is drawn now and starts counting once
        // the channel is sensed idle after this transmission.
        n.counter = draw(n.stage);
        n.starting = true;
      }
      for (auto& n : nodes) {
        if (busy_until[n.wlan] <= t && !n.starting) n.counter -= 1;
      }
      for (auto k : starters) nodes[k].starting = false;
      for (WlanId w = 0; w < w_count; ++w) {
        if (on_air_until[w] > t) interval_active |= WlanMask{1} << w;
      }
    }

    if (t >= warmup_slot) {
      out.state_slots[interval_active] += step;
    } else if (t + step > warmup_slot) {
      out.state_slots[interval_active] += t + step - warmup_slot;
    }
    t += step;
  }

  out.measured_slots = end_slot - warmup_slot;
  const double seconds = static_cast<double>(out.measured_slots) * params.t_e;
  for (WlanId w = 0; w < w_count; ++w) {
    out.throughput[w] = static_cast<double>(out.successes[w]) * params.l_bits / seconds;
  }
  return out;
}

inline std::uint64_t replication_seed(std::uint64_t seed, int replication) {
  return detail::splitmix64(detail::splitmix64(seed) + static_cast<std::uint64_t>(replication));
}

inline SimulationResult simulate(const SimConfig& config) {
  config.validate();
  std::vector<ReplicationResult> reps(static_cast<std::size_t>(config.replications));
  if (config.parallel && config.replications > 1) {
    std::vector<std::future<ReplicationResult>> jobs;
    for (int r = 0; r < config.replications; ++r) {
      jobs.push_back(std::async(std::launch::async, [&config, r] {
        return simulate_replication(config, replication_seed(config.seed, r));
      }));
    }
    for (std::size_t r = 0; r < jobs.size(); ++r) reps[r] = jobs[r].get();
  } else {
    for (int r = 0; r < config.replications; ++r) {
      reps[static_cast<std::size_t>(r)] = simulate_replication(config, replication_seed(config.seed, r));
    }
  }

  const std::size_t w_count = config.scenario.size();
  const double count = static_cast<double>(reps.size());
  SimulationResult result;
  result.throughput.assign(w_count, 0.0);
  result.std_error.assign(w_count, 0.0);
  result.successes.assign(w_count, 0);
  result.collisions.assign(w_count, 0);
  std::int64_t total_slots = 0;
  for (const auto& rep : reps) {
    for (std::size_t w = 0; w < w_count; ++w) {
      result.throughput[w] += rep.throughput[w] / count;
      result.successes[w] += rep.successes[w];
      result.collisions[w] += rep.collisions[w];
    }
    for (auto [mask, slots] : rep.state_slots) result.state_share[mask] += static_cast<double>(slots);
    total_slots += rep.measured_slots;
  }
  for (auto& [mask, share] : result.state_share) share /= static_cast<double>(total_slots);
  if (reps.size() > 1) {
    for (std::size_t w = 0; w < w_count; ++w) {
      double ss = 0.0;
      for (const auto& rep : reps) {
        const double dev = rep.throughput[w] - result.throughput[w];
        ss += dev * dev;
      }
      result.std_error[w] = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
  }
  result.replications = std::move(reps);
  return result;
}

// Per (WLAN, predecessor set) attempt statistics pooled over replications.
struct GammaProbeEntry {
  WlanId wlan = 0;
  WlanMask predecessor = 0;
  std::int64_t attempts = 0;
  std::int64_t collisions = 0;
  double collision_fraction = 0;
  double success_airtime_share = 0;  // successful airtime / measured airtime
  double attempt_airtime_share = 0;
};

inline std::vector<GammaProbeEntry> gamma_probe(const SimulationResult& result) {
  std::map<std::pair<WlanId, WlanMask>, ProbeCell> pooled;
  std::int64_t total_slots = 0;
  for (const auto& rep : result.replications) {
    total_slots += rep.measured_slots;
    for (const auto& [key, cell] : rep.probe) {
      auto& acc = pooled[key];
      acc.attempts += cell.attempts;
      acc.collisions += cell.collisions;
      acc.success_slots += cell.success_slots;
      acc.attempt_slots += cell.attempt_slots;
    }
  }
  std::vector<GammaProbeEntry> out;
  for (const auto& [key, cell] : pooled) {
    GammaProbeEntry e;
    e.wlan = key.first;
    e.predecessor = key.second;
    e.attempts = cell.attempts;
    e.collisions = cell.collisions;
    e.collision_fraction =
        cell.attempts > 0 ? static_cast<double>(cell.collisions) / static_cast<double>(cell.attempts) : 0.0;
    e.success_airtime_share = static_cast<double>(cell.success_slots) / static_cast<double>(total_slots);
    e.attempt_airtime_share = static_cast<double>(cell.attempt_slots) / static_cast<double>(total_slots);
    out.push_back(e);
  }
  return out;
}

inline std::vector<GammaProbeEntry> gamma_probe(const SimConfig& config) { return gamma_probe(simulate(config)); }

struct AuditReport {
  std::int64_t overlap_violations = 0;    // neighbors on air together without a common start slot
  std::int64_t outcome_violations = 0;    // success/collision label inconsistent with same-slot starters
};

// Checks an event log against the carrier-sensing rules of the scenario.
inline AuditReport audit_event_log(const Scenario& scenario, std::vector<ChannelEvent> events) {
  const auto& graph = scenario.graph();
  std::sort(events.begin(), events.end(), [](const ChannelEvent& a, const ChannelEvent& b) {
    return a.start_slot != b.start_slot ? a.start_slot < b.start_slot : a.wlan < b.wlan;
  });
  AuditReport report;
  std::vector<const ChannelEvent*> on_air;
  for (std::size_t k = 0; k < events.size();) {
    const auto slot = events[k].start_slot;
    std::size_t batch_end = k;
    while (batch_end < events.size() && events[batch_end].start_slot == slot) ++batch_end;

    std::erase_if(on_air, [slot](const ChannelEvent* e) { return e->start_slot + e->duration_slots <= slot; });
    for (std::size_t i = k; i < batch_end; ++i) {
      const auto& e = events[i];
      const WlanMask sensed = graph.closed_neighborhood(e.wlan);
      for (const auto* other : on_air) {
        if ((sensed >> other->wlan) & 1u) ++report.overlap_violations;
      }
      int same_slot = 0;
      for (std::size_t j = k; j < batch_end; ++j) {
        if (j != i && ((sensed >> events[j].wlan) & 1u)) ++same_slot;
      }
      const bool collided = same_slot > 0;
      if (collided != (e.type == ChannelEventType::collision)) ++report.outcome_violations;
    }
    for (std::size_t i = k; i < batch_end; ++i) on_air.push_back(&events[i]);
    k = batch_end;
  }
  return report;
}

}  // namespace wlansat
