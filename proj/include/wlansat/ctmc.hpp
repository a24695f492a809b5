#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "wlansat/errors.hpp"
#include "wlansat/scenario.hpp"

namespace wlansat {

// A set of WLANs transmitting at the same time.
class FeasibleState {
 public:
  constexpr FeasibleState() = default;
  constexpr explicit FeasibleState(WlanMask mask) : mask_(mask) {}

  static FeasibleState of(std::initializer_list<WlanId> ids) {
    WlanMask mask = 0;
    for (auto id : ids) mask |= WlanMask{1} << id;
    return FeasibleState(mask);
  }

  constexpr WlanMask mask() const { return mask_; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(WlanId id) const { return (mask_ >> id) & 1u; }
  constexpr FeasibleState with(WlanId id) const { return FeasibleState(mask_ | (WlanMask{1} << id)); }
  constexpr FeasibleState without(WlanId id) const { return FeasibleState(mask_ & ~(WlanMask{1} << id)); }

  std::vector<WlanId> members() const {
    std::vector<WlanId> out;
    for (WlanMask rest = mask_; rest != 0; rest &= rest - 1) {
      out.push_back(static_cast<WlanId>(std::countr_zero(rest)));
    }
    return out;
  }

  // "{}" for the idle state, otherwise e.g. "{A,C}".
  std::string label() const {
    std::string out = "{";
    bool first = true;
    for (auto id : members()) {
      if (!first) out += ',';
      out += wlan_name(id);
      first = false;
    }
    return out + "}";
  }

  friend constexpr bool operator==(FeasibleState, FeasibleState) = default;
  friend constexpr auto operator<=>(FeasibleState a, FeasibleState b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.mask_ <=> b.mask_;
  }

 private:
  WlanMask mask_ = 0;
};

// All independent sets of the conflict graph, ordered by (size, mask).
class FeasibleStateSpace {
 public:
  FeasibleStateSpace(ConflictGraph graph, std::vector<FeasibleState> states)
      : graph_(std::move(graph)), states_(std::move(states)) {
    index_.reserve(states_.size());
    for (std::size_t k = 0; k < states_.size(); ++k) index_.emplace(states_[k].mask(), k);
  }

  const ConflictGraph& graph() const { return graph_; }
  std::size_t wlan_count() const { return graph_.size(); }
  std::size_t size() const { return states_.size(); }
  const std::vector<FeasibleState>& states() const { return states_; }
  const FeasibleState& operator[](std::size_t k) const { return states_[k]; }

  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }

  bool contains(FeasibleState s) const { return index_.contains(s.mask()); }

  std::size_t index_of(FeasibleState s) const {
    auto it = index_.find(s.mask());
    if (it == index_.end()) throw ContractViolation("state " + s.label() + " is not feasible");
    return it->second;
  }

  // WLANs that could start transmitting from state s without breaking feasibility.
  WlanMask addable(FeasibleState s) const {
    WlanMask blocked = s.mask();
    for (auto id : s.members()) blocked |= graph_.neighbors(id);
    WlanMask all = graph_.size() == 32 ? ~WlanMask{0} : ((WlanMask{1} << graph_.size()) - 1);
    return all & ~blocked;
  }

  // Number of states of each size 0..max.
  std::vector<std::size_t> size_histogram() const {
    std::vector<std::size_t> hist;
    for (const auto& s : states_) {
      if (hist.size() <= static_cast<std::size_t>(s.size())) hist.resize(s.size() + 1, 0);
      ++hist[s.size()];
    }
    return hist;
  }

 private:
  ConflictGraph graph_;
  std::vector<FeasibleState> states_;
  std::unordered_map<WlanMask, std::size_t> index_;
};

// Builds the state space level by level: each feasible state is extended by one
// non-adjacent WLAN with a higher id than all its members, so every independent
// set is produced exactly once and infeasible subsets are never visited.
inline FeasibleStateSpace enumerate_states(const ConflictGraph& graph) {
  if (graph.size() > kMaxWlans) {
    throw StateSpaceTooLarge("at most " + std::to_string(kMaxWlans) + " WLANs are supported");
  }
  const auto w = static_cast<WlanId>(graph.size());
  std::vector<FeasibleState> all{FeasibleState{}};
  std::vector<FeasibleState> level{FeasibleState{}};
  while (!level.empty()) {
    std::vector<FeasibleState> next;
    for (auto s : level) {
      WlanMask blocked = 0;
      for (auto id : s.members()) blocked |= graph.neighbors(id);
      WlanId first = s.empty() ? 0 : static_cast<WlanId>(32 - std::countl_zero(s.mask()));
      for (WlanId j = first; j < w; ++j) {
        if (!((blocked >> j) & 1u)) next.push_back(s.with(j));
      }
    }
    std::sort(next.begin(), next.end());
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return FeasibleStateSpace(graph, std::move(all));
}

inline FeasibleStateSpace enumerate_states(const Scenario& scenario) {
  return enumerate_states(scenario.graph());
}

// Maximal independent sets: no further WLAN can join without a conflict.
inline std::vector<FeasibleState> dominant_states(const FeasibleStateSpace& space) {
  std::vector<FeasibleState> out;
  for (const auto& s : space) {
    if (space.addable(s) == 0) out.push_back(s);
  }
  return out;
}

// Long-run occupancy probabilities, aligned with the state-space order.
class StationaryDistribution {
 public:
  explicit StationaryDistribution(std::vector<double> pi) : pi_(std::move(pi)) {}

  std::size_t size() const { return pi_.size(); }
  double operator[](std::size_t k) const { return pi_[k]; }
  std::span<const double> values() const { return pi_; }

  double of(const FeasibleStateSpace& space, FeasibleState s) const { return pi_[space.index_of(s)]; }

 private:
  std::vector<double> pi_;
};

// Product-form solution pi_s = prod_{i in s} theta_i / sum_z prod_{j in z} theta_j.
inline StationaryDistribution stationary_product_form(const FeasibleStateSpace& space,
                                                      std::span<const double> thetas) {
  if (thetas.size() != space.wlan_count()) {
    throw InvalidParameter("thetas: expected one ratio per WLAN");
  }
  for (double t : thetas) {
    if (!(std::isfinite(t) && t > 0)) throw InvalidParameter("theta must be positive and finite");
  }
  std::vector<long double> weight(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) {
    long double w = 1.0L;
    for (auto id : space[k].members()) w *= thetas[id];
    weight[k] = w;
  }
  std::vector<long double> sorted = weight;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  long double total = 0.0L;
  for (auto w : sorted) total += w;
  if (!std::isfinite(static_cast<double>(total)) || total > 1e300L) {
    throw NumericalError("product-form normalizing constant overflows double range");
  }
  std::vector<double> pi(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) pi[k] = static_cast<double>(weight[k] / total);
  return StationaryDistribution(std::move(pi));
}

inline constexpr std::size_t kMaxGeneratorStates = 4096;

// Solves pi Q = 0, sum pi = 1 on the explicit generator: s -> s+{i} at rate
// lambda_i when feasible, s -> s-{i} at rate mu. Dense LU; small spaces only.
inline StationaryDistribution stationary_generator_solve(const FeasibleStateSpace& space,
                                                         std::span<const double> lambdas, double mu) {
  const std::size_t n = space.size();
  if (n > kMaxGeneratorStates) {
    throw InvalidParameter("generator solve limited to " + std::to_string(kMaxGeneratorStates) +
                           " states, got " + std::to_string(n));
  }
  if (lambdas.size() != space.wlan_count()) {
    throw InvalidParameter("lambdas: expected one rate per WLAN");
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto s = space[k];
    const auto row = static_cast<Eigen::Index>(k);
    for (WlanId i = 0; i < space.wlan_count(); ++i) {
      if (s.contains(i)) {
        q(row, static_cast<Eigen::Index>(space.index_of(s.without(i)))) += mu;
      } else if (space.contains(s.with(i))) {
        q(row, static_cast<Eigen::Index>(space.index_of(s.with(i)))) += lambdas[i];
      }
    }
    q(row, row) = -q.row(row).sum();
  }
  // Transposed balance equations, last one replaced by the normalization.
  Eigen::MatrixXd a = q.transpose();
  a.row(static_cast<Eigen::Index>(n - 1)).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  rhs(static_cast<Eigen::Index>(n - 1)) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-300)) throw NumericalError("generator system is singular", rcond);
  Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) throw NumericalError("generator solve produced non-finite values");
  return StationaryDistribution(std::vector<double>(x.data(), x.data() + x.size()));
}

}  // namespace wlansat
