#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "wlansat/errors.hpp"

namespace wlansat {

// Saturated slotted-DCF operating point for n_total contending nodes.
struct BianchiPoint {
  int n_total = 1;
  double tau = 0;  // per-slot transmission probability
  double p = 0;    // conditional collision probability
  double e_b = 0;  // expected backoff, in slots

  // Residuals of the two fixed-point equations at (tau, p, e_b).
  double tau_residual() const { return std::abs(tau - 1.0 / (e_b + 1.0)); }
  double p_residual() const { return std::abs(p - (1.0 - std::pow(1.0 - tau, n_total - 1))); }
};

struct SlotProbabilities {
  double a = 0;  // empty
  double b = 0;  // success by any node
  double c = 0;  // collision
  double d = 0;  // success by the tagged WLAN's nodes
};

namespace detail {

// (1 + p * sum_{j<m} (2p)^j) * cw_min / 2 - 1/2, evaluated by Horner's rule.
// Identical to the rational form (1 - p - p(2p)^m) / (1 - 2p) * cw_min / 2 - 1/2
// but without the removable singularity at p = 1/2. Accepts p in [0, 1].
inline double expected_backoff_unchecked(double p, int cw_min, int m) {
  double geometric = 0.0;
  for (int j = 0; j < m; ++j) geometric = 1.0 + 2.0 * p * geometric;
  return (1.0 + p * geometric) * cw_min / 2.0 - 0.5;
}

inline double collision_probability(double tau, int n_total) {
  return -std::expm1((n_total - 1) * std::log1p(-tau));
}

inline BianchiPoint point_at(double tau, int n_total, int cw_min, int m) {
  BianchiPoint pt;
  pt.n_total = n_total;
  pt.tau = tau;
  pt.p = collision_probability(tau, n_total);
  pt.e_b = expected_backoff_unchecked(pt.p, cw_min, m);
  return pt;
}

// g(tau) = tau - 1 / (E[B](p(tau)) + 1); strictly increasing, single root in (0, 1).
inline double fixed_point_gap(double tau, int n_total, int cw_min, int m) {
  const double p = collision_probability(tau, n_total);
  return tau - 1.0 / (expected_backoff_unchecked(p, cw_min, m) + 1.0);
}

}  // namespace detail

// Expected backoff in slots given the collision probability p.
inline double expected_backoff(double p, int cw_min, int m) {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidParameter("p must lie in [0, 1)");
  if (cw_min < 2) throw InvalidParameter("cw_min must be >= 2");
  if (m < 0) throw InvalidParameter("m must be >= 0");
  return detail::expected_backoff_unchecked(p, cw_min, m);
}

inline constexpr double kFixedPointTolerance = 1e-13;

// Solves tau = 1/(E[B]+1), p = 1-(1-tau)^(n-1), E[B] = E[B](p) simultaneously.
//
// Damped iteration tau <- (1-a) tau + a/(E[B]+1) with a = 0.5 from
// tau0 = 2/(cw_min+1); if it has not reached kFixedPointTolerance within the
// iteration cap the monotone gap function is bisected instead. The result is
// finally polished by bisection on a bracket around the iterate so residuals
// sit at round-off level.
inline BianchiPoint solve_fixed_point(int n_total, int cw_min, int m) {
  if (n_total < 1) throw InvalidParameter("n_total must be >= 1");
  if (cw_min < 2) throw InvalidParameter("cw_min must be >= 2");
  if (m < 0) throw InvalidParameter("m must be >= 0");

  if (n_total == 1) {
    BianchiPoint pt;
    pt.n_total = 1;
    pt.p = 0.0;
    pt.e_b = cw_min / 2.0 - 0.5;
    pt.tau = 2.0 / (cw_min + 1.0);
    return pt;
  }

  constexpr double kDamping = 0.5;
  constexpr int kMaxIterations = 10000;

  auto gap = [&](double t) { return detail::fixed_point_gap(t, n_total, cw_min, m); };

  double tau = 2.0 / (cw_min + 1.0);
  bool converged = false;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double g = gap(tau);
    if (std::abs(g) <= kFixedPointTolerance) {
      converged = true;
      break;
    }
    // tau - g is the undamped map 1/(E[B]+1).
    tau = tau - kDamping * g;
  }

  double lo = 0.0;
  double hi = 1.0;
  if (converged) {
    // Tight bracket around the iterate, widened until it straddles the root.
    double width = 1e-12;
    lo = std::max(0.0, tau - width);
    hi = std::min(1.0, tau + width);
    while ((lo > 0.0 && gap(lo) > 0.0) || (hi < 1.0 && gap(hi) < 0.0)) {
      width *= 16.0;
      lo = std::max(0.0, tau - width);
      hi = std::min(1.0, tau + width);
    }
  }
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (gap(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  tau = std::abs(gap(lo)) <= std::abs(gap(hi)) ? lo : hi;

  BianchiPoint pt = detail::point_at(tau, n_total, cw_min, m);
  const double residual = std::max(pt.tau_residual(), pt.p_residual());
  if (!(residual <= 1e-10) || !(tau > 0.0 && tau <= 1.0)) {
    throw NumericalError("fixed point did not converge for n_total=" + std::to_string(n_total) +
                             ", cw_min=" + std::to_string(cw_min) + ", m=" + std::to_string(m),
                         residual);
  }
  return pt;
}

// Per-slot event probabilities of the renewal throughput form; n_tagged nodes belong
// to the WLAN whose successes are counted in d.
inline SlotProbabilities slot_probabilities(const BianchiPoint& point, int n_tagged) {
  if (n_tagged < 1 || n_tagged > point.n_total) {
    throw InvalidParameter("n_tagged must lie in [1, n_total]");
  }
  const double one_minus = 1.0 - point.tau;
  const double idle_others = std::pow(one_minus, point.n_total - 1);
  SlotProbabilities s;
  s.a = idle_others * one_minus;
  s.b = point.n_total * point.tau * idle_others;
  s.c = 1.0 - s.a - s.b;
  s.d = n_tagged * point.tau * idle_others;
  if (s.c < 0.0) s.c = 0.0;
  return s;
}

}  // namespace wlansat
