#pragma once

#include "wlansat/scenario.hpp"

namespace wlansat {

// IEEE 802.11ac, 40 MHz, 64-QAM 3/4, 64-packet A-MPDUs of 12000 bits.
inline PhyMacParams reference_params() {
  PhyMacParams p;
  p.t_e = 9e-6;
  p.e_t = 6.63e-3;
  p.e_tc = 6.63e-3;
  p.cw_min = 32;
  p.m = 5;
  p.l_bits = 768000;
  return p;
}

// Three mutually overlapping WLANs (triangle).
inline Scenario scenario_one(int n_nodes, const PhyMacParams& params = reference_params()) {
  return Scenario::make({n_nodes, n_nodes, n_nodes}, {{0, 1}, {0, 2}, {1, 2}}, params);
}

// A - B - C in a line; A and C do not overlap.
inline Scenario scenario_two(int n_nodes, const PhyMacParams& params = reference_params()) {
  return Scenario::make({n_nodes, n_nodes, n_nodes}, {{0, 1}, {1, 2}}, params);
}

// The line A - B - C plus D and E, which overlap only with C.
inline Scenario scenario_three(int n_nodes, const PhyMacParams& params = reference_params()) {
  return Scenario::make({n_nodes, n_nodes, n_nodes, n_nodes, n_nodes},
                        {{0, 1}, {1, 2}, {2, 3}, {2, 4}}, params);
}

}  // namespace wlansat
