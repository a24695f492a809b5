// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wlansat/wlansat.hpp"

using namespace wlansat;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

PhyMacParams with_cw(int cw_min) {
  auto p = reference_params();
  p.cw_min = cw_min;
  return p;
}

std::vector<int> cw_grid() {
  std::vector<int> out;
  for (int cw = 4; cw <= 8192; cw *= 2) out.push_back(cw);
  return out;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& note) {
    if (!ok) {
      pass = false;
      notes.push_back(note);
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1. Product form vs. generator linear solve.
Outcome ctmc_oracle_equivalence() {
  Outcome o;
  const auto start = Clock::now();
  double worst = 0.0;
  for (const auto& s : {scenario_one(1), scenario_two(1), scenario_three(1)}) {
    const auto space = enumerate_states(s);
    const double mu = s.params().mu();
    for (double theta : {0.1, 1.0, 47.5}) {
      const std::vector<double> thetas(s.size(), theta);
      const std::vector<double> lambdas(s.size(), theta * mu);
      const auto a = stationary_product_form(space, thetas);
      const auto b = stationary_generator_solve(space, lambdas, mu);
      for (std::size_t k = 0; k < space.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    }
  }
  const double elapsed = seconds_since(start);
  o.require(worst <= 1e-9, fmt("max |pi_product - pi_generator| = %.3g > 1e-9", worst));
  o.require(elapsed < 1.0, fmt("runtime %.3f s >= 1 s", elapsed));
  o.notes.insert(o.notes.begin(), fmt("max diff %.3g, %.3f s", worst, elapsed));
  return o;
}

// 2. State-space sizes, dominant states and size histograms.
Outcome state_space_counts() {
  Outcome o;
  auto masks = [](const std::vector<FeasibleState>& v) {
    std::vector<WlanMask> out;
    for (auto s : v) out.push_back(s.mask());
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto one = enumerate_states(scenario_one(1));
  o.require(one.size() == 4, "scenario I: state count != 4");
  o.require(dominant_states(one).size() == 3, "scenario I: dominant count != 3");

  const auto two = enumerate_states(scenario_two(1));
  // Exactly empty, the three singletons and {A,C}: the 1 + 3t + t^2 denominator.
  std::vector<WlanMask> all2{0, FeasibleState::of({0}).mask(), FeasibleState::of({1}).mask(),
                             FeasibleState::of({2}).mask(), FeasibleState::of({0, 2}).mask()};
  std::sort(all2.begin(), all2.end());
  o.require(masks(two.states()) == all2, "scenario II: states != {}, A, B, C, {A,C}");
  o.require(two.size_histogram() == std::vector<std::size_t>{1, 3, 1}, "scenario II: histogram != (1,3,1)");
  o.require(two.contains(FeasibleState::of({0, 2})), "scenario II: {A,C} missing");
  std::vector<WlanMask> dom2{FeasibleState::of({1}).mask(), FeasibleState::of({0, 2}).mask()};
  std::sort(dom2.begin(), dom2.end());
  o.require(masks(dominant_states(two)) == dom2, "scenario II: dominant != {B}, {A,C}");

  const auto three = enumerate_states(scenario_three(1));
  o.require(three.size() == 14, "scenario III: state count != 14");
  o.require(three.size_histogram() == std::vector<std::size_t>{1, 5, 6, 2}, "scenario III: histogram != (1,5,6,2)");
  std::vector<WlanMask> dom3{FeasibleState::of({0, 2}).mask(), FeasibleState::of({0, 3, 4}).mask(),
                             FeasibleState::of({1, 3, 4}).mask()};
  std::sort(dom3.begin(), dom3.end());
  o.require(masks(dominant_states(three)) == dom3, "scenario III: dominant != {A,C}, {A,D,E}, {B,D,E}");
  o.notes.insert(o.notes.begin(), std::to_string(one.size()) + "/" + std::to_string(dominant_states(one).size()) + ", " +
                                     std::to_string(two.size()) + "/" + std::to_string(dominant_states(two).size()) + ", " +
                                     std::to_string(three.size()) + "/" + std::to_string(dominant_states(three).size()));
  return o;
}

// 3. Fixed-point residuals and agreement with bisection.
Outcome bianchi_solver() {
  Outcome o;
  const auto start = Clock::now();
  double worst_residual = 0.0, worst_gap = 0.0;
  for (int n : {1, 2, 4, 8, 16, 32, 48}) {
    for (int cw : {4, 16, 32, 256, 8192}) {
      for (int m : {0, 5}) {
        const auto pt = solve_fixed_point(n, cw, m);
        worst_residual = std::max({worst_residual, pt.tau_residual(), pt.p_residual()});
        const auto ref = oracle::bianchi_bisection(n, cw, m);
        worst_gap = std::max({worst_gap, std::abs(pt.tau - ref.tau), std::abs(pt.p - ref.p)});
        if (n == 1) {
          o.require(pt.p == 0.0 && pt.tau == 2.0 / (cw + 1.0),
                    fmt("n_total=1, cw_min=%g: p=%g tau=%g", cw, pt.p, pt.tau));
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  o.require(worst_residual <= 1e-10, fmt("max residual %.3g > 1e-10", worst_residual));
  o.require(worst_gap <= 1e-9, fmt("max |solver - bisection| %.3g > 1e-9", worst_gap));
  o.require(elapsed < 1.0, fmt("runtime %.3f s >= 1 s", elapsed));
  o.notes.insert(o.notes.begin(), fmt("residual %.3g, bisection gap %.3g, %.3f s", worst_residual, worst_gap, elapsed));
  return o;
}

// 4. Isolated single-node WLAN has no collision correction.
Outcome gamma_identity() {
  Outcome o;
  double worst = 0.0;
  for (int cw : cw_grid()) {
    const auto s = Scenario::make({1}, {}, with_cw(cw));
    const auto g = gamma_factor(0, FeasibleState{}, s, enumerate_states(s));
    worst = std::max(worst, std::abs(g.gamma_raw));
    const auto& p = s.params();
    const double renewal = p.l_bits / ((cw - 1) * p.t_e / 2 + p.e_t);
    o.require(std::abs(g.y / renewal - 1.0) < 1e-12, fmt("cw_min=%g: y differs from renewal value", cw));
  }
  o.require(worst < 1e-9, fmt("max |gamma_raw| %.3g >= 1e-9", worst));
  o.notes.insert(o.notes.begin(), fmt("max |gamma_raw| %.3g", worst));
  return o;
}

// 5. gamma <= p over the whole reference grid.
Outcome gamma_below_p() {
  Outcome o;
  std::size_t records = 0;
  double worst = -1.0;
  for (int which = 1; which <= 3; ++which) {
    for (int n : {1, 16}) {
      for (int cw : cw_grid()) {
        const auto p = with_cw(cw);
        const auto s = which == 1 ? scenario_one(n, p) : which == 2 ? scenario_two(n, p) : scenario_three(n, p);
        for (const auto& g : analyze(s).gammas) {
          ++records;
          worst = std::max(worst, g.gamma_raw - g.p);
          o.require(g.gamma_raw <= g.p + 1e-9,
                    "scenario " + std::to_string(which) + " N=" + std::to_string(n) + " cw_min=" +
                        std::to_string(cw) + " " + wlan_name(g.wlan) + "|" + g.predecessor.label() +
                        fmt(": gamma_raw %.6g > p %.6g", g.gamma_raw, g.p));
        }
      }
    }
  }
  o.notes.insert(o.notes.begin(), std::to_string(records) + " records, max(gamma_raw - p) = " + fmt("%.3g", worst));
  return o;
}

struct SimCase {
  int scenario;
  int n;
  int cw;
  double tolerance;
};

Scenario build(int which, int n, int cw) {
  const auto p = with_cw(cw);
  return which == 1 ? scenario_one(n, p) : which == 2 ? scenario_two(n, p) : scenario_three(n, p);
}

std::string case_name(const SimCase& c) {
  const char* roman[] = {"", "I", "II", "III"};
  return std::string(roman[c.scenario]) + " N=" + std::to_string(c.n) + " cw_min=" + std::to_string(c.cw);
}

// 6. Model against simulation, 10 replications x 60 s.
Outcome model_vs_simulation(std::vector<std::string>& table) {
  Outcome o;
  const auto start = Clock::now();
  std::vector<SimCase> cases;
  for (int n : {1, 16}) cases.push_back({1, n, 32, 0.10});
  for (int n : {1, 16}) {
    for (int cw : {16, 32, 256, 8192}) cases.push_back({2, n, cw, 0.10});
  }
  cases.push_back({3, 16, 16, 0.10});
  cases.push_back({3, 16, 512, 0.15});

  for (const auto& c : cases) {
    const auto s = build(c.scenario, c.n, c.cw);
    const auto model = analyze(s);
    SimConfig config(s);
    config.duration = 60.0;
    config.replications = 10;
    const auto sim = simulate(config);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double rel = (model.per_wlan[i] - sim.throughput[i]) / sim.throughput[i];
      const bool ok = std::abs(rel) <= c.tolerance;
      table.push_back(std::string(ok ? "    ok   " : "    MISS ") + case_name(c) + " " + wlan_name(static_cast<WlanId>(i)) +
                      fmt(": model %.5g  sim %.5g (se %.2g)  rel %+.2f%%", model.per_wlan[i], sim.throughput[i],
                          sim.std_error[i], 100 * rel));
      o.require(ok, case_name(c) + " " + wlan_name(static_cast<WlanId>(i)) +
                        fmt(": |rel| %.1f%% > %.0f%%", 100 * std::abs(rel), 100 * c.tolerance));
    }
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < 600.0, fmt("runtime %.1f s >= 600 s", elapsed));
  o.notes.insert(o.notes.begin(), fmt("%.1f s", elapsed));
  return o;
}

// 7. Without the collision correction the line scenario is badly overestimated.
Outcome ctmc_inadequacy() {
  Outcome o;
  const auto s = build(2, 16, 4);
  const auto corrected = analyze(s);
  const auto ctmc = analyze(s, {AnalysisMode::full, false});
  SimConfig config(s);
  const auto sim = simulate(config);
  for (WlanId i : {WlanId{0}, WlanId{2}}) {
    const double over = (ctmc.per_wlan[i] - sim.throughput[i]) / sim.throughput[i];
    const double rel = (corrected.per_wlan[i] - sim.throughput[i]) / sim.throughput[i];
    o.notes.push_back(wlan_name(i) + fmt(": ctmc %+.1f%%, corrected %+.2f%%", 100 * over, 100 * rel));
    o.require(over > 0.20, wlan_name(i) + fmt(": gamma=0 overestimate %.1f%% <= 20%%", 100 * over));
    o.require(std::abs(rel) <= 0.10, wlan_name(i) + fmt(": corrected |rel| %.1f%% > 10%%", 100 * std::abs(rel)));
  }
  return o;
}

// 8. Dominant-state mode against the full sum.
Outcome dominant_mode() {
  Outcome o;
  double worst = 0.0;
  for (int which = 1; which <= 3; ++which) {
    for (int n : {1, 16}) {
      const auto s = build(which, n, 32);
      const auto full = analyze(s);
      const auto dom = analyze(s, {AnalysisMode::dominant_only, true});
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double rel = std::abs(dom.per_wlan[i] / full.per_wlan[i] - 1.0);
        worst = std::max(worst, rel);
        o.require(rel <= 0.05, "scenario " + std::to_string(which) + " N=" + std::to_string(n) + " " +
                                   wlan_name(static_cast<WlanId>(i)) + fmt(": %.2f%% > 5%%", 100 * rel));
      }
    }
  }
  o.notes.insert(o.notes.begin(), fmt("max deviation %.3g%%", 100 * worst));
  return o;
}

// 9. Simulator sanity: renewal throughput, log audit, reproducibility.
Outcome simulator_sanity() {
  Outcome o;
  const auto p = reference_params();
  SimConfig single(Scenario::make({1}, {}, p));
  single.replications = 1;
  const auto r = simulate(single);
  const double expected = p.l_bits / ((p.cw_min - 1) / 2.0 * p.t_e + p.e_t);
  const double rel = r.throughput[0] / expected - 1.0;
  o.require(std::abs(rel) <= 0.01, fmt("isolated node off by %.2f%%", 100 * rel));

  SimConfig three(scenario_three(16));
  three.replications = 1;
  three.event_log = true;
  const auto run = simulate(three);
  const auto audit = audit_event_log(three.scenario, run.replications[0].events);
  o.require(audit.overlap_violations == 0 && audit.outcome_violations == 0,
            fmt("audit: %g overlap, %g outcome violations", static_cast<double>(audit.overlap_violations),
                static_cast<double>(audit.outcome_violations)));

  const auto again = simulate(three);
  bool identical = again.throughput == run.throughput && again.successes == run.successes &&
                   again.collisions == run.collisions &&
                   again.replications[0].events.size() == run.replications[0].events.size();
  for (std::size_t k = 0; identical && k < run.replications[0].events.size(); ++k) {
    const auto& a = run.replications[0].events[k];
    const auto& b = again.replications[0].events[k];
    identical = a.start_slot == b.start_slot && a.wlan == b.wlan && a.node == b.node && a.type == b.type;
  }
  o.require(identical, "repeated run with the same seed differs");
  o.notes.insert(o.notes.begin(), fmt("isolated %+.3f%%, %g events audited", 100 * rel,
                                      static_cast<double>(run.replications[0].events.size())));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<std::string> sim_table;
  const std::vector<Criterion> criteria{
      {"1 ctmc oracle equivalence", ctmc_oracle_equivalence},
      {"2 state-space counts", state_space_counts},
      {"3 bianchi solver", bianchi_solver},
      {"4 gamma identity", gamma_identity},
      {"5 gamma <= p", gamma_below_p},
      {"6 model vs simulation", [&] { return model_vs_simulation(sim_table); }},
      {"7 ctmc-only inadequacy", ctmc_inadequacy},
      {"8 dominant-states mode", dominant_mode},
      {"9 simulator sanity", simulator_sanity},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %s", o.pass ? "PASS" : "FAIL", c.name);
    if (!o.notes.empty()) std::printf(" (%s)", o.notes.front().c_str());
    std::printf("\n");
    for (std::size_t k = 1; k < o.notes.size(); ++k) std::printf("    %s\n", o.notes[k].c_str());
    if (std::string(c.name).starts_with("6")) {
      for (const auto& line : sim_table) std::printf("%s\n", line.c_str());
    }
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
