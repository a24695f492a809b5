#pragma once

// Command implementations for the wlansat executable. Kept in a header so the
// test suite can drive them in-process.

#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wlansat/wlansat.hpp"

namespace wlansat::cli {

struct ScenarioOptions {
  std::string path;
  std::optional<int> n_nodes;
  std::optional<int> cw_min;
  std::optional<int> m;

  void add_to(CLI::App* app) {
    app->add_option("-s,--scenario", path, "Scenario JSON file")->required();
    app->add_option("--n-nodes", n_nodes, "Override n_nodes of every WLAN");
    app->add_option("--cw-min", cw_min, "Override cw_min");
    app->add_option("--m", m, "Override the number of backoff stages");
  }

  Scenario load() const {
    Scenario s = load_scenario(path);
    if (n_nodes) s = s.with_uniform_nodes(*n_nodes);
    auto p = s.params();
    if (cw_min) p.cw_min = *cw_min;
    if (m) p.m = *m;
    return s.with_params(p);
  }
};

struct SimOptions {
  double duration = 60.0;
  double warmup = 1.0;
  int reps = 10;
  std::uint64_t seed = 1;

  void add_to(CLI::App* app) {
    app->add_option("--duration", duration, "Simulated seconds per replication")->capture_default_str();
    app->add_option("--warmup", warmup, "Discarded initial seconds")->capture_default_str();
    app->add_option("--reps", reps, "Replications")->capture_default_str();
    app->add_option("--seed", seed, "Base RNG seed")->capture_default_str();
  }

  SimConfig config(const Scenario& s) const {
    SimConfig c(s);
    c.duration = duration;
    c.warmup = warmup;
    c.replications = reps;
    c.seed = seed;
    return c;
  }
};

// Output file if --out was given, otherwise the provided stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InvalidParameter("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

inline std::string throughput_value(double bits_per_s, bool mbps) {
  return format_number(mbps ? bits_per_s / 1e6 : bits_per_s);
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct SweepRow {
  long long value;
  WlanId wlan;
  std::string mode;
  double x;
  double std_error;
};

inline std::vector<SweepRow> sweep_point(const Scenario& base, const std::string& param, long long value,
                                         bool fix_cw_max, const std::vector<std::string>& modes,
                                         const SimOptions& sim) {
  Scenario s = base;
  if (param == "cw_min") {
    auto p = base.params();
    p.cw_min = static_cast<int>(value);
    if (fix_cw_max) {
      const long long cw_max = base.params().cw_max();
      int m = 0;
      while ((static_cast<long long>(p.cw_min) << (m + 1)) <= cw_max) ++m;
      p.m = m;
    }
    s = base.with_params(p);
  } else {
    s = base.with_uniform_nodes(static_cast<int>(value));
  }
  std::vector<SweepRow> rows;
  const auto space = enumerate_states(s);
  for (const auto& mode : modes) {
    if (mode == "sim") {
      auto result = simulate(sim.config(s));
      for (WlanId i = 0; i < s.size(); ++i) rows.push_back({value, i, mode, result.throughput[i], result.std_error[i]});
      continue;
    }
    AnalysisOptions opt;
    if (mode == "dominant") opt.mode = AnalysisMode::dominant_only;
    if (mode == "ctmc") opt.collisions = false;
    auto report = analyze(s, space, opt);
    for (WlanId i = 0; i < s.size(); ++i) rows.push_back({value, i, mode, report.per_wlan[i], 0.0});
  }
  return rows;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saturation throughput of overlapping WLANs: analytical model and slotted CSMA/CA simulator"};
  app.require_subcommand(1);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Per-WLAN throughput from the analytical model");
  ScenarioOptions analyze_scn;
  analyze_scn.add_to(analyze_cmd);
  bool dominant = false;
  bool no_collisions = false;
  bool mbps = false;
  std::string out_path, detail_path, json_path;
  analyze_cmd->add_flag("--dominant", dominant, "Sum over dominant states and their predecessors only");
  analyze_cmd->add_flag("--no-collisions", no_collisions, "Ignore collisions (pure CTMC throughput)");
  analyze_cmd->add_flag("--mbps", mbps, "Report throughput in Mbit/s");
  analyze_cmd->add_option("-o,--out", out_path, "Summary CSV (default: stdout)");
  analyze_cmd->add_option("--detail", detail_path, "Per-state CSV");
  analyze_cmd->add_option("--json", json_path, "Full JSON report");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Slotted CSMA/CA simulation");
  ScenarioOptions sim_scn;
  sim_scn.add_to(sim_cmd);
  SimOptions sim_opts;
  sim_opts.add_to(sim_cmd);
  std::string sim_out, event_log_path, probe_path;
  bool sim_mbps = false;
  sim_cmd->add_option("-o,--out", sim_out, "Summary CSV (default: stdout)");
  sim_cmd->add_option("--event-log", event_log_path, "Channel event log of replication 0");
  sim_cmd->add_option("--probe", probe_path, "Per (WLAN, predecessor) collision statistics CSV");
  sim_cmd->add_flag("--mbps", sim_mbps, "Report throughput in Mbit/s");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep cw_min or n_nodes over a list of values");
  ScenarioOptions sweep_scn;
  sweep_scn.add_to(sweep_cmd);
  SimOptions sweep_sim;
  sweep_sim.add_to(sweep_cmd);
  std::string param = "cw_min";
  std::string values_text, modes_text = "full,dominant,ctmc";
  std::string sweep_out;
  bool fix_cw_max = false;
  bool sweep_mbps = false;
  sweep_cmd->add_option("--param", param, "Swept parameter")
      ->check(CLI::IsMember({"cw_min", "n_nodes"}))
      ->capture_default_str();
  sweep_cmd->add_option("--values", values_text, "Comma-separated values")->required();
  sweep_cmd->add_option("--modes", modes_text, "Comma-separated subset of full,dominant,ctmc,sim")
      ->capture_default_str();
  sweep_cmd->add_flag("--fix-cw-max", fix_cw_max, "Hold CW_max fixed instead of m when sweeping cw_min");
  sweep_cmd->add_flag("--mbps", sweep_mbps, "Report throughput in Mbit/s");
  sweep_cmd->add_option("-o,--out", sweep_out, "CSV output (default: stdout)");

  // states
  auto* states_cmd = app.add_subcommand("states", "List feasible and dominant states");
  ScenarioOptions states_scn;
  states_scn.add_to(states_cmd);
  std::string states_out;
  states_cmd->add_option("-o,--out", states_out, "Text output (default: stdout)");

  // bianchi
  auto* bianchi_cmd = app.add_subcommand("bianchi", "Solve the slotted fixed point for one contention domain");
  int n_total = 1, b_cw_min = 32, b_m = 5;
  bianchi_cmd->add_option("--n-total", n_total, "Contending nodes")->required();
  bianchi_cmd->add_option("--cw-min", b_cw_min, "CW_min")->capture_default_str();
  bianchi_cmd->add_option("--m", b_m, "Backoff stages")->capture_default_str();

  // gamma-curve
  auto* gamma_cmd = app.add_subcommand("gamma-curve", "(p, gamma) pairs for one WLAN of growing size");
  int g_cw_min = 32, g_m = 5, g_max_nodes = 64;
  std::string g_scenario, g_out;
  gamma_cmd->add_option("--cw-min", g_cw_min, "CW_min")->capture_default_str();
  gamma_cmd->add_option("--m", g_m, "Backoff stages")->capture_default_str();
  gamma_cmd->add_option("--max-nodes", g_max_nodes, "Largest node count")->capture_default_str();
  gamma_cmd->add_option("-s,--scenario", g_scenario, "Take timing parameters from this scenario");
  gamma_cmd->add_option("-o,--out", g_out, "CSV output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream sink_out, sink_err;
    const int code = app.exit(e, sink_out, sink_err);
    out << sink_out.str();
    err << sink_err.str();
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze_cmd) {
      const Scenario s = analyze_scn.load();
      AnalysisOptions opt;
      opt.mode = dominant ? AnalysisMode::dominant_only : AnalysisMode::full;
      opt.collisions = !no_collisions;
      const auto report = analyze(s, opt);
      Sink sink(out_path, out);
      *sink << (mbps ? "wlan_id,x_mbps,mode\n" : "wlan_id,x_bits_per_s,mode\n");
      for (std::size_t i = 0; i < report.per_wlan.size(); ++i) {
        *sink << i << ',' << throughput_value(report.per_wlan[i], mbps) << ','
              << (no_collisions ? "ctmc" : to_string(report.mode)) << '\n';
      }
      if (!detail_path.empty()) {
        Sink detail(detail_path, out);
        write_detail_csv(*detail, report);
      }
      if (!json_path.empty()) {
        Sink json(json_path, out);
        *json << report_to_json(report).dump(2) << '\n';
      }
    } else if (*sim_cmd) {
      const Scenario s = sim_scn.load();
      auto config = sim_opts.config(s);
      config.event_log = !event_log_path.empty();
      const auto result = simulate(config);
      Sink sink(sim_out, out);
      *sink << (sim_mbps ? "wlan_id,x_mbps,std_error,successes,collisions,mode\n"
                         : "wlan_id,x_bits_per_s,std_error,successes,collisions,mode\n");
      for (std::size_t i = 0; i < s.size(); ++i) {
        *sink << i << ',' << throughput_value(result.throughput[i], sim_mbps) << ','
              << throughput_value(result.std_error[i], sim_mbps) << ',' << result.successes[i] << ','
              << result.collisions[i] << ",sim\n";
      }
      if (!event_log_path.empty()) {
        Sink log(event_log_path, out);
        write_event_log(*log, result.replications.front().events);
      }
      if (!probe_path.empty()) {
        Sink probe(probe_path, out);
        *probe << "wlan_id,predecessor,attempts,collisions,collision_fraction,success_airtime_share\n";
        for (const auto& e : gamma_probe(result)) {
          *probe << e.wlan << ',' << csv_quote(FeasibleState(e.predecessor).label()) << ',' << e.attempts << ','
                 << e.collisions << ',' << format_number(e.collision_fraction) << ','
                 << format_number(e.success_airtime_share) << '\n';
        }
      }
    } else if (*sweep_cmd) {
      const Scenario base = sweep_scn.load();
      std::vector<long long> values;
      for (const auto& v : split_list(values_text)) {
        try {
          std::size_t used = 0;
          values.push_back(std::stoll(v, &used));
          if (used != v.size()) throw std::invalid_argument(v);
        } catch (const std::exception&) {
          throw InvalidParameter("--values: '" + v + "' is not an integer");
        }
      }
      if (values.empty()) throw InvalidParameter("--values: at least one value is required");
      const auto modes = split_list(modes_text);
      if (modes.empty()) throw InvalidParameter("--modes: at least one mode is required");
      for (const auto& mode : modes) {
        if (mode != "full" && mode != "dominant" && mode != "ctmc" && mode != "sim") {
          throw InvalidParameter("--modes: unknown mode '" + mode + "'");
        }
      }
      for (auto v : values) {
        if (param == "cw_min" && v < 2) throw InvalidParameter("--values: cw_min must be >= 2");
        if (param == "n_nodes" && v < 1) throw InvalidParameter("--values: n_nodes must be >= 1");
      }
      std::vector<std::future<std::vector<SweepRow>>> jobs;
      for (auto v : values) {
        jobs.push_back(std::async(std::launch::async, [&, v] {
          return sweep_point(base, param, v, fix_cw_max, modes, sweep_sim);
        }));
      }
      Sink sink(sweep_out, out);
      *sink << param << ",wlan_id,mode," << (sweep_mbps ? "x_mbps" : "x_bits_per_s") << ",std_error\n";
      for (auto& job : jobs) {
        for (const auto& row : job.get()) {
          *sink << row.value << ',' << row.wlan << ',' << row.mode << ',' << throughput_value(row.x, sweep_mbps)
                << ',' << throughput_value(row.std_error, sweep_mbps) << '\n';
        }
      }
    } else if (*states_cmd) {
      const Scenario s = states_scn.load();
      const auto space = enumerate_states(s);
      const auto dominant_list = dominant_states(space);
      const auto pi = stationary_product_form(space, thetas_of(s));
      Sink sink(states_out, out);
      *sink << "states " << space.size() << '\n';
      for (std::size_t k = 0; k < space.size(); ++k) {
        *sink << space[k].label() << ' ' << format_number(pi[k]) << '\n';
      }
      double mass = 0.0;
      for (auto d : dominant_list) mass += pi.of(space, d);
      *sink << "dominant " << dominant_list.size() << '\n';
      for (auto d : dominant_list) *sink << d.label() << ' ' << format_number(pi.of(space, d)) << '\n';
      *sink << "dominant_mass " << format_number(mass) << '\n';
    } else if (*bianchi_cmd) {
      const auto pt = solve_fixed_point(n_total, b_cw_min, b_m);
      out << "n_total,cw_min,m,tau,p,e_b\n"
          << n_total << ',' << b_cw_min << ',' << b_m << ',' << format_number(pt.tau) << ','
          << format_number(pt.p) << ',' << format_number(pt.e_b) << '\n';
    } else if (*gamma_cmd) {
      PhyMacParams params = g_scenario.empty() ? reference_params() : load_scenario(g_scenario).params();
      params.cw_min = g_cw_min;
      params.m = g_m;
      params.validate();
      if (g_max_nodes < 1) throw InvalidParameter("--max-nodes must be >= 1");
      Sink sink(g_out, out);
      *sink << "n_nodes,p,gamma_raw,gamma\n";
      for (int n = 1; n <= g_max_nodes; ++n) {
        const Scenario s = Scenario::make({n}, {}, params);
        const auto space = enumerate_states(s);
        const auto g = gamma_factor(0, FeasibleState{}, s, space);
        *sink << n << ',' << format_number(g.p) << ',' << format_number(g.gamma_raw) << ','
              << format_number(g.gamma) << '\n';
      }
    }
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace wlansat::cli
