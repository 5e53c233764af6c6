#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "pcosync/config.hpp"
#include "pcosync/io.hpp"
#include "pcosync/scenario.hpp"

namespace pcosync {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitValidation = 2, kExitRuntime = 3 };

struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<Tick> horizon;
  std::string out_dir = ".";
  std::optional<std::size_t> runs;
  std::optional<std::size_t> workers;
  /// "", "json" or "csv".
  std::string format;
};

namespace detail {

inline void apply_overrides(ScenarioConfig& c, const CommandOptions& opt) {
  if (opt.seed) c.seed = *opt.seed;
  if (opt.horizon) {
    if (*opt.horizon < 0) throw ConfigError("--horizon must be non-negative");
    c.horizon = *opt.horizon;
  }
}

inline void print_report(std::ostream& out, const ConditionReport& r) {
  const bool m1 = r.mechanism == MechanismKind::Mechanism1;
  const char* bound = m1 ? "floor(2N/3)" : "floor(3N/4)";
  out << "mechanism: " << to_string(r.mechanism) << '\n'
      << "N = " << r.n << ", d = " << r.d << ", M = " << r.m << '\n'
      << "degree: d > " << bound << " = " << r.degree_bound << " ... "
      << (r.degree_ok ? "pass" : "FAIL") << '\n'
      << "attackers: M < " << (m1 ? "d - floor(2N/3)" : "floor(d/6)") << " = "
      << r.max_allowed_attackers + 1 << " ... " << (r.attacker_bound_ok ? "pass" : "FAIL") << '\n'
      << "max allowed attackers: " << r.max_allowed_attackers << '\n';
  if (!r.ok()) out << "degree or attacker conditions not met: synchronization not guaranteed\n";
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
}

}  // namespace detail

/// Prints the synchronization conditions. Exit 2 when they do not hold.
inline int cmd_validate(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  Topology topology;
  try {
    config = parse_scenario(read_json_file(opt.config_path));
    topology = load_topology(config.topology);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const auto report = scenario_conditions(config, topology);
  if (!report) {
    if (opt.format == "json") {
      out << nlohmann::ordered_json{{"mechanism", "conventional"}, {"conditions_met", false}}.dump(2)
          << '\n';
    } else {
      out << "mechanism: conventional\n"
          << "no synchronization guarantee applies to the conventional mechanism\n";
    }
    return kExitValidation;
  }
  if (opt.format == "json") {
    out << to_json(*report).dump(2) << '\n';
  } else {
    detail::print_report(out, *report);
  }
  return report->ok() ? kExitOk : kExitValidation;
}

/// Writes events.jsonl, phases.csv, summary.json and schedules.json to out_dir.
inline int cmd_run(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  try {
    config = parse_scenario(read_json_file(opt.config_path));
    detail::apply_overrides(config, opt);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const auto outcome = run_scenario(config);
    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    {
      std::ofstream f(dir / "events.jsonl", std::ios::binary);
      write_events_jsonl(f, outcome.run.log);
    }
    {
      std::ofstream f(dir / "phases.csv", std::ios::binary);
      write_phases_csv(f, outcome.run.snapshots, config.clock);
    }
    const auto summary = to_json(outcome.summary, config.clock);
    detail::write_file(dir / "summary.json", summary.dump(2) + "\n");
    detail::write_file(dir / "schedules.json", schedules_to_json(outcome.schedules).dump() + "\n");
    if (opt.format == "json") {
      out << summary.dump(2) << '\n';
    } else {
      out << "seed " << outcome.summary.seed << ": ";
      if (outcome.summary.sync_tick) {
        out << "synchronized at tick " << *outcome.summary.sync_tick << " ("
            << format_real(static_cast<double>(*outcome.summary.sync_tick) /
                           static_cast<double>(config.clock.period()))
            << " T)\n";
      } else {
        out << "no synchronization within " << config.horizon << " ticks, final arc "
            << format_real(outcome.summary.final_arc_rad) << " rad\n";
      }
      out << "outputs written to " << dir.string() << '\n';
    }
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

/// Monte-Carlo sweep; writes aggregate.json to out_dir.
inline int cmd_sweep(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  SweepConfig sweep;
  try {
    sweep = parse_sweep(read_json_file(opt.config_path));
    detail::apply_overrides(sweep.base, opt);
    if (opt.seed) sweep.seed_base = *opt.seed;
    if (opt.runs) sweep.runs = *opt.runs;
    if (opt.workers) sweep.workers = *opt.workers;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const auto agg = run_sweep(sweep);
    const auto j = to_json(agg);
    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "aggregate.json", j.dump(2) + "\n");
    if (opt.format == "json") {
      out << j.dump(2) << '\n';
    } else if (opt.format == "csv") {
      out << "seed,synced,sync_tick,final_arc_rad\n";
      for (const auto& s : agg.per_run) {
        out << s.seed << ',' << (s.sync_tick ? 1 : 0) << ','
            << (s.sync_tick ? std::to_string(*s.sync_tick) : std::string()) << ','
            << format_real(s.final_arc_rad) << '\n';
      }
    } else {
      out << agg.synced << '/' << agg.runs << " runs synchronized";
      if (agg.sync_tick_max) {
        out << "; sync tick min/median/max " << *agg.sync_tick_min << '/' << *agg.sync_tick_median
            << '/' << *agg.sync_tick_max;
      }
      out << '\n';
      if (agg.conditions && !agg.conditions->ok()) {
        out << "degree or attacker conditions not met: synchronization not guaranteed\n";
      }
      if (!agg.unsynced_seeds.empty()) {
        out << "unsynchronized seeds:";
        for (auto s : agg.unsynced_seeds) out << ' ' << s;
        out << '\n';
      }
    }
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

/// Degree report; --format json or csv for machine-readable output.
inline int cmd_topology(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  Topology topology;
  try {
    const auto j = read_json_file(opt.config_path);
    // Accept either a full scenario or a bare topology object.
    const auto& tj = j.contains("topology") ? j.at("topology") : j;
    nlohmann::json wrapper = {{"topology", tj}, {"mechanism", {{"kind", "mechanism2"}}}};
    topology = load_topology(parse_scenario(wrapper).topology);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const std::size_t n = topology.size();
  if (opt.format == "json") {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["network_degree"] = topology.network_degree();
    j["strongly_connected"] = topology.strongly_connected();
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (NodeId i = 0; i < n; ++i) {
      nodes.push_back({{"id", i},
                       {"indegree", topology.in_degree(i)},
                       {"outdegree", topology.out_degree(i)},
                       {"degree", topology.degree(i)},
                       {"out_neighbors", topology.out_neighbors(i)}});
    }
    j["nodes"] = std::move(nodes);
    out << j.dump(2) << '\n';
  } else if (opt.format == "csv") {
    out << "id,indegree,outdegree,degree,out_neighbors\n";
    for (NodeId i = 0; i < n; ++i) {
      out << i << ',' << topology.in_degree(i) << ',' << topology.out_degree(i) << ','
          << topology.degree(i) << ',';
      const auto& nb = topology.out_neighbors(i);
      for (std::size_t k = 0; k < nb.size(); ++k) out << (k ? " " : "") << nb[k];
      out << '\n';
    }
  } else {
    out << "N = " << n << ", network degree d = " << topology.network_degree()
        << (topology.strongly_connected() ? ", strongly connected" : ", not strongly connected")
        << '\n';
    for (NodeId i = 0; i < n; ++i) {
      out << "node " << i << ": in " << topology.in_degree(i) << ", out " << topology.out_degree(i)
          << ", d_i " << topology.degree(i) << " ->";
      for (NodeId j : topology.out_neighbors(i)) out << ' ' << j;
      out << '\n';
    }
  }
  return kExitOk;
}

}  // namespace pcosync
