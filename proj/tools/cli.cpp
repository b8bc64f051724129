#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pulsega/gates.hpp"
#include "pulsega/io.hpp"

namespace pulsega::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string sibling(const std::string& out, const std::string& suffix) {
  fs::path p(out);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

json manifest_base(const std::string& command) {
  json m;
  m["tool"] = "pulsega";
  m["version"] = PULSEGA_VERSION;
  m["command"] = command;
  return m;
}

struct OptimizeArgs {
  std::string system_path;
  std::string gate;
  std::string config_path;
  std::string replay_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> rows;
  std::optional<int> pop;
  std::optional<std::string> budget_main;
  std::optional<std::string> budget_local;
  std::string out = "sequence.csv";
  int threads = 1;
  bool timing = false;
};

int cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
  SpinSystem sys;
  std::string gate_name;
  GAConfig cfg;
  bool timing = a.timing;

  if (!a.replay_path.empty()) {
    const json m = json::parse(io::read_file(a.replay_path));
    const auto& snap = m.at("snapshot");
    sys = io::spin_system_from_json(snap.at("system"));
    gate_name = snap.at("gate").get<std::string>();
    cfg = io::ga_config_from_json(snap.at("ga"));
    timing = snap.value("timing", false);
  } else {
    if (a.system_path.empty() || a.gate.empty()) throw std::invalid_argument("optimize needs --system and --gate");
    sys = io::load_spin_system(a.system_path);
    gate_name = a.gate;
    cfg.max_delay_us = default_max_delay_us(gate_name);
    bool pop_set = false;
    if (!a.config_path.empty()) {
      const auto text = io::read_file(a.config_path);
      pop_set = io::parse_key_values(text, a.config_path).contains("population");
      cfg = io::parse_ga_config(text, cfg, a.config_path);
    }
    if (a.rows) cfg.rows = *a.rows;
    if (a.pop) {
      cfg.population = *a.pop;
      pop_set = true;
    }
    if (!pop_set) cfg.population = default_population(cfg.rows);
    if (a.seed) cfg.seed = *a.seed;
    if (a.budget_main) cfg.budget_main_s = io::parse_duration(*a.budget_main);
    if (a.budget_local) cfg.budget_local_s = io::parse_duration(*a.budget_local);
  }
  cfg.threads = a.threads;
  cfg.validate();

  const Unitary target = build_gate(parse_gate(gate_name), sys.n_spins);
  const auto t0 = Clock::now();
  const RunRecord rec = evolve(cfg, sys, target);
  const double wall_s = std::chrono::duration<double>(Clock::now() - t0).count();

  const PulseSequence best = rec.best.decode();
  const std::string record_path = sibling(a.out, ".record.csv");
  const std::string manifest_path = sibling(a.out, ".manifest.json");
  io::write_file(a.out, io::format_sequence_csv(best));
  io::write_file(record_path, io::format_run_record(rec, timing));

  json m = manifest_base("optimize");
  m["seed"] = cfg.seed;
  m["snapshot"] = {{"system", io::to_json(sys)}, {"gate", gate_name}, {"ga", io::to_json(cfg)}, {"timing", timing}};
  m["inputs"] = {{"system", a.system_path}, {"config", a.config_path}, {"replay", a.replay_path}};
  m["outputs"] = {{"sequence", a.out}, {"record", record_path}};
  m["threads"] = a.threads;
  m["wall_time_s"] = wall_s;
  m["result"] = {{"best_fitness", *rec.best.fitness},
                 {"accepted", rec.accepted},
                 {"refined", rec.refined},
                 {"generations", rec.generations.size()},
                 {"evals", rec.evals},
                 {"duration_us", total_duration(best)}};
  io::write_file(manifest_path, m.dump(2) + "\n");

  out << "fidelity " << fixed6(*rec.best.fitness) << "\n"
      << "duration_us " << total_duration(best) << "\n"
      << "generations " << rec.generations.size() << "\n"
      << "evals " << rec.evals << "\n"
      << "accepted " << (rec.accepted ? "yes" : "no") << "\n";
  return rec.accepted ? kExitOk : kExitBelowThreshold;
}

int cmd_evaluate(const std::string& system_path, const std::string& sequence_path, const std::string& gate,
                 std::ostream& out) {
  const SpinSystem sys = io::load_spin_system(system_path);
  const PulseSequence seq = io::load_sequence(sequence_path);
  validate_sequence(seq, sys);
  const Unitary target = build_gate(parse_gate(gate), sys.n_spins);
  const Unitary u = sequence_propagator(sys, seq);
  out << "fidelity " << fixed6(gate_fidelity(target, u)) << "\n"
      << "duration_us " << total_duration(seq) << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", u.unitarity_residual());
  out << "unitarity_residual " << buf << "\n";
  return kExitOk;
}

struct ScanArgs {
  std::string system_path;
  std::string sequence_path;
  std::string gate;
  std::string flip = "-14:14:0.5";
  std::string offset = "-20:20:0.5";
  std::string model = "multiplicative";
  std::string out = "scan.csv";
  int threads = 1;
};

int cmd_scan(const ScanArgs& a, std::ostream& out) {
  const SpinSystem sys = io::load_spin_system(a.system_path);
  const PulseSequence seq = io::load_sequence(a.sequence_path);
  validate_sequence(seq, sys);
  const Unitary target = build_gate(parse_gate(a.gate), sys.n_spins);
  const AxisRange flip = io::parse_range(a.flip);
  const AxisRange offset = io::parse_range(a.offset);
  FlipErrorModel model;
  if (a.model == "multiplicative") model = FlipErrorModel::Multiplicative;
  else if (a.model == "additive") model = FlipErrorModel::Additive;
  else throw std::invalid_argument("unknown flip error model '" + a.model + "'");

  const auto t0 = Clock::now();
  const FidelityGrid grid = scan(sys, seq, target, flip, offset, model, a.threads);
  const double wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
  io::write_file(a.out, io::format_grid_csv(grid));

  json m = manifest_base("scan");
  m["seed"] = nullptr;
  m["snapshot"] = {{"system", io::to_json(sys)},
                   {"gate", a.gate},
                   {"sequence", json::parse(io::format_sequence_json(seq))},
                   {"flip", a.flip},
                   {"offset", a.offset},
                   {"model", a.model}};
  m["inputs"] = {{"system", a.system_path}, {"sequence", a.sequence_path}};
  m["outputs"] = {{"grid", a.out}};
  m["threads"] = a.threads;
  m["wall_time_s"] = wall_s;
  io::write_file(sibling(a.out, ".manifest.json"), m.dump(2) + "\n");

  out << "grid " << grid.flip_errors.size() << "x" << grid.offsets.size() << " written to " << a.out << "\n";
  return kExitOk;
}

int cmd_export(const std::string& sequence_path, const std::string& format, const std::string& out_path,
               std::ostream& out) {
  const PulseSequence seq = io::load_sequence(sequence_path);
  std::string text;
  if (format == "csv") text = io::format_sequence_csv(seq);
  else if (format == "resolved") text = io::format_sequence_resolved(seq);
  else if (format == "json") text = io::format_sequence_json(seq);
  else throw std::invalid_argument("unknown export format '" + format + "' (csv, resolved, json)");
  if (out_path.empty()) out << text;
  else io::write_file(out_path, text);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Genetic-algorithm synthesis and analysis of hard-pulse sequences for coupled spin systems", "pulsega"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PULSEGA_VERSION);

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "search for a pulse sequence implementing a gate");
  optimize->add_option("--system", opt.system_path, "spin-system file");
  optimize->add_option("--gate", opt.gate, "target gate (see 'gates list')");
  optimize->add_option("--config", opt.config_path, "GA configuration file");
  optimize->add_option("--seed", opt.seed, "random seed");
  optimize->add_option("--rows", opt.rows, "number of pulse/delay rows N");
  optimize->add_option("--pop", opt.pop, "population size");
  optimize->add_option("--budget-main", opt.budget_main, "main-stage wall budget (e.g. 600s, 10m)");
  optimize->add_option("--budget-local", opt.budget_local, "local-stage wall budget (e.g. 1000s)");
  optimize->add_option("--out", opt.out, "best sequence CSV; record and manifest are written beside it");
  optimize->add_option("--threads", opt.threads, "fitness-evaluation threads")->check(CLI::PositiveNumber);
  optimize->add_flag("--timing", opt.timing, "write measured wall_ms into the run record");
  optimize->add_option("--replay", opt.replay_path, "re-run the snapshot stored in a manifest");

  std::string eval_system, eval_sequence, eval_gate;
  auto* evaluate = app.add_subcommand("evaluate", "fidelity and duration of a pulse sequence");
  evaluate->add_option("--system", eval_system, "spin-system file")->required();
  evaluate->add_option("--sequence,sequence", eval_sequence, "pulse-sequence file")->required();
  evaluate->add_option("--gate", eval_gate, "target gate")->required();

  ScanArgs sc;
  auto* scan_cmd = app.add_subcommand("scan", "fidelity over flip-angle and offset errors");
  scan_cmd->add_option("--system", sc.system_path, "spin-system file")->required();
  scan_cmd->add_option("--sequence,sequence", sc.sequence_path, "pulse-sequence file")->required();
  scan_cmd->add_option("--gate", sc.gate, "target gate")->required();
  scan_cmd->add_option("--flip", sc.flip, "flip-angle error range lo:hi:step in degrees");
  scan_cmd->add_option("--offset", sc.offset, "offset error range lo:hi:step in Hz");
  scan_cmd->add_option("--model", sc.model, "flip error model: multiplicative or additive");
  scan_cmd->add_option("--out", sc.out, "grid CSV");
  scan_cmd->add_option("--threads", sc.threads, "worker threads")->check(CLI::PositiveNumber);

  std::string exp_sequence, exp_format = "csv", exp_out;
  auto* export_cmd = app.add_subcommand("export", "convert a pulse sequence between formats");
  export_cmd->add_option("--sequence,sequence", exp_sequence, "pulse-sequence file")->required();
  export_cmd->add_option("--format", exp_format, "csv, resolved or json");
  export_cmd->add_option("--out", exp_out, "output file (default stdout)");

  auto* gates = app.add_subcommand("gates", "target gate catalogue");
  gates->require_subcommand(1);
  auto* gates_list = gates->add_subcommand("list", "list gate names");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << PULSEGA_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (*optimize) return cmd_optimize(opt, out);
    if (*evaluate) return cmd_evaluate(eval_system, eval_sequence, eval_gate, out);
    if (*scan_cmd) return cmd_scan(sc, out);
    if (*export_cmd) return cmd_export(exp_sequence, exp_format, exp_out, out);
    if (*gates_list) {
      for (const auto& line : gate_catalog()) out << line << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace pulsega::cli
