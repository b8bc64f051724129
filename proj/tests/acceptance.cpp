// One PASS/FAIL line per acceptance criterion; exit status is the number of
// failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "pulsega/gates.hpp"
#include "pulsega/io.hpp"
#include "support.hpp"

using namespace pulsega;
using namespace pulsega::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "pulsega");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Value following `key ` in line-oriented CLI output.
std::string field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  }
  return "";
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Fixture {
  const char* file;
  const char* gate;
  std::int64_t duration;
  double fidelity;
};

const Fixture kTables[] = {
    {"table2_selective90_q3.csv", "selective90:2:Y", 107, 0.995},
    {"table3_cnot.csv", "cnot:0:1", 7275, 0.993},
    {"table4_fredkin.csv", "fredkin", 51332, 0.99},
    {"table5_toffoli.csv", "toffoli", 27674, 0.995},
};

const std::string kSystem = data_path("iodotrifluoroethylene.conf");

Outcome durations() {
  Outcome o;
  for (const auto& t : kTables) {
    const auto r = cli_run({"evaluate", "--system", kSystem, "--sequence", data_path(t.file), "--gate", t.gate});
    const std::string got = field(r.out, "duration_us");
    o.check(r.code == 0 && got == std::to_string(t.duration),
            std::string(t.file) + " duration " + got + " us, expected " + std::to_string(t.duration));
  }
  return o;
}

Outcome fidelities() {
  Outcome o;
  for (const auto& t : kTables) {
    const auto r = cli_run({"evaluate", "--system", kSystem, "--sequence", data_path(t.file), "--gate", t.gate});
    const std::string got = field(r.out, "fidelity");
    const double f = got.empty() ? -1.0 : std::stod(got);
    const bool ok = r.code == 0 && std::abs(f - t.fidelity) <= 0.005 + 1e-12;
    o.check(ok, std::string(t.file) + " fidelity " + got + ", expected " + fmt("%.3f", t.fidelity) + " +- 0.005");
    if (ok) o.note(std::string(t.gate) + " " + got);
  }
  return o;
}

Outcome propagator_properties() {
  Outcome o;
  Stream rng(2024, 0, 0, StreamTag::Test);
  double worst_unitarity = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SpinSystem sys = random_system(rng, 3);
    const Unitary u = sequence_propagator(sys, random_sequence(sys, rng, 10, 5000));
    worst_unitarity = std::max(worst_unitarity, u.unitarity_residual());
  }
  o.check(worst_unitarity < 1e-9, "unitarity residual " + fmt("%.2e", worst_unitarity));

  double worst_concat = 0.0, worst_add = 0.0, worst_exp = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SpinSystem sys = random_system(rng, 3);
    const PulseSequence a = random_sequence(sys, rng, 5, 2000), b = random_sequence(sys, rng, 5, 2000);
    PulseSequence ab = a;
    ab.segments.insert(ab.segments.end(), b.segments.begin(), b.segments.end());
    const CMatrix composed = sequence_propagator(sys, b).matrix() * sequence_propagator(sys, a).matrix();
    worst_concat = std::max(worst_concat, max_abs(sequence_propagator(sys, ab).matrix() - composed));

    const HermitianOperator h(random_hermitian(8, rng, 1e4));
    const double t1 = 1e-4 * rng.uniform01(), t2 = 1e-4 * rng.uniform01();
    worst_add = std::max(worst_add, max_abs(matrix_exp(h, t1 + t2).matrix() -
                                            matrix_exp(h, t2).matrix() * matrix_exp(h, t1).matrix()));
    worst_exp = std::max(worst_exp, max_abs(matrix_exp(h, t1).matrix() -
                                            taylor_expm(Complex(0, -1) * h.matrix() * t1)));
  }
  o.check(worst_concat < 1e-10, "concatenation error " + fmt("%.2e", worst_concat));
  o.check(worst_add < 1e-10, "exp additivity error " + fmt("%.2e", worst_add));
  o.check(worst_exp < 1e-10, "matrix_exp vs oracle " + fmt("%.2e", worst_exp));
  if (o.pass) {
    o.note("unitarity " + fmt("%.1e", worst_unitarity) + ", concat " + fmt("%.1e", worst_concat) + ", additivity " +
           fmt("%.1e", worst_add) + ", oracle " + fmt("%.1e", worst_exp));
  }
  return o;
}

Outcome fidelity_properties() {
  Outcome o;
  Stream rng(77, 0, 0, StreamTag::Test);
  double worst_self = 0.0, worst_phase = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SpinSystem sys = random_system(rng, 3);
    const Unitary u = sequence_propagator(sys, random_sequence(sys, rng));
    const Unitary v = sequence_propagator(sys, random_sequence(sys, rng));
    worst_self = std::max(worst_self, std::abs(gate_fidelity(u, u) - 1.0));
    const CMatrix phased = std::polar(1.0, 2 * std::numbers::pi * rng.uniform01()) * u.matrix();
    worst_phase = std::max(worst_phase, std::abs(gate_fidelity(v.matrix(), phased) - gate_fidelity(v, u)));
  }
  const double tof = gate_fidelity(Unitary::identity(8), toffoli());
  o.check(worst_self <= 1e-12, "self-fidelity error " + fmt("%.2e", worst_self));
  o.check(worst_phase <= 1e-12, "global phase error " + fmt("%.2e", worst_phase));
  o.check(tof == 0.75, "F(I, Toffoli) = " + fmt("%.17g", tof));
  return o;
}

Outcome gate_fixtures() {
  Outcome o;
  auto literal = [](std::vector<int> cols) {
    CMatrix m = CMatrix::Zero(8, 8);
    for (int r = 0; r < 8; ++r) m(r, cols[static_cast<std::size_t>(r)]) = 1.0;
    return m;
  };
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix sel = CMatrix::Zero(8, 8);
  for (int b = 0; b < 4; ++b) {
    sel(2 * b, 2 * b) = s;
    sel(2 * b, 2 * b + 1) = -s;
    sel(2 * b + 1, 2 * b) = s;
    sel(2 * b + 1, 2 * b + 1) = s;
  }
  o.check(max_abs(selective_90(2, RotationAxis::Y, 3).matrix() - sel) == 0.0, "selective 90 matrix");
  o.check(max_abs(cnot(0, 1, 3).matrix() - literal({0, 1, 2, 3, 6, 7, 4, 5})) == 0.0, "CNOT matrix");
  o.check(max_abs(fredkin().matrix() - literal({0, 1, 2, 3, 4, 6, 5, 7})) == 0.0, "Fredkin matrix");
  o.check(max_abs(toffoli().matrix() - literal({0, 1, 2, 3, 4, 5, 7, 6})) == 0.0, "Toffoli matrix");
  auto maps = [](const Unitary& u, int from, int to) { return std::abs(u.matrix()(to, from)) == 1.0; };
  o.check(maps(toffoli(), 0b110, 0b111), "Toffoli|110> != |111>");
  o.check(maps(fredkin(), 0b110, 0b101), "Fredkin|110> != |101>");
  o.check(maps(cnot(0, 1, 3), 0b110, 0b100), "CNOT|110> != |100>");
  return o;
}

Outcome ga_convergence() {
  Outcome o;
  const SpinSystem sys = make_uncoupled_system(1, 120.88e3);
  const Unitary target = selective_90(0, RotationAxis::Y, 1);
  int passed = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GAConfig cfg;
    cfg.rows = 3;
    cfg.population = 200;
    cfg.seed = seed;
    cfg.max_delay_us = 100;
    cfg.budget_main_s = 240;
    cfg.budget_local_s = 60;
    cfg.max_generations = 1000000;
    cfg.local_max_generations = 1000000;
    const auto t0 = Clock::now();
    const RunRecord rec = evolve(cfg, sys, target);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool ok = *rec.best.fitness >= 0.99 && secs <= 300.0;
    passed += ok ? 1 : 0;
    per_seed += (seed > 1 ? ", " : "") + std::string("seed ") + std::to_string(seed) + " " +
                fmt("%.4f", *rec.best.fitness) + " in " + fmt("%.1fs", secs);
  }
  o.check(passed >= 3, std::to_string(passed) + "/5 seeds reached 0.99");
  o.note(per_seed);
  return o;
}

Outcome ga_operators() {
  Outcome o;
  const std::vector<double> f{0.2, 0.9, 0.5}, w{1.0, 0.1, 0.9};
  o.check(luck_choose(f, w) == 2, "luck_choose worked example");

  Stream rng(5, 0, 0, StreamTag::Test);
  const GeneBox box = GeneBox::global(6, 39, 1000);
  const GeneMatrix a = box.sample(rng), b = box.sample(rng);
  const auto [x, y] = crossover(a, b, Rectangle{0, 5, 0, 3}, box);
  o.check(x == b && y == a, "full-rectangle crossover does not swap parents");

  bool involution = true, multiset = true;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i == j) continue;
      const GeneMatrix fl = flip(a, i, j);
      involution = involution && flip(fl, i, j) == a;
      multiset = multiset && fl.row(i) == a.row(j) && fl.row(j) == a.row(i);
    }
  }
  o.check(involution, "flip is not an involution");
  o.check(multiset, "flip changes the row multiset");

  SpinSystem sys = make_uncoupled_system(2, 120.88e3);
  sys.chemical_shifts = {2500.0, -4000.0};
  sys.couplings(0, 1) = sys.couplings(1, 0) = 120.0;
  GAConfig cfg;
  cfg.rows = 4;
  cfg.population = 30;
  cfg.max_delay_us = 2000;
  cfg.max_generations = 100;
  cfg.budget_main_s = 3600;
  cfg.budget_local_s = 0;
  const RunRecord rec = evolve(cfg, sys, cnot(0, 1, 2));
  const auto trace = rec.best_trace();
  bool monotone = trace.size() == 101;
  for (std::size_t i = 1; i < trace.size(); ++i) monotone = monotone && trace[i] >= trace[i - 1];
  o.check(monotone, "best-fitness trace over 100 generations is not nondecreasing");
  return o;
}

Outcome robustness() {
  Outcome o;
  const SpinSystem sys = io::load_spin_system(kSystem);
  const PulseSequence t2 = io::load_sequence(data_path("table2_selective90_q3.csv"));
  const Unitary target = selective_90(2, RotationAxis::Y, 3);

  const FidelityGrid g = scan(sys, t2, target, {-14, 14, 0.5}, {-20, 20, 0.5});
  const double nominal = gate_fidelity(target, sequence_propagator(sys, t2));
  o.check(g.at(0.0, 0.0) == nominal, "grid origin differs from nominal fidelity");

  for (double df : {-12.5, 12.5}) {
    for (double dn : {-19.6, 19.6}) {
      const double m = perturbed_fidelity(sys, t2, target, df, dn, FlipErrorModel::Multiplicative);
      const double a = perturbed_fidelity(sys, t2, target, df, dn, FlipErrorModel::Additive);
      o.check(std::max(m, a) > 0.90, "F(" + fmt("%g", df) + ", " + fmt("%g", dn) + ") = " + fmt("%.4f", m) + " / " +
                                          fmt("%.4f", a));
    }
  }

  const SpinSystem one = make_uncoupled_system(1, 120.88e3);
  double worst = 0.0;
  for (std::int64_t tau : {7, 13, 26, 39}) {
    const PulseSequence p{{{tau, 0, 9000, 0}}};
    const Unitary u = sequence_propagator(one, p);
    const double theta = 120.88e3 * tau * 1e-6;
    for (double d = -14.0; d <= 14.0; d += 3.5) {
      const double closed_mult = std::abs(std::cos(theta * d / 90.0 / 2));
      const double closed_add = std::abs(std::cos(d * std::numbers::pi / 180.0 / 2));
      worst = std::max(worst, std::abs(perturbed_fidelity(one, p, u, d, 0, FlipErrorModel::Multiplicative) - closed_mult));
      worst = std::max(worst, std::abs(perturbed_fidelity(one, p, u, d, 0, FlipErrorModel::Additive) - closed_add));
    }
  }
  o.check(worst < 1e-9, "single-pulse closed form error " + fmt("%.2e", worst));
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "pulsega_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg = (dir / "ga.conf").string();
  io::write_file(cfg, "rows = 5\npopulation = 60\nmax_generations = 25\nlocal_max_generations = 10\n"
                      "local_trigger = 0.3\n");
  auto p = [&](const char* name) { return (dir / name).string(); };
  const auto first = cli_run({"optimize", "--system", kSystem, "--gate", "cnot:0:1", "--config", cfg, "--seed", "11",
                              "--threads", "1", "--out", p("a.csv")});
  const auto second = cli_run({"optimize", "--replay", p("a.manifest.json"), "--threads", "3", "--out", p("b.csv")});
  const auto third = cli_run({"optimize", "--replay", p("a.manifest.json"), "--threads", "1", "--out", p("c.csv")});
  o.check(first.code != 1 && second.code != 1 && third.code != 1, "optimize failed: " + first.err + second.err + third.err);
  if (o.pass) {
    const std::string seq = io::read_file(p("a.csv")), rec = io::read_file(p("a.record.csv"));
    o.check(seq == io::read_file(p("b.csv")) && seq == io::read_file(p("c.csv")), "sequence files differ");
    o.check(rec == io::read_file(p("b.record.csv")) && rec == io::read_file(p("c.record.csv")), "record files differ");
  }
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "table fixture durations", 1, durations},
      {2, "table fixture fidelities", 10, fidelities},
      {3, "propagator properties", 30, propagator_properties},
      {4, "fidelity properties", 1, fidelity_properties},
      {5, "gate library fixtures", 1, gate_fixtures},
      {6, "GA convergence, 1 spin, 90y, N=3, pop 200", 5 * 300, ga_convergence},
      {7, "GA operator properties", 10, ga_operators},
      {8, "robustness scan", 60, robustness},
      {9, "determinism across thread counts", 120, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.check(secs <= c.limit_s, "took " + fmt("%.1fs", secs) + " (limit " + fmt("%gs", c.limit_s) + ")");
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %d (%s) [%.2fs]%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
