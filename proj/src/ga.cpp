#include "pulsega/ga.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "pulsega/gates.hpp"

namespace pulsega {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::int64_t wrap_phase(std::int64_t v) {
  v %= kCentidegPerTurn;
  return v < 0 ? v + kCentidegPerTurn : v;
}

// Phase `v` shifted by whole turns to lie closest to the box centre.
std::int64_t unwrap_near(std::int64_t v, std::int64_t lo, std::int64_t hi) {
  const double centre = 0.5 * static_cast<double>(lo + hi);
  const double turns = std::round((centre - static_cast<double>(v)) / kCentidegPerTurn);
  return v + static_cast<std::int64_t>(turns) * kCentidegPerTurn;
}

}  // namespace

// --- genes ------------------------------------------------------------------

GeneBox GeneBox::global(Eigen::Index rows, std::int64_t tau_max, std::int64_t delay_max) {
  if (rows < 1) throw std::invalid_argument("GeneBox: rows must be positive");
  GeneBox box;
  box.lo = GeneMatrix::Zero(rows, 4);
  box.hi.resize(rows, 4);
  for (Eigen::Index r = 0; r < rows; ++r) box.hi.row(r) << tau_max, 1, kCentidegPerTurn - 1, delay_max;
  return box;
}

bool GeneBox::contains(const GeneMatrix& g) const {
  if (g.rows() != lo.rows()) return false;
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < 4; ++c) {
      std::int64_t v = g(r, c);
      if (c == kPhase) {
        if (v < 0 || v >= kCentidegPerTurn) return false;
        v = unwrap_near(v, lo(r, c), hi(r, c));
      }
      if (v < lo(r, c) || v > hi(r, c)) return false;
    }
  }
  return true;
}

void GeneBox::clamp(GeneMatrix& g) const {
  if (g.rows() != lo.rows()) throw std::invalid_argument("GeneBox::clamp: row count mismatch");
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < 4; ++c) {
      if (c == kPhase) {
        const std::int64_t v = unwrap_near(wrap_phase(g(r, c)), lo(r, c), hi(r, c));
        g(r, c) = wrap_phase(std::clamp(v, lo(r, c), hi(r, c)));
      } else {
        g(r, c) = std::clamp(g(r, c), lo(r, c), hi(r, c));
      }
    }
  }
}

GeneMatrix GeneBox::sample(Stream& rng) const {
  GeneMatrix g(lo.rows(), 4);
  for (Eigen::Index r = 0; r < lo.rows(); ++r) {
    for (int c = 0; c < 4; ++c) {
      const std::int64_t v = rng.uniform_int(lo(r, c), hi(r, c));
      g(r, c) = c == kPhase ? wrap_phase(v) : v;
    }
  }
  return g;
}

PulseSequence decode(const GeneMatrix& genes) {
  PulseSequence seq;
  seq.segments.reserve(static_cast<std::size_t>(genes.rows()));
  for (Eigen::Index r = 0; r < genes.rows(); ++r) {
    seq.segments.push_back({genes(r, kTau), static_cast<int>(genes(r, kSign)),
                            static_cast<std::int32_t>(genes(r, kPhase)), genes(r, kDelay)});
  }
  return seq;
}

GeneMatrix encode(const PulseSequence& seq) {
  GeneMatrix g(static_cast<Eigen::Index>(seq.size()), 4);
  for (std::size_t l = 0; l < seq.size(); ++l) {
    const auto& s = seq.segments[l];
    g.row(static_cast<Eigen::Index>(l)) << s.tau_us, s.sign_bit, s.phase_centideg, s.delay_us;
  }
  return g;
}

std::size_t Population::best_index() const {
  if (members.empty()) throw std::logic_error("best_index: empty population");
  std::size_t best = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!members[i].fitness) throw std::logic_error("best_index: unevaluated member");
    if (*members[i].fitness > *members[best].fitness) best = i;
  }
  return best;
}

// --- configuration ----------------------------------------------------------

void GAConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("GA config: " + what); };
  if (min_rows < 1 || max_rows < min_rows) fail("min_rows/max_rows are inconsistent");
  if (rows < min_rows || rows > max_rows) {
    fail("rows = " + std::to_string(rows) + " outside [" + std::to_string(min_rows) + ", " +
         std::to_string(max_rows) + "]");
  }
  if (population < 2) fail("population must be at least 2");
  if (local_population < 0 || local_population == 1) fail("local_population must be 0 or at least 2");
  if (max_delay_us < 0) fail("max_delay_us must be nonnegative");
  if (!(max_flip_rad > 0.0)) fail("max_flip_rad must be positive");
  auto prob = [&](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
  };
  prob(mutation_initial, "mutation_initial");
  prob(mutation_step, "mutation_step");
  prob(mutation_ceiling, "mutation_ceiling");
  prob(crossover_rate, "crossover_rate");
  prob(flip_rate, "flip_rate");
  if (crossover_rate + flip_rate > 1.0) fail("crossover_rate + flip_rate must not exceed 1");
  if (mutation_trigger < 1) fail("mutation_trigger must be positive");
  if (!(selection_pressure > 0.0) || pressure_step < 0.0 || pressure_max < selection_pressure) {
    fail("selection pressure settings are inconsistent");
  }
  if (!(budget_main_s > 0.0)) fail("budget_main must be positive");
  if (!(budget_local_s >= 0.0)) fail("budget_local must be nonnegative");
  if (max_generations < 0 || local_max_generations < 0) fail("generation caps must be nonnegative");
  if (!(accept_threshold > 0.0 && accept_threshold <= 1.0)) fail("accept_threshold must lie in (0, 1]");
  if (!(local_trigger > 0.0 && local_trigger <= 1.0)) fail("local_trigger must lie in (0, 1]");
  if (local_tau_width < 0 || local_phase_width < 0 || !(local_delay_fraction >= 0.0)) {
    fail("local neighbourhood widths must be nonnegative");
  }
  if (threads < 1) fail("threads must be positive");
}

int default_population(int rows) {
  const int r = std::clamp(rows, 3, 20);
  return static_cast<int>(std::lround(350.0 + 400.0 * (r - 3) / 17.0));
}

std::int64_t default_max_delay_us(const std::string& gate_name) {
  const GateSpec g = parse_gate(gate_name);
  switch (g.kind) {
    case GateKind::Cnot: return 2000;
    case GateKind::Toffoli: return 4000;
    case GateKind::Fredkin: return 5000;
    default: return 100;
  }
}

std::vector<double> RunRecord::best_trace() const {
  std::vector<double> t;
  t.reserve(generations.size());
  for (const auto& g : generations) t.push_back(g.best_fitness);
  return t;
}

// --- fitness ----------------------------------------------------------------

FitnessFunction::FitnessFunction(const SpinSystem& sys, Unitary target)
    : model_(sys), target_(std::move(target)) {
  if (target_.dim() != static_cast<Eigen::Index>(sys.dim())) {
    throw std::invalid_argument("fitness: target dimension does not match the spin system");
  }
}

double FitnessFunction::operator()(const GeneMatrix& genes) const {
  return gate_fidelity(target_.matrix(), model_.sequence(decode(genes)));
}

std::int64_t evaluate(Population& pop, const FitnessFunction& fitness, int threads) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < pop.members.size(); ++i) {
    if (!pop.members[i].fitness) todo.push_back(i);
  }
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || todo.size() < 2) {
    for (auto i : todo) pop.members[i].fitness = fitness(pop.members[i].genes);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t n = std::min(workers, todo.size());
    for (std::size_t w = 0; w < n; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < todo.size(); k += n) {
          auto& m = pop.members[todo[k]];
          m.fitness = fitness(m.genes);
        }
      });
    }
  }
  return static_cast<std::int64_t>(todo.size());
}

// --- operators --------------------------------------------------------------

Population init_population(const GAConfig& cfg, const GeneBox& box) {
  Population pop;
  pop.members.reserve(static_cast<std::size_t>(cfg.population));
  for (int i = 0; i < cfg.population; ++i) {
    Stream rng(cfg.seed, 0, static_cast<std::uint64_t>(i), StreamTag::Init);
    pop.members.push_back({box.sample(rng), std::nullopt});
  }
  return pop;
}

std::size_t luck_choose(std::span<const double> fitness, std::span<const double> weights, double pressure) {
  if (fitness.empty() || fitness.size() != weights.size()) {
    throw std::invalid_argument("luck_choose: fitness and weights must be nonempty and equally sized");
  }
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    const double f = pressure == 1.0 ? fitness[i] : std::pow(std::max(fitness[i], 0.0), pressure);
    const double v = weights[i] * f;
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  return best;
}

std::size_t luck_choose(const Population& pop, Stream& rng, double pressure) {
  std::vector<double> f(pop.size());
  std::vector<double> w(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (!pop.members[i].fitness) throw std::logic_error("luck_choose: unevaluated member");
    f[i] = *pop.members[i].fitness;
    w[i] = rng.uniform01();
  }
  return luck_choose(f, w, pressure);
}

std::pair<GeneMatrix, GeneMatrix> crossover(const GeneMatrix& a, const GeneMatrix& b, const Rectangle& rect,
                                            const GeneBox& box) {
  if (a.rows() != b.rows()) throw std::invalid_argument("crossover: parents differ in row count");
  if (rect.row_begin < 0 || rect.row_end >= a.rows() || rect.row_begin > rect.row_end || rect.col_begin < 0 ||
      rect.col_end > 3 || rect.col_begin > rect.col_end) {
    throw std::invalid_argument("crossover: rectangle out of range");
  }
  GeneMatrix x = a;
  GeneMatrix y = b;
  const auto nr = rect.row_end - rect.row_begin + 1;
  const auto nc = rect.col_end - rect.col_begin + 1;
  x.block(rect.row_begin, rect.col_begin, nr, nc) = b.block(rect.row_begin, rect.col_begin, nr, nc);
  y.block(rect.row_begin, rect.col_begin, nr, nc) = a.block(rect.row_begin, rect.col_begin, nr, nc);
  box.clamp(x);
  box.clamp(y);
  return {std::move(x), std::move(y)};
}

std::pair<GeneMatrix, GeneMatrix> crossover(const GeneMatrix& a, const GeneMatrix& b, Stream& rng,
                                            const GeneBox& box) {
  const auto r0 = rng.uniform_int(0, a.rows() - 1);
  const auto r1 = rng.uniform_int(0, a.rows() - 1);
  const auto c0 = rng.uniform_int(0, 3);
  const auto c1 = rng.uniform_int(0, 3);
  return crossover(a, b, Rectangle{std::min(r0, r1), std::max(r0, r1), std::min(c0, c1), std::max(c0, c1)}, box);
}

GeneMatrix flip(const GeneMatrix& a, Eigen::Index i, Eigen::Index j) {
  if (a.rows() < 2) throw std::invalid_argument("flip: needs at least two rows");
  if (i < 0 || j < 0 || i >= a.rows() || j >= a.rows() || i == j) {
    throw std::invalid_argument("flip: row indices must be distinct and in range");
  }
  GeneMatrix out = a;
  out.row(i).swap(out.row(j));
  return out;
}

GeneMatrix flip(const GeneMatrix& a, Stream& rng) {
  if (a.rows() < 2) throw std::invalid_argument("flip: needs at least two rows");
  const auto i = rng.uniform_int(0, a.rows() - 1);
  auto j = rng.uniform_int(0, a.rows() - 2);
  if (j >= i) ++j;
  return flip(a, i, j);
}

GeneMatrix mutate(const GeneMatrix& a, const GeneBox& box, Stream& rng) {
  if (a.rows() != box.rows()) throw std::invalid_argument("mutate: row count mismatch");
  return box.sample(rng);
}

// --- schedule ---------------------------------------------------------------

namespace {

// Incremental form of the stagnation counter shared by the loop and
// stagnation_triggers().
struct Stagnation {
  double best = -1.0;
  int idle = 0;
  int triggers = 0;

  void observe(double f, const GAConfig& cfg) {
    if (best < 0.0 || f > best + cfg.stagnation_tol) {
      best = std::max(best, f);
      idle = 0;
      return;
    }
    best = std::max(best, f);
    if (++idle >= cfg.mutation_trigger) {
      ++triggers;
      idle = 0;
    }
  }
};

double pressure_for(int triggers, const GAConfig& cfg) {
  return std::min(cfg.pressure_max, cfg.selection_pressure + cfg.pressure_step * triggers);
}

}  // namespace

int stagnation_triggers(std::span<const double> best_trace, const GAConfig& cfg) {
  Stagnation s;
  for (double f : best_trace) s.observe(f, cfg);
  return s.triggers;
}

double mutation_probability(int triggers, const GAConfig& cfg) {
  return std::min(cfg.mutation_ceiling, cfg.mutation_initial + cfg.mutation_step * triggers);
}

double mutation_schedule(const RunRecord& state, const GAConfig& cfg) {
  const auto trace = state.best_trace();
  return mutation_probability(stagnation_triggers(trace, cfg), cfg);
}

// --- generation loop --------------------------------------------------------

namespace {

struct LoopLimits {
  double budget_ms;
  std::int64_t max_generations;
};

// Builds the next population in place. Member 0 is the unmodified elite.
Population breed(const Population& pop, const GAConfig& cfg, const GeneBox& box, std::uint64_t seed,
                 std::uint64_t generation, double p_mut, double pressure) {
  const std::size_t size = pop.size();
  Population next;
  next.generation = generation;
  next.members.reserve(size);
  next.members.push_back(pop.members[pop.best_index()]);

  const bool can_flip = box.rows() >= 2;
  while (next.members.size() < size) {
    const auto slot = static_cast<std::uint64_t>(next.members.size());
    Stream op(seed, generation, slot, StreamTag::Operator);
    Stream sel(seed, generation, slot, StreamTag::Select);
    const double u = op.uniform01();
    const double cx_cut = p_mut + (1.0 - p_mut) * cfg.crossover_rate;
    const double flip_cut = cx_cut + (1.0 - p_mut) * cfg.flip_rate;
    if (u < p_mut) {
      const auto& parent = pop.members[luck_choose(pop, sel, pressure)];
      Stream rng(seed, generation, slot, StreamTag::Mutate);
      next.members.push_back({mutate(parent.genes, box, rng), std::nullopt});
    } else if (u < cx_cut) {
      const auto& a = pop.members[luck_choose(pop, sel, pressure)];
      const auto& b = pop.members[luck_choose(pop, sel, pressure)];
      Stream rng(seed, generation, slot, StreamTag::Crossover);
      auto [x, y] = crossover(a.genes, b.genes, rng, box);
      next.members.push_back({std::move(x), std::nullopt});
      if (next.members.size() < size) next.members.push_back({std::move(y), std::nullopt});
    } else if (u < flip_cut && can_flip) {
      const auto& a = pop.members[luck_choose(pop, sel, pressure)];
      Stream rng(seed, generation, slot, StreamTag::Flip);
      next.members.push_back({flip(a.genes, rng), std::nullopt});
    } else {
      next.members.push_back(pop.members[luck_choose(pop, sel, pressure)]);
    }
  }
  return next;
}

void record_generation(RunRecord& rec, const Population& pop, std::int64_t generation, Stage stage,
                       double wall_ms) {
  const auto& best = pop.members[pop.best_index()];
  rec.generations.push_back({generation, *best.fitness, wall_ms, rec.evals, stage, best.genes});
  if (!rec.best.fitness || *best.fitness > *rec.best.fitness) rec.best = best;
}

std::int64_t local_delay_width(const GAConfig& cfg) {
  return std::max<std::int64_t>(1, std::llround(cfg.local_delay_fraction * static_cast<double>(cfg.max_delay_us)));
}

// Box of the given half-widths around `centre`, intersected with `legal`.
GeneBox neighbourhood(const GeneMatrix& centre, const GeneBox& legal, std::int64_t w_tau, std::int64_t w_phase,
                      std::int64_t w_delay) {
  GeneBox box;
  box.lo = centre;
  box.hi = centre;
  for (Eigen::Index r = 0; r < centre.rows(); ++r) {
    box.lo(r, kTau) = std::max(legal.lo(r, kTau), centre(r, kTau) - w_tau);
    box.hi(r, kTau) = std::min(legal.hi(r, kTau), centre(r, kTau) + w_tau);
    const std::int64_t wp = std::min<std::int64_t>(w_phase, kCentidegPerTurn / 2 - 1);
    box.lo(r, kPhase) = centre(r, kPhase) - wp;
    box.hi(r, kPhase) = centre(r, kPhase) + wp;
    box.lo(r, kDelay) = std::max(legal.lo(r, kDelay), centre(r, kDelay) - w_delay);
    box.hi(r, kDelay) = std::min(legal.hi(r, kDelay), centre(r, kDelay) + w_delay);
  }
  return box;
}

GeneBox legal_box(const GAConfig& cfg, const SpinSystem& sys, Eigen::Index rows) {
  return GeneBox::global(rows, max_pulse_us(sys.rf_amplitude, cfg.max_flip_rad), cfg.max_delay_us);
}

Chromosome refine_impl(const Chromosome& seed_chrom, const GAConfig& cfg, const FitnessFunction& fitness,
                       const GeneBox& legal, RunRecord* record, std::int64_t first_generation) {
  if (!seed_chrom.fitness) throw std::invalid_argument("refine: seed chromosome has no fitness");
  if (*seed_chrom.fitness < cfg.local_trigger) {
    throw std::invalid_argument("refine: seed fitness " + std::to_string(*seed_chrom.fitness) +
                                " is below local_trigger " + std::to_string(cfg.local_trigger));
  }
  Chromosome best = seed_chrom;
  if (!(cfg.budget_local_s > 0.0) || cfg.local_max_generations == 0 || *best.fitness >= cfg.accept_threshold) {
    return best;
  }

  const auto t0 = Clock::now();
  const std::uint64_t seed = stream_seed(cfg.seed, 0, 0, StreamTag::Local);
  const int size = cfg.local_population > 0 ? cfg.local_population : cfg.population;

  std::int64_t w_tau = cfg.local_tau_width;
  std::int64_t w_phase = cfg.local_phase_width;
  std::int64_t w_delay = local_delay_width(cfg);
  std::size_t milestone = 0;
  while (milestone < cfg.local_milestones.size() && *best.fitness >= cfg.local_milestones[milestone]) ++milestone;

  GeneBox box = neighbourhood(best.genes, legal, w_tau, w_phase, w_delay);
  Population pop;
  pop.members.push_back(best);
  for (int i = 1; i < size; ++i) {
    Stream rng(seed, 0, static_cast<std::uint64_t>(i), StreamTag::Init);
    pop.members.push_back({box.sample(rng), std::nullopt});
  }
  RunRecord local;
  local.evals = record ? record->evals : 0;
  local.evals += evaluate(pop, fitness, cfg.threads);
  Stagnation stag;
  int shrinks = 0;

  auto log = [&](std::int64_t g) {
    const auto& b = pop.members[pop.best_index()];
    if (*b.fitness > *best.fitness) best = b;
    stag.observe(*b.fitness, cfg);
    if (record) {
      record->evals = local.evals;
      record_generation(*record, pop, first_generation + g, Stage::Local, ms_since(t0));
    }
  };
  log(0);

  for (std::int64_t g = 1; g <= cfg.local_max_generations; ++g) {
    if (*best.fitness >= cfg.accept_threshold) break;
    if (ms_since(t0) >= cfg.budget_local_s * 1000.0) break;

    // Tighten the neighbourhood and raise the pressure past each milestone.
    bool shrunk = false;
    while (milestone < cfg.local_milestones.size() && *best.fitness >= cfg.local_milestones[milestone]) {
      ++milestone;
      ++shrinks;
      w_tau = std::max<std::int64_t>(1, w_tau / 2);
      w_phase = std::max<std::int64_t>(1, w_phase / 2);
      w_delay = std::max<std::int64_t>(1, w_delay / 2);
      shrunk = true;
    }
    if (shrunk) {
      box = neighbourhood(best.genes, legal, w_tau, w_phase, w_delay);
      for (auto& m : pop.members) {
        GeneMatrix g2 = m.genes;
        box.clamp(g2);
        if (g2 != m.genes) {
          m.genes = std::move(g2);
          m.fitness.reset();
        }
      }
      local.evals += evaluate(pop, fitness, cfg.threads);
    }

    const double p_mut = mutation_probability(stag.triggers, cfg);
    const double pressure = pressure_for(stag.triggers + shrinks, cfg);
    pop = breed(pop, cfg, box, seed, static_cast<std::uint64_t>(g), p_mut, pressure);
    local.evals += evaluate(pop, fitness, cfg.threads);
    log(g);
  }
  if (record) record->evals = local.evals;
  return best;
}

}  // namespace

Chromosome refine(const Chromosome& seed, const GAConfig& cfg, const SpinSystem& sys, const Unitary& target,
                  RunRecord* record) {
  cfg.validate();
  const FitnessFunction fitness(sys, target);
  const GeneBox legal = legal_box(cfg, sys, seed.genes.rows());
  if (!legal.contains(seed.genes)) throw std::invalid_argument("refine: seed chromosome has illegal genes");
  Chromosome s = seed;
  if (!s.fitness) s.fitness = fitness(s.genes);
  const std::int64_t first = record && !record->generations.empty() ? record->generations.back().generation + 1 : 0;
  Chromosome out = refine_impl(s, cfg, fitness, legal, record, first);
  if (record && (!record->best.fitness || *out.fitness > *record->best.fitness)) record->best = out;
  return out;
}

RunRecord evolve(const GAConfig& cfg, const SpinSystem& sys, const Unitary& target) {
  cfg.validate();
  const auto t0 = Clock::now();
  const FitnessFunction fitness(sys, target);
  const GeneBox box = legal_box(cfg, sys, cfg.rows);

  RunRecord rec;
  Population pop = init_population(cfg, box);
  rec.evals += evaluate(pop, fitness, cfg.threads);
  record_generation(rec, pop, 0, Stage::Main, ms_since(t0));

  Stagnation stag;
  stag.observe(rec.generations.back().best_fitness, cfg);
  const double budget_ms = cfg.budget_main_s * 1000.0;
  std::int64_t g = 1;
  for (; g <= cfg.max_generations; ++g) {
    if (*rec.best.fitness >= cfg.accept_threshold) break;
    if (ms_since(t0) >= budget_ms) break;
    const double p_mut = mutation_probability(stag.triggers, cfg);
    const double pressure = pressure_for(stag.triggers, cfg);
    pop = breed(pop, cfg, box, cfg.seed, static_cast<std::uint64_t>(g), p_mut, pressure);
    rec.evals += evaluate(pop, fitness, cfg.threads);
    record_generation(rec, pop, g, Stage::Main, ms_since(t0));
    stag.observe(rec.generations.back().best_fitness, cfg);
  }

  const double best = *rec.best.fitness;
  if (best < cfg.accept_threshold && best >= cfg.local_trigger && cfg.budget_local_s > 0.0) {
    rec.refined = true;
    const std::int64_t first = rec.generations.back().generation + 1;
    Chromosome out = refine_impl(rec.best, cfg, fitness, box, &rec, first);
    if (*out.fitness > *rec.best.fitness) rec.best = out;
  }
  rec.accepted = *rec.best.fitness >= cfg.accept_threshold;
  rec.wall_ms = ms_since(t0);
  return rec;
}

}  // namespace pulsega
