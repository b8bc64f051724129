#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pulsega/propagator.hpp"
#include "pulsega/rng.hpp"

namespace pulsega {

/// N x 4 gene matrix; columns are tau_us, sign bit, phase (centideg), delay_us.
using GeneMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 4, Eigen::RowMajor>;

enum GeneColumn : int { kTau = 0, kSign = 1, kPhase = 2, kDelay = 3 };

/// Per-gene inclusive bounds. Phase bounds are read modulo 36000, so a box
/// around 100 centideg may run from -100 to 300.
struct GeneBox {
  GeneMatrix lo;
  GeneMatrix hi;

  /// Full legal range: tau in [0, tau_max], any sign, any phase, delay in
  /// [0, delay_max].
  static GeneBox global(Eigen::Index rows, std::int64_t tau_max, std::int64_t delay_max);

  Eigen::Index rows() const { return lo.rows(); }
  bool contains(const GeneMatrix& g) const;
  /// Moves every gene to the nearest legal value.
  void clamp(GeneMatrix& g) const;
  GeneMatrix sample(Stream& rng) const;
};

PulseSequence decode(const GeneMatrix& genes);
GeneMatrix encode(const PulseSequence& seq);

struct Chromosome {
  GeneMatrix genes;
  std::optional<double> fitness;

  PulseSequence decode() const { return pulsega::decode(genes); }
};

struct Population {
  std::vector<Chromosome> members;
  std::uint64_t generation = 0;

  std::size_t size() const { return members.size(); }
  /// Index of the fittest member, lowest index on ties. Requires evaluation.
  std::size_t best_index() const;
};

struct GAConfig {
  int rows = 3;
  int min_rows = 3;
  int max_rows = 20;
  int population = 350;
  std::int64_t max_delay_us = 100;
  double max_flip_rad = kMaxFlipAngle;

  double mutation_initial = 0.0;
  double mutation_step = 0.05;
  int mutation_trigger = 50;  // generations without improvement per step
  double mutation_ceiling = 0.25;
  double stagnation_tol = 1e-6;

  double selection_pressure = 1.0;  // exponent applied to fitness
  double pressure_step = 0.5;
  double pressure_max = 8.0;

  double crossover_rate = 0.7;
  double flip_rate = 0.2;

  double budget_main_s = 600.0;
  double budget_local_s = 1000.0;
  std::int64_t max_generations = 2000;
  std::int64_t local_max_generations = 2000;

  double accept_threshold = 0.99;
  double local_trigger = 0.8;

  int local_population = 0;  // 0: same as population
  std::int64_t local_tau_width = 5;
  std::int64_t local_phase_width = 200;
  double local_delay_fraction = 0.05;
  std::vector<double> local_milestones = {0.9, 0.95, 0.98, 0.99, 0.995, 0.999};

  std::uint64_t seed = 1;
  int threads = 1;  // not part of the result; any value gives identical output

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// 350 at 3 rows rising linearly to 750 at 20 rows.
int default_population(int rows);

/// Default maximum delay for a target gate name.
std::int64_t default_max_delay_us(const std::string& gate_name);

enum class Stage { Main, Local };

struct GenerationRecord {
  std::int64_t generation = 0;
  double best_fitness = 0.0;
  double wall_ms = 0.0;
  std::int64_t evals = 0;  // cumulative fitness evaluations
  Stage stage = Stage::Main;
  GeneMatrix best;
};

struct RunRecord {
  std::vector<GenerationRecord> generations;
  Chromosome best;
  std::int64_t evals = 0;
  double wall_ms = 0.0;
  bool accepted = false;
  bool refined = false;

  std::vector<double> best_trace() const;
};

/// Fitness evaluator bound to a system and target.
class FitnessFunction {
 public:
  FitnessFunction(const SpinSystem& sys, Unitary target);

  double operator()(const GeneMatrix& genes) const;
  const PropagatorModel& model() const { return model_; }
  const Unitary& target() const { return target_; }

 private:
  PropagatorModel model_;
  Unitary target_;
};

/// Evaluates every member without a cached fitness, spread over `threads`.
/// Returns the number of evaluations performed.
std::int64_t evaluate(Population& pop, const FitnessFunction& fitness, int threads);

Population init_population(const GAConfig& cfg, const GeneBox& box);

/// argmax_i weights[i] * fitness[i]^pressure; lowest index on ties.
std::size_t luck_choose(std::span<const double> fitness, std::span<const double> weights, double pressure = 1.0);

/// Draws one uniform [0, 1) weight per member from `rng`. Throws
/// std::logic_error if any member is unevaluated.
std::size_t luck_choose(const Population& pop, Stream& rng, double pressure = 1.0);

/// Inclusive row/column rectangle for crossover.
struct Rectangle {
  Eigen::Index row_begin, row_end, col_begin, col_end;
};

std::pair<GeneMatrix, GeneMatrix> crossover(const GeneMatrix& a, const GeneMatrix& b, const Rectangle& rect,
                                            const GeneBox& box);
std::pair<GeneMatrix, GeneMatrix> crossover(const GeneMatrix& a, const GeneMatrix& b, Stream& rng,
                                            const GeneBox& box);

/// Exchanges rows i and j of a copy.
GeneMatrix flip(const GeneMatrix& a, Eigen::Index i, Eigen::Index j);
GeneMatrix flip(const GeneMatrix& a, Stream& rng);

/// Redraws every gene uniformly within `box`.
GeneMatrix mutate(const GeneMatrix& a, const GeneBox& box, Stream& rng);

/// Number of stagnation steps reached along a best-fitness trace.
int stagnation_triggers(std::span<const double> best_trace, const GAConfig& cfg);
double mutation_probability(int triggers, const GAConfig& cfg);
double mutation_schedule(const RunRecord& state, const GAConfig& cfg);

/// Main genetic search, followed by local refinement of the best member when
/// it lands between cfg.local_trigger and cfg.accept_threshold.
RunRecord evolve(const GAConfig& cfg, const SpinSystem& sys, const Unitary& target);

/// Genetic search confined to a shrinking box around `seed`. Never returns a
/// worse chromosome than `seed`. Appends generations to `record` if given.
Chromosome refine(const Chromosome& seed, const GAConfig& cfg, const SpinSystem& sys, const Unitary& target,
                  RunRecord* record = nullptr);

}  // namespace pulsega
