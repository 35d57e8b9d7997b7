#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anv/env.hpp"
#include "anv/neuro.hpp"
#include "anv/rng.hpp"

namespace anv {

enum class MutationDistribution { UniformAdditive, GaussianAdditive, UniformReplace };
enum class Algorithm { ANv1, BatchuBaseline };

/// Generation statistic fed to the Mutation Resistance controller.
enum class StagnationMetric { WinnerFitness, NormalizedScore };

std::string_view to_string(MutationDistribution d);
std::string_view to_string(Algorithm a);
std::string_view to_string(StagnationMetric m);

struct EvolutionConfig {
    std::size_t population_size = 15;
    std::size_t royal_family_size = 4;
    double initial_resistance = 0.95;
    double resistance_decrement = 0.05;
    double resistance_floor = 0.05;
    double stagnation_lo = -0.05;
    double stagnation_hi = 0.10;
    double mutation_magnitude = 0.3;
    MutationDistribution mutation_distribution = MutationDistribution::GaussianAdditive;
    StagnationMetric stagnation_metric = StagnationMetric::WinnerFitness;
    Algorithm algorithm = Algorithm::ANv1;
    double baseline_mutation_prob = 0.15;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    bool operator==(const EvolutionConfig&) const = default;
};

/// Mutation Resistance state machine. Resistance is one minus the per-weight
/// mutation probability.
class MutationController {
public:
    explicit MutationController(const EvolutionConfig& cfg);

    /// Feeds one generation's winner fitness and returns the resistance for
    /// breeding the next generation.
    ///
    /// The first call sets the initial resistance. Afterwards the relative
    /// change r = (winner - previous) / max(|previous|, 1e-9) is compared
    /// with [stagnation_lo, stagnation_hi]: inside, the resistance drops by
    /// the decrement (clamped at the floor); outside, it resets to the
    /// initial value.
    double update(double winner_fitness, const EvolutionConfig& cfg);

    double current_resistance() const noexcept { return resistance_; }
    double selection_prob() const noexcept { return 1.0 - resistance_; }
    std::optional<double> previous_winner_fitness() const noexcept { return previous_; }

    /// True when the last update landed inside the stagnation interval.
    bool last_was_stagnant() const noexcept { return stagnant_; }

private:
    double resistance_;
    std::optional<double> previous_;
    bool stagnant_ = false;
};

struct RankedGenome {
    Genome genome;
    double fitness;
    std::size_t slot; // position in the evaluated population
};

/// Sorts by fitness, descending; ties keep the lower slot first.
std::vector<RankedGenome> rank_population(std::span<const Genome> population, std::span<const double> fitness);

/// Child one alternates a, b, a, b, ... starting with `a`; child two is the
/// complement. Throws InputError if the topologies differ.
std::pair<Genome, Genome> checkered_crossover(const Genome& a, const Genome& b);

/// One fair coin per weight layer picks the donor of the whole block
/// (weights and biases).
Genome layer_swap_crossover(const Genome& a, const Genome& b, Rng& rng);

/// Each weight is selected independently with `selection_prob` and perturbed
/// per `dist`. Unselected weights are left untouched.
Genome mutate(Genome g, double selection_prob, double magnitude, MutationDistribution dist, Rng& rng);

/// Next ANv1 generation: slot 0 is the unmodified winner, slots 1..R the
/// Royal Family (winner crossed with itself, then mutated), and the rest
/// the winner crossed with the next-ranked members, then mutated.
std::vector<Genome> select_and_breed_anv1(std::span<const RankedGenome> ranked, const MutationController& mc,
                                          const EvolutionConfig& cfg, Rng& rng);

/// Linear rank weights N - rank for rank 0..N-1.
std::vector<std::uint64_t> baseline_rank_weights(std::size_t n);

/// Next baseline generation: rank-weighted parents, layer-swap crossover,
/// fixed-probability mutation, no elitism.
std::vector<Genome> select_and_breed_baseline(std::span<const RankedGenome> ranked, const EvolutionConfig& cfg,
                                              Rng& rng);

struct GenerationRecord {
    std::size_t generation_index = 0;
    std::vector<double> fitnesses;
    std::size_t winner_slot = 0;
    double winner_fitness = 0.0;
    double normalized_score = 0.0;
    double resistance_used = 0.0;
    std::size_t optimal_count = 0;

    bool operator==(const GenerationRecord&) const = default;
};

struct EvalOptions {
    /// Worker threads for fitness evaluation; results do not depend on it.
    std::size_t threads = 1;
};

/// Evaluates every genome, each with the substream
/// derive_seed({run_seed, kTagEval, generation, slot}). Rethrows the failure
/// of the lowest failing slot as EvaluationError.
std::vector<double> evaluate_population(std::span<const Genome> population, const Environment& env,
                                        std::uint64_t run_seed, std::size_t generation_index,
                                        const EvalOptions& opts = {});

struct GenerationResult {
    std::vector<Genome> next_population;
    GenerationRecord record;
    Genome winner;
};

/// Evaluate, record, update resistance (ANv1 only), breed.
GenerationResult run_generation(std::span<const Genome> population, const Environment& env, MutationController& mc,
                                const EvolutionConfig& cfg, std::uint64_t run_seed, std::size_t generation_index,
                                const EvalOptions& opts = {});

/// Stop rule; when both limits are set, whichever fires first wins.
struct Termination {
    std::optional<std::size_t> max_generations;
    std::optional<std::size_t> optimal_count;

    static Termination generations(std::size_t g) { return {g, std::nullopt}; }
    static Termination optimal(std::size_t k) { return {std::nullopt, k}; }

    bool operator==(const Termination&) const = default;
};

enum class StopReason { MaxGenerations, OptimalCount };
std::string_view to_string(StopReason r);

struct RunLog {
    std::vector<GenerationRecord> records;
    std::vector<Genome> winners; // winner genome of each generation
    std::vector<Genome> final_population;
    StopReason reason = StopReason::MaxGenerations;
};

/// Runs generations from a seeded random population until the rule fires.
/// Throws ConfigError if the rule has no limit or asks for more optimal
/// populations than exist.
RunLog evolve_until(const EvolutionConfig& cfg, const Environment& env, const Topology& topology,
                    const InitScheme& init, const Termination& termination, std::uint64_t run_seed,
                    const EvalOptions& opts = {});

inline constexpr std::string_view kRunLogHeader =
    "generation,winner_slot,winner_fitness,normalized_score,resistance,optimal_count";

void write_run_log_csv(std::ostream& out, const RunLog& log);
std::string run_log_csv(const RunLog& log);

} // namespace anv
