#include "anv/evolve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "anv/error.hpp"
#include "anv/text.hpp"

namespace anv {

std::string_view to_string(MutationDistribution d)
{
    switch (d) {
    case MutationDistribution::UniformAdditive: return "uniform_additive";
    case MutationDistribution::GaussianAdditive: return "gaussian_additive";
    case MutationDistribution::UniformReplace: return "uniform_replace";
    }
    return "?";
}

std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::ANv1: return "anv1";
    case Algorithm::BatchuBaseline: return "baseline";
    }
    return "?";
}

std::string_view to_string(StagnationMetric m)
{
    switch (m) {
    case StagnationMetric::WinnerFitness: return "winner_fitness";
    case StagnationMetric::NormalizedScore: return "normalized_score";
    }
    return "?";
}

std::string_view to_string(StopReason r)
{
    switch (r) {
    case StopReason::MaxGenerations: return "max_generations";
    case StopReason::OptimalCount: return "optimal_count";
    }
    return "?";
}

void EvolutionConfig::validate() const
{
    auto rate = [](double v, const char* key) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError(std::string(key) + " must be in [0, 1]");
        }
    };
    if (population_size == 0) {
        throw ConfigError("population_size must be >= 1");
    }
    if (algorithm == Algorithm::ANv1 && royal_family_size + 1 > population_size) {
        throw ConfigError("royal_family_size: winner plus royal family (" + std::to_string(royal_family_size + 1)
                          + ") exceeds population_size (" + std::to_string(population_size) + ")");
    }
    rate(initial_resistance, "initial_resistance");
    rate(resistance_floor, "resistance_floor");
    rate(resistance_decrement, "resistance_decrement");
    rate(baseline_mutation_prob, "baseline_mutation_prob");
    if (resistance_floor > initial_resistance) {
        throw ConfigError("resistance_floor must not exceed initial_resistance");
    }
    if (!(stagnation_lo < stagnation_hi)) {
        throw ConfigError("stagnation_lo must be smaller than stagnation_hi");
    }
    if (!(mutation_magnitude > 0.0) || !std::isfinite(mutation_magnitude)) {
        throw ConfigError("mutation_magnitude must be positive");
    }
}

MutationController::MutationController(const EvolutionConfig& cfg)
    : resistance_(cfg.initial_resistance)
{
}

double MutationController::update(double winner_fitness, const EvolutionConfig& cfg)
{
    constexpr double eps = 1e-9;
    stagnant_ = false;
    if (!previous_) {
        resistance_ = cfg.initial_resistance;
    } else {
        double r = (winner_fitness - *previous_) / std::max(std::abs(*previous_), eps);
        if (r >= cfg.stagnation_lo && r <= cfg.stagnation_hi) {
            stagnant_ = true;
            resistance_ = std::max(resistance_ - cfg.resistance_decrement, cfg.resistance_floor);
        } else {
            resistance_ = cfg.initial_resistance;
        }
    }
    previous_ = winner_fitness;
    return resistance_;
}

std::vector<RankedGenome> rank_population(std::span<const Genome> population, std::span<const double> fitness)
{
    if (population.size() != fitness.size()) {
        throw InputError("rank_population: fitness count does not match population size");
    }
    std::vector<RankedGenome> ranked;
    ranked.reserve(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) {
        ranked.push_back({population[i], fitness[i], i});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedGenome& x, const RankedGenome& y) { return x.fitness > y.fitness; });
    return ranked;
}

namespace {

void require_same_topology(const Genome& a, const Genome& b, const char* op)
{
    if (!(a.topology() == b.topology())) {
        throw InputError(std::string(op) + ": parents have different topologies");
    }
}

} // namespace

std::pair<Genome, Genome> checkered_crossover(const Genome& a, const Genome& b)
{
    require_same_topology(a, b, "checkered_crossover");
    Genome c1 = a;
    Genome c2 = b;
    for (std::size_t i = 1; i < a.size(); i += 2) {
        c1[i] = b[i];
        c2[i] = a[i];
    }
    return {std::move(c1), std::move(c2)};
}

Genome layer_swap_crossover(const Genome& a, const Genome& b, Rng& rng)
{
    require_same_topology(a, b, "layer_swap_crossover");
    Genome child = a;
    for (const auto& block : layer_blocks(a.topology())) {
        if (rng.bernoulli(0.5)) {
            auto src = b.weights().subspan(block.offset, block.length);
            std::copy(src.begin(), src.end(), child.weights().begin() + static_cast<std::ptrdiff_t>(block.offset));
        }
    }
    return child;
}

Genome mutate(Genome g, double selection_prob, double magnitude, MutationDistribution dist, Rng& rng)
{
    if (!(selection_prob >= 0.0 && selection_prob <= 1.0)) {
        throw InputError("mutate: selection_prob must be in [0, 1]");
    }
    if (selection_prob == 0.0) {
        return g;
    }
    for (auto& w : g.weights()) {
        if (!rng.bernoulli(selection_prob)) {
            continue;
        }
        switch (dist) {
        case MutationDistribution::UniformAdditive: w += rng.uniform(-magnitude, magnitude); break;
        case MutationDistribution::GaussianAdditive: w += rng.normal(0.0, magnitude); break;
        case MutationDistribution::UniformReplace: w = rng.uniform(-magnitude, magnitude); break;
        }
    }
    return g;
}

std::vector<Genome> select_and_breed_anv1(std::span<const RankedGenome> ranked, const MutationController& mc,
                                          const EvolutionConfig& cfg, Rng& rng)
{
    const std::size_t n = cfg.population_size;
    if (ranked.size() != n) {
        throw InputError("select_and_breed_anv1: expected " + std::to_string(n) + " ranked genomes, got "
                         + std::to_string(ranked.size()));
    }
    const Genome& winner = ranked.front().genome;
    const double p = mc.selection_prob();
    auto mutated = [&](Genome g) {
        return mutate(std::move(g), p, cfg.mutation_magnitude, cfg.mutation_distribution, rng);
    };

    std::vector<Genome> next;
    next.reserve(n);
    next.push_back(winner);
    // Self-crossover yields two copies of the winner; the family member
    // differs from it only through mutation.
    for (std::size_t k = 0; k < cfg.royal_family_size; ++k) {
        next.push_back(mutated(checkered_crossover(winner, winner).first));
    }
    for (std::size_t member = 1; next.size() < n; ++member) {
        auto [c1, c2] = checkered_crossover(winner, ranked[member].genome);
        next.push_back(mutated(next.size() % 2 == 0 ? std::move(c1) : std::move(c2)));
    }
    return next;
}

std::vector<std::uint64_t> baseline_rank_weights(std::size_t n)
{
    std::vector<std::uint64_t> w(n);
    for (std::size_t r = 0; r < n; ++r) {
        w[r] = n - r;
    }
    return w;
}

std::vector<Genome> select_and_breed_baseline(std::span<const RankedGenome> ranked, const EvolutionConfig& cfg,
                                              Rng& rng)
{
    const std::size_t n = cfg.population_size;
    if (ranked.size() != n) {
        throw InputError("select_and_breed_baseline: expected " + std::to_string(n) + " ranked genomes, got "
                         + std::to_string(ranked.size()));
    }
    auto weights = baseline_rank_weights(n);
    const std::uint64_t total = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
    auto pick = [&]() -> const Genome& {
        std::uint64_t u = rng.below(total);
        std::size_t r = 0;
        while (u >= weights[r]) {
            u -= weights[r++];
        }
        return ranked[r].genome;
    };

    std::vector<Genome> next;
    next.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Genome& p1 = pick();
        const Genome& p2 = pick();
        next.push_back(mutate(layer_swap_crossover(p1, p2, rng), cfg.baseline_mutation_prob, cfg.mutation_magnitude,
                              cfg.mutation_distribution, rng));
    }
    return next;
}

std::vector<double> evaluate_population(std::span<const Genome> population, const Environment& env,
                                        std::uint64_t run_seed, std::size_t generation_index,
                                        const EvalOptions& opts)
{
    const std::size_t n = population.size();
    std::vector<double> fitness(n, 0.0);
    std::vector<std::exception_ptr> errors(n);
    auto eval_slot = [&](std::size_t slot) {
        try {
            auto seed = derive_seed({run_seed, kTagEval, generation_index, slot});
            double f = env.evaluate(population[slot], seed);
            if (!std::isfinite(f)) {
                throw std::runtime_error("non-finite fitness");
            }
            fitness[slot] = f;
        } catch (...) {
            errors[slot] = std::current_exception();
        }
    };

    std::size_t workers = std::min(opts.threads, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            eval_slot(i);
        }
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = cursor++; i < n; i = cursor++) {
                    eval_slot(i);
                }
            });
        }
    }

    for (std::size_t slot = 0; slot < n; ++slot) {
        if (!errors[slot]) {
            continue;
        }
        try {
            std::rethrow_exception(errors[slot]);
        } catch (const std::exception& e) {
            throw EvaluationError(slot, e.what());
        } catch (...) {
            throw EvaluationError(slot, "unknown error");
        }
    }
    return fitness;
}

GenerationResult run_generation(std::span<const Genome> population, const Environment& env, MutationController& mc,
                                const EvolutionConfig& cfg, std::uint64_t run_seed, std::size_t generation_index,
                                const EvalOptions& opts)
{
    if (population.size() != cfg.population_size) {
        throw InputError("run_generation: population has " + std::to_string(population.size())
                         + " genomes, config expects " + std::to_string(cfg.population_size));
    }
    auto fitness = evaluate_population(population, env, run_seed, generation_index, opts);
    auto ranked = rank_population(population, fitness);

    GenerationRecord rec;
    rec.generation_index = generation_index;
    rec.winner_slot = ranked.front().slot;
    rec.winner_fitness = ranked.front().fitness;
    rec.normalized_score = std::accumulate(fitness.begin(), fitness.end(), 0.0) / static_cast<double>(fitness.size());
    if (auto best = env.max_fitness()) {
        rec.optimal_count = static_cast<std::size_t>(
            std::count_if(fitness.begin(), fitness.end(), [&](double f) { return f >= *best; }));
    }
    rec.fitnesses = std::move(fitness);

    Rng rng(derive_seed({run_seed, kTagBreed, generation_index}));
    std::vector<Genome> next;
    if (cfg.algorithm == Algorithm::ANv1) {
        double metric = cfg.stagnation_metric == StagnationMetric::WinnerFitness ? rec.winner_fitness
                                                                                 : rec.normalized_score;
        rec.resistance_used = mc.update(metric, cfg);
        next = select_and_breed_anv1(ranked, mc, cfg, rng);
    } else {
        rec.resistance_used = 1.0 - cfg.baseline_mutation_prob;
        next = select_and_breed_baseline(ranked, cfg, rng);
    }
    return {std::move(next), std::move(rec), ranked.front().genome};
}

RunLog evolve_until(const EvolutionConfig& cfg, const Environment& env, const Topology& topology,
                    const InitScheme& init, const Termination& termination, std::uint64_t run_seed,
                    const EvalOptions& opts)
{
    cfg.validate();
    if (!termination.max_generations && !termination.optimal_count) {
        throw ConfigError("termination: at least one of max_generations or optimal_count is required");
    }
    if (termination.optimal_count && *termination.optimal_count > cfg.population_size) {
        throw ConfigError("optimal_count must not exceed population_size");
    }

    Rng init_rng(derive_seed({run_seed, kTagInit}));
    std::vector<Genome> population;
    population.reserve(cfg.population_size);
    for (std::size_t i = 0; i < cfg.population_size; ++i) {
        population.push_back(init_genome(topology, init, init_rng));
    }

    RunLog log;
    MutationController mc(cfg);
    for (std::size_t gen = 0;; ++gen) {
        if (termination.max_generations && gen >= *termination.max_generations) {
            log.reason = StopReason::MaxGenerations;
            break;
        }
        auto result = run_generation(population, env, mc, cfg, run_seed, gen, opts);
        population = std::move(result.next_population);
        log.winners.push_back(std::move(result.winner));
        log.records.push_back(std::move(result.record));
        if (termination.optimal_count && log.records.back().optimal_count >= *termination.optimal_count) {
            log.reason = StopReason::OptimalCount;
            break;
        }
    }
    log.final_population = std::move(population);
    return log;
}

void write_run_log_csv(std::ostream& out, const RunLog& log)
{
    out << kRunLogHeader << '\n';
    for (const auto& r : log.records) {
        out << r.generation_index << ',' << r.winner_slot << ',' << format_real(r.winner_fitness) << ','
            << format_real(r.normalized_score) << ',' << format_real(r.resistance_used) << ',' << r.optimal_count
            << '\n';
    }
}

std::string run_log_csv(const RunLog& log)
{
    std::ostringstream os;
    write_run_log_csv(os, log);
    return os.str();
}

} // namespace anv
