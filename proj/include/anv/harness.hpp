#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "anv/env.hpp"
#include "anv/evolve.hpp"
#include "anv/neuro.hpp"

namespace anv {

enum class Task { Flappy, Centering };
std::string_view to_string(Task t);

/// Everything needed to reproduce a campaign.
struct ExperimentConfig {
    EvolutionConfig evolution;
    std::variant<FlappyConfig, CenteringConfig> env;
    std::vector<StartPosition> starts; // centering only
    Topology topology;
    InitScheme init = UniformInit{};
    Termination termination;
    std::uint64_t master_seed = 1;
    std::size_t replications = 1;
    std::string output_dir = "out";
    bool trajectory = false;

    Task task() const { return env.index() == 0 ? Task::Flappy : Task::Centering; }

    /// Throws ConfigError naming the offending key.
    void validate() const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses `key = value` lines (`#` starts a comment). `task` is required;
/// every other key falls back to the task's default. Unknown or repeated
/// keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every setting, defaults included, in the same `key = value` syntax.
/// parse_config(resolved_config_text(c)) == c.
std::string resolved_config_text(const ExperimentConfig& cfg);

struct ReplicationResult {
    std::size_t run_index = 0;
    std::optional<StartPosition> start;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::size_t generations = 0;
    StopReason reason = StopReason::MaxGenerations;
    double final_winner_fitness = 0.0;
    double mean_last10_normalized = 0.0;
};

struct Stat {
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

/// Min/median/max (median of an even count is the mean of the middle pair).
/// Empty input gives all zeros.
Stat describe(std::vector<double> values);

struct CampaignSummary {
    std::vector<ReplicationResult> runs;
    // Over successful runs only.
    Stat generations;
    Stat final_winner_fitness;
    Stat mean_last10_normalized;

    bool all_ok() const;
};

/// Mean normalized score over the last (up to) 10 generations.
double mean_last10(const RunLog& log);

std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t replication);

/// Environment for one experiment. Flappy courses are fixed per run seed.
std::unique_ptr<Environment> make_environment(const ExperimentConfig& cfg, std::optional<StartPosition> start,
                                              std::uint64_t run_seed);

struct CampaignOptions {
    std::size_t threads = 1;
    bool write_artifacts = true;
};

/// Runs every (start, replication) experiment. A failing experiment is
/// recorded in the summary and does not stop its siblings. Writes
/// resolved_config.txt, run_<r>.csv, run_<r>/winner_<g>.txt and
/// summary.csv under cfg.output_dir.
CampaignSummary run_campaign(const ExperimentConfig& cfg, const CampaignOptions& opts = {});

enum class SummaryFormat { Csv, PlainTable };
std::string emit_summary(const CampaignSummary& summary, SummaryFormat format);

struct ComparisonRow {
    std::uint64_t seed;
    double score_a;
    double score_b;
    double ratio;
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    double geometric_mean_ratio = 1.0;
};

/// Per-seed ratio of the final-10-generation mean normalized score, a over
/// b. Throws InputError unless both configs share task, environment
/// constants and termination rule.
Comparison compare_algorithms(const ExperimentConfig& a, const ExperimentConfig& b,
                              const std::vector<std::uint64_t>& seeds, std::size_t threads = 1);

std::string comparison_csv(const Comparison& cmp);

} // namespace anv
