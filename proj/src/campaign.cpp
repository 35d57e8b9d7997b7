#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "anv/error.hpp"
#include "anv/harness.hpp"
#include "anv/text.hpp"

namespace fs = std::filesystem;

namespace anv {

Stat describe(std::vector<double> values)
{
    if (values.empty()) {
        return {};
    }
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    double median = n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
    return {values.front(), median, values.back()};
}

bool CampaignSummary::all_ok() const
{
    return std::all_of(runs.begin(), runs.end(), [](const ReplicationResult& r) { return r.ok; });
}

double mean_last10(const RunLog& log)
{
    const auto& recs = log.records;
    std::size_t k = std::min<std::size_t>(10, recs.size());
    if (k == 0) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t i = recs.size() - k; i < recs.size(); ++i) {
        sum += recs[i].normalized_score;
    }
    return sum / static_cast<double>(k);
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t replication)
{
    return derive_seed({master_seed, replication});
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& cfg, std::optional<StartPosition> start,
                                              std::uint64_t run_seed)
{
    if (const auto* f = std::get_if<FlappyConfig>(&cfg.env)) {
        return std::make_unique<FlappyEnvironment>(*f, derive_seed({run_seed, kTagCourse}));
    }
    return std::make_unique<CenteringEnvironment>(std::get<CenteringConfig>(cfg.env),
                                                  start.value_or(StartPosition::Center));
}

namespace {

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << content;
    if (!out.flush()) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

void write_trajectory(const Environment& env, const Genome& winner, std::uint64_t seed, const fs::path& path)
{
    std::ostringstream os;
    if (const auto* f = dynamic_cast<const FlappyEnvironment*>(&env)) {
        evaluate_flappy(winner, f->config(), f->course_seed(), &os);
    } else {
        const auto& c = dynamic_cast<const CenteringEnvironment&>(env);
        Rng rng(seed);
        evaluate_centering(winner, c.start(), c.config(), rng, &os);
    }
    write_file(path, os.str());
}

ReplicationResult run_one(const ExperimentConfig& cfg, std::size_t run_index, std::optional<StartPosition> start,
                          std::size_t replication, const CampaignOptions& opts)
{
    ReplicationResult res;
    res.run_index = run_index;
    res.start = start;
    res.replication = replication;
    res.seed = replication_seed(cfg.master_seed, replication);
    try {
        auto env = make_environment(cfg, start, res.seed);
        auto log = evolve_until(cfg.evolution, *env, cfg.topology, cfg.init, cfg.termination, res.seed,
                                EvalOptions{opts.threads});
        res.generations = log.records.size();
        res.reason = log.reason;
        res.final_winner_fitness = log.records.empty() ? 0.0 : log.records.back().winner_fitness;
        res.mean_last10_normalized = mean_last10(log);

        if (opts.write_artifacts) {
            fs::path root(cfg.output_dir);
            fs::path dir = root / ("run_" + std::to_string(run_index));
            fs::create_directories(dir);
            for (std::size_t g = 0; g < log.winners.size(); ++g) {
                write_file(dir / ("winner_" + std::to_string(g) + ".txt"), genome_to_string(log.winners[g]));
            }
            if (cfg.trajectory && !log.winners.empty()) {
                auto seed = derive_seed({res.seed, kTagEval, log.records.size() - 1, log.records.back().winner_slot});
                write_trajectory(*env, log.winners.back(), seed, dir / "trajectory.csv");
            }
            write_file(root / ("run_" + std::to_string(run_index) + ".csv"), run_log_csv(log));
        }
        res.ok = true;
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
    }
    return res;
}

std::string csv_safe(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

CampaignSummary run_campaign(const ExperimentConfig& cfg, const CampaignOptions& opts)
{
    cfg.validate();
    if (opts.write_artifacts) {
        fs::path root(cfg.output_dir);
        std::error_code ec;
        fs::create_directories(root, ec);
        if (ec || !fs::is_directory(root)) {
            throw std::runtime_error("output_dir '" + cfg.output_dir + "' is not writable");
        }
        write_file(root / "resolved_config.txt", resolved_config_text(cfg));
    }

    std::vector<std::optional<StartPosition>> starts;
    if (cfg.task() == Task::Centering) {
        starts.assign(cfg.starts.begin(), cfg.starts.end());
    } else {
        starts.emplace_back(std::nullopt);
    }

    CampaignSummary summary;
    std::size_t run_index = 0;
    for (const auto& start : starts) {
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
            summary.runs.push_back(run_one(cfg, run_index++, start, rep, opts));
        }
    }

    std::vector<double> gens, finals, means;
    for (const auto& r : summary.runs) {
        if (r.ok) {
            gens.push_back(static_cast<double>(r.generations));
            finals.push_back(r.final_winner_fitness);
            means.push_back(r.mean_last10_normalized);
        }
    }
    summary.generations = describe(gens);
    summary.final_winner_fitness = describe(finals);
    summary.mean_last10_normalized = describe(means);

    if (opts.write_artifacts) {
        write_file(fs::path(cfg.output_dir) / "summary.csv", emit_summary(summary, SummaryFormat::Csv));
    }
    return summary;
}

std::string emit_summary(const CampaignSummary& summary, SummaryFormat format)
{
    static const std::vector<std::string> header = {
        "run",    "start",       "replication",          "seed",
        "status", "generations", "stop_reason",          "final_winner_fitness",
        "mean_last10_normalized"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : summary.runs) {
        std::vector<std::string> row = {std::to_string(r.run_index),
                                        r.start ? std::string(to_string(*r.start)) : std::string("-"),
                                        std::to_string(r.replication), std::to_string(r.seed)};
        if (r.ok) {
            row.insert(row.end(), {"ok", std::to_string(r.generations), std::string(to_string(r.reason)),
                                   format_real(r.final_winner_fitness), format_real(r.mean_last10_normalized)});
        } else {
            row.insert(row.end(), {"failed: " + csv_safe(r.error), "", "", "", ""});
        }
        rows.push_back(std::move(row));
    }
    if (!summary.runs.empty()) {
        auto stat_row = [&](const char* name, double Stat::*field) {
            rows.push_back({name, "", "", "", "", format_real(summary.generations.*field), "",
                            format_real(summary.final_winner_fitness.*field),
                            format_real(summary.mean_last10_normalized.*field)});
        };
        stat_row("min", &Stat::min);
        stat_row("median", &Stat::median);
        stat_row("max", &Stat::max);
    }

    std::ostringstream o;
    if (format == SummaryFormat::Csv) {
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                o << (i ? "," : "") << cells[i];
            }
            o << '\n';
        };
        line(header);
        for (const auto& r : rows) {
            line(r);
        }
        return o.str();
    }

    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        width[i] = header[i].size();
        for (const auto& r : rows) {
            width[i] = std::max(width[i], r[i].size());
        }
    }
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            o << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << cells[i];
        }
        o << '\n';
    };
    line(header);
    for (const auto& r : rows) {
        line(r);
    }
    return o.str();
}

Comparison compare_algorithms(const ExperimentConfig& a, const ExperimentConfig& b,
                              const std::vector<std::uint64_t>& seeds, std::size_t threads)
{
    if (a.task() != b.task()) {
        throw InputError("compare: configs target different tasks");
    }
    if (!(a.env == b.env)) {
        throw InputError("compare: environment constants differ");
    }
    if (!(a.termination == b.termination)) {
        throw InputError("compare: generation budgets differ");
    }
    if (a.task() == Task::Centering && a.starts.front() != b.starts.front()) {
        throw InputError("compare: centering start positions differ");
    }
    a.validate();
    b.validate();

    auto score = [&](const ExperimentConfig& c, std::uint64_t seed) {
        auto run_seed = replication_seed(seed, 0);
        std::optional<StartPosition> start;
        if (c.task() == Task::Centering) {
            start = c.starts.front();
        }
        auto env = make_environment(c, start, run_seed);
        auto log = evolve_until(c.evolution, *env, c.topology, c.init, c.termination, run_seed, EvalOptions{threads});
        return mean_last10(log);
    };

    Comparison cmp;
    double log_sum = 0.0;
    for (auto seed : seeds) {
        ComparisonRow row{seed, score(a, seed), score(b, seed), 1.0};
        if (row.score_a != row.score_b) {
            row.ratio = row.score_a / row.score_b;
        }
        log_sum += std::log(row.ratio);
        cmp.rows.push_back(row);
    }
    cmp.geometric_mean_ratio = seeds.empty() ? 1.0 : std::exp(log_sum / static_cast<double>(seeds.size()));
    return cmp;
}

std::string comparison_csv(const Comparison& cmp)
{
    std::ostringstream o;
    o << "seed,score_a,score_b,ratio\n";
    for (const auto& r : cmp.rows) {
        o << r.seed << ',' << format_real(r.score_a) << ',' << format_real(r.score_b) << ',' << format_real(r.ratio)
          << '\n';
    }
    o << "geomean,,," << format_real(cmp.geometric_mean_ratio) << '\n';
    return o.str();
}

} // namespace anv
