// Command-line front end: run / compare / validate.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anv/error.hpp"
#include "anv/harness.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int cmd_validate(const std::string& path)
{
    auto cfg = anv::load_config(path);
    std::cout << anv::resolved_config_text(cfg);
    return 0;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::string> out,
            std::size_t threads, bool trajectory)
{
    auto cfg = anv::load_config(path);
    if (seed) {
        cfg.master_seed = *seed;
    }
    if (out) {
        cfg.output_dir = *out;
    }
    if (trajectory) {
        cfg.trajectory = true;
    }
    auto summary = anv::run_campaign(cfg, {threads, true});
    std::cout << anv::emit_summary(summary, anv::SummaryFormat::PlainTable);
    if (!summary.all_ok()) {
        std::cerr << "anv: one or more runs failed, see " << cfg.output_dir << "/summary.csv\n";
        return kExitRuntime;
    }
    return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, const std::vector<std::uint64_t>& seeds,
                std::optional<std::string> out, std::size_t threads)
{
    auto a = anv::load_config(path_a);
    auto b = anv::load_config(path_b);
    std::filesystem::path dir = out.value_or(a.output_dir);
    anv::Comparison cmp;
    try {
        cmp = anv::compare_algorithms(a, b, seeds, threads);
    } catch (const anv::InputError& e) {
        throw anv::ConfigError(e.what());
    }
    auto csv = anv::comparison_csv(cmp);
    std::filesystem::create_directories(dir);
    std::ofstream file(dir / "comparison.csv", std::ios::binary | std::ios::trunc);
    if (!(file << csv)) {
        throw std::runtime_error("cannot write " + (dir / "comparison.csv").string());
    }
    std::cout << csv;
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Accelerated neuroevolution experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::size_t threads = 1;
    bool trajectory = false;

    auto* run = app.add_subcommand("run", "Run a campaign from a config file");
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("--seed", seed, "Override master_seed");
    run->add_option("--out", out, "Override output_dir");
    run->add_option("--threads", threads, "Evaluation threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    run->add_flag("--trajectory", trajectory, "Dump the final winner's trajectory per run");

    std::string config_b;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    auto* compare = app.add_subcommand("compare", "Compare two configs over shared seeds");
    compare->add_option("config-a", config_path, "First config")->required();
    compare->add_option("config-b", config_b, "Second config")->required();
    compare->add_option("--seeds", seeds, "Comma-separated seeds")->delimiter(',');
    compare->add_option("--out", out, "Directory for comparison.csv");
    compare->add_option("--threads", threads, "Evaluation threads")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Check a config file and print it with defaults");
    validate->add_option("config", config_path, "Config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(config_path, seed, out, threads, trajectory);
        }
        if (*compare) {
            return cmd_compare(config_path, config_b, seeds, out, threads);
        }
        return cmd_validate(config_path);
    } catch (const anv::ConfigError& e) {
        std::cerr << "anv: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "anv: " << e.what() << '\n';
        return kExitRuntime;
    }
}
