#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "anv/error.hpp"
#include "anv/harness.hpp"
#include "anv/text.hpp"

namespace anv {

std::string_view to_string(Task t) { return t == Task::Flappy ? "flappy" : "centering"; }

namespace {

std::uint64_t parse_u64(std::string_view v)
{
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

std::size_t parse_count(std::string_view v) { return static_cast<std::size_t>(parse_u64(v)); }

std::optional<std::size_t> parse_optional_count(std::string_view v)
{
    if (v == "none") {
        return std::nullopt;
    }
    return parse_count(v);
}

bool parse_bool(std::string_view v)
{
    if (v == "true") return true;
    if (v == "false") return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(v) + "'");
}

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view v, const std::pair<std::string_view, Enum> (&table)[N])
{
    for (const auto& [name, value] : table) {
        if (name == v) {
            return value;
        }
    }
    std::string allowed;
    for (const auto& [name, value] : table) {
        allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    }
    throw std::invalid_argument("expected one of {" + allowed + "}, got '" + std::string(v) + "'");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum e, const std::pair<std::string_view, Enum> (&table)[N])
{
    for (const auto& [name, value] : table) {
        if (value == e) {
            return name;
        }
    }
    return "?";
}

constexpr std::pair<std::string_view, Task> kTasks[] = {{"flappy", Task::Flappy}, {"centering", Task::Centering}};
constexpr std::pair<std::string_view, Algorithm> kAlgorithms[] = {{"anv1", Algorithm::ANv1},
                                                                  {"baseline", Algorithm::BatchuBaseline}};
constexpr std::pair<std::string_view, MutationDistribution> kDistributions[] = {
    {"uniform_additive", MutationDistribution::UniformAdditive},
    {"gaussian_additive", MutationDistribution::GaussianAdditive},
    {"uniform_replace", MutationDistribution::UniformReplace},
};
constexpr std::pair<std::string_view, StagnationMetric> kMetrics[] = {
    {"winner_fitness", StagnationMetric::WinnerFitness},
    {"normalized_score", StagnationMetric::NormalizedScore},
};
constexpr std::pair<std::string_view, HiddenActivation> kHidden[] = {
    {"sigmoid", HiddenActivation::Sigmoid}, {"tanh", HiddenActivation::Tanh}, {"relu", HiddenActivation::ReLU}};
constexpr std::pair<std::string_view, OutputActivation> kOutput[] = {{"sigmoid", OutputActivation::Sigmoid},
                                                                     {"softmax", OutputActivation::Softmax},
                                                                     {"identity", OutputActivation::Identity}};

ExperimentConfig defaults_for(Task task, Algorithm algorithm)
{
    ExperimentConfig c;
    c.evolution.algorithm = algorithm;
    c.evolution.royal_family_size = 4;
    if (task == Task::Centering) {
        c.env = CenteringConfig{};
        c.evolution.population_size = 15;
        c.topology = {kLocationClassCount, {10}, 3, HiddenActivation::Tanh, OutputActivation::Softmax};
        c.termination = {100, 7};
        c.starts = {StartPosition::Left, StartPosition::Center, StartPosition::Right};
        c.replications = 3;
    } else {
        c.env = FlappyConfig{};
        c.evolution.population_size = 50;
        std::size_t hidden = algorithm == Algorithm::ANv1 ? 50 : 7;
        c.topology = {3, {hidden}, 1, HiddenActivation::Tanh, OutputActivation::Sigmoid};
        c.termination = {75, std::nullopt};
        c.replications = 1;
    }
    return c;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

std::map<std::string, Setter, std::less<>> common_setters()
{
    std::map<std::string, Setter, std::less<>> s;
    s["population_size"] = [](auto& c, auto v) { c.evolution.population_size = parse_count(v); };
    s["royal_family_size"] = [](auto& c, auto v) { c.evolution.royal_family_size = parse_count(v); };
    s["initial_resistance"] = [](auto& c, auto v) { c.evolution.initial_resistance = parse_real(v); };
    s["resistance_decrement"] = [](auto& c, auto v) { c.evolution.resistance_decrement = parse_real(v); };
    s["resistance_floor"] = [](auto& c, auto v) { c.evolution.resistance_floor = parse_real(v); };
    s["stagnation_lo"] = [](auto& c, auto v) { c.evolution.stagnation_lo = parse_real(v); };
    s["stagnation_hi"] = [](auto& c, auto v) { c.evolution.stagnation_hi = parse_real(v); };
    s["mutation_magnitude"] = [](auto& c, auto v) { c.evolution.mutation_magnitude = parse_real(v); };
    s["mutation_distribution"] = [](auto& c, auto v) {
        c.evolution.mutation_distribution = parse_enum(v, kDistributions);
    };
    s["stagnation_metric"] = [](auto& c, auto v) { c.evolution.stagnation_metric = parse_enum(v, kMetrics); };
    s["baseline_mutation_prob"] = [](auto& c, auto v) { c.evolution.baseline_mutation_prob = parse_real(v); };
    s["hidden_sizes"] = [](auto& c, auto v) {
        c.topology.hidden_sizes.clear();
        if (v == "none") {
            return;
        }
        for (const auto& f : split(v, ',')) {
            c.topology.hidden_sizes.push_back(parse_count(f));
        }
    };
    s["hidden_activation"] = [](auto& c, auto v) { c.topology.hidden_activation = parse_enum(v, kHidden); };
    s["output_activation"] = [](auto& c, auto v) { c.topology.output_activation = parse_enum(v, kOutput); };
    s["init"] = [](auto& c, auto v) {
        if (v == "uniform") {
            if (!std::holds_alternative<UniformInit>(c.init)) c.init = UniformInit{};
        } else if (v == "gaussian") {
            if (!std::holds_alternative<GaussianInit>(c.init)) c.init = GaussianInit{};
        } else {
            throw std::invalid_argument("expected uniform or gaussian, got '" + std::string(v) + "'");
        }
    };
    s["max_generations"] = [](auto& c, auto v) { c.termination.max_generations = parse_optional_count(v); };
    s["optimal_count"] = [](auto& c, auto v) { c.termination.optimal_count = parse_optional_count(v); };
    s["master_seed"] = [](auto& c, auto v) { c.master_seed = parse_u64(v); };
    s["replications"] = [](auto& c, auto v) { c.replications = parse_count(v); };
    s["output_dir"] = [](auto& c, auto v) {
        if (v.empty()) throw std::invalid_argument("must not be empty");
        c.output_dir = std::string(v);
    };
    s["trajectory"] = [](auto& c, auto v) { c.trajectory = parse_bool(v); };
    return s;
}

std::map<std::string, Setter, std::less<>> init_setters(std::string_view scheme)
{
    std::map<std::string, Setter, std::less<>> s;
    if (scheme == "uniform") {
        s["init_lo"] = [](auto& c, auto v) { std::get<UniformInit>(c.init).lo = parse_real(v); };
        s["init_hi"] = [](auto& c, auto v) { std::get<UniformInit>(c.init).hi = parse_real(v); };
    } else {
        s["init_mean"] = [](auto& c, auto v) { std::get<GaussianInit>(c.init).mean = parse_real(v); };
        s["init_sd"] = [](auto& c, auto v) { std::get<GaussianInit>(c.init).sd = parse_real(v); };
    }
    return s;
}

std::map<std::string, Setter, std::less<>> flappy_setters()
{
    std::map<std::string, Setter, std::less<>> s;
    auto f = [](ExperimentConfig& c) -> FlappyConfig& { return std::get<FlappyConfig>(c.env); };
    s["flappy.gravity"] = [f](auto& c, auto v) { f(c).gravity = parse_real(v); };
    s["flappy.flap_impulse"] = [f](auto& c, auto v) { f(c).flap_impulse = parse_real(v); };
    s["flappy.pipe_speed"] = [f](auto& c, auto v) { f(c).pipe_speed = parse_real(v); };
    s["flappy.pipe_gap"] = [f](auto& c, auto v) { f(c).pipe_gap = parse_real(v); };
    s["flappy.pipe_width"] = [f](auto& c, auto v) { f(c).pipe_width = parse_real(v); };
    s["flappy.pipe_spacing"] = [f](auto& c, auto v) { f(c).pipe_spacing = parse_count(v); };
    s["flappy.world_height"] = [f](auto& c, auto v) { f(c).world_height = parse_real(v); };
    s["flappy.max_frames"] = [f](auto& c, auto v) { f(c).max_frames = parse_count(v); };
    s["flappy.score_per_frame"] = [f](auto& c, auto v) { f(c).score_per_frame = parse_real(v); };
    s["flappy.score_per_pipe"] = [f](auto& c, auto v) { f(c).score_per_pipe = parse_real(v); };
    return s;
}

std::map<std::string, Setter, std::less<>> centering_setters()
{
    std::map<std::string, Setter, std::less<>> s;
    auto f = [](ExperimentConfig& c) -> CenteringConfig& { return std::get<CenteringConfig>(c.env); };
    s["centering.yaw_step"] = [f](auto& c, auto v) { f(c).yaw_step = parse_real(v); };
    s["centering.field_half_width"] = [f](auto& c, auto v) { f(c).field_half_width = parse_real(v); };
    s["centering.center_band"] = [f](auto& c, auto v) { f(c).center_band = parse_real(v); };
    s["centering.episodes"] = [f](auto& c, auto v) { f(c).episodes = parse_count(v); };
    s["centering.reward_per_correct"] = [f](auto& c, auto v) { f(c).reward_per_correct = parse_real(v); };
    s["centering.start_offset"] = [f](auto& c, auto v) { f(c).start_offset = parse_real(v); };
    s["centering.misclassification_rate"] = [f](auto& c, auto v) { f(c).misclassification_rate = parse_real(v); };
    s["centering.starts"] = [](auto& c, auto v) {
        c.starts.clear();
        for (const auto& name : split(v, ',')) {
            auto st = parse_start(name);
            if (!st) {
                throw std::invalid_argument("expected left, center or right, got '" + name + "'");
            }
            c.starts.push_back(*st);
        }
    };
    return s;
}

struct Entry {
    std::string value;
    std::size_t line;
};

} // namespace

void ExperimentConfig::validate() const
{
    evolution.validate();
    try {
        topology.validate();
    } catch (const InputError&) {
        throw ConfigError("hidden_sizes: every layer size must be >= 1");
    }
    std::visit([](const auto& e) { e.validate(); }, env);
    if (task() == Task::Flappy && (topology.input_size != 3 || topology.output_size != 1)) {
        throw ConfigError("topology: flappy requires 3 inputs and 1 output");
    }
    if (task() == Task::Centering) {
        if (topology.input_size != kLocationClassCount || topology.output_size != 3) {
            throw ConfigError("topology: centering requires 10 inputs and 3 outputs");
        }
        if (starts.empty()) {
            throw ConfigError("centering.starts: at least one start is required");
        }
    }
    if (const auto* u = std::get_if<UniformInit>(&init); u && !(u->lo < u->hi)) {
        throw ConfigError("init_lo must be smaller than init_hi");
    }
    if (const auto* g = std::get_if<GaussianInit>(&init); g && !(g->sd > 0.0)) {
        throw ConfigError("init_sd must be positive");
    }
    if (!termination.max_generations && !termination.optimal_count) {
        throw ConfigError("max_generations: at least one of max_generations or optimal_count must be set");
    }
    if (termination.optimal_count) {
        if (*termination.optimal_count > evolution.population_size) {
            throw ConfigError("optimal_count must not exceed population_size");
        }
        if (task() == Task::Flappy) {
            throw ConfigError("optimal_count: flappy has no task maximum");
        }
    }
    if (replications == 0) {
        throw ConfigError("replications must be >= 1");
    }
}

ExperimentConfig parse_config(std::string_view text)
{
    std::map<std::string, Entry, std::less<>> entries;
    std::vector<std::string> order;
    std::istringstream in{std::string(text)};
    std::string raw;
    for (std::size_t lineno = 1; std::getline(in, raw); ++lineno) {
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": missing key");
        }
        if (entries.contains(key)) {
            throw ConfigError(key + ": repeated key (line " + std::to_string(lineno) + ")");
        }
        entries.emplace(key, Entry{value, lineno});
        order.push_back(key);
    }

    auto take = [&](std::string_view key) -> std::optional<std::string> {
        auto it = entries.find(key);
        if (it == entries.end()) {
            return std::nullopt;
        }
        return it->second.value;
    };

    auto task_text = take("task");
    if (!task_text) {
        throw ConfigError("task: required key is missing");
    }
    Task task = Task::Flappy;
    Algorithm algorithm = Algorithm::ANv1;
    try {
        task = parse_enum(*task_text, kTasks);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("task: ") + e.what());
    }
    try {
        if (auto a = take("algorithm")) {
            algorithm = parse_enum(*a, kAlgorithms);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("algorithm: ") + e.what());
    }

    ExperimentConfig cfg = defaults_for(task, algorithm);
    auto setters = common_setters();
    auto extra = task == Task::Flappy ? flappy_setters() : centering_setters();
    setters.merge(extra);

    // `init` picks which parameter keys are legal, so apply it first.
    std::string scheme = take("init").value_or("uniform");
    try {
        setters.at("init")(cfg, scheme);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("init: ") + e.what());
    }
    auto init_keys = init_setters(scheme);
    setters.merge(init_keys);

    for (const auto& key : order) {
        if (key == "task" || key == "algorithm" || key == "init") {
            continue;
        }
        auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError(key + ": unknown key for task '" + std::string(to_string(task)) + "' (line "
                              + std::to_string(entries.at(key).line) + ")");
        }
        try {
            it->second(cfg, entries.at(key).value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(key + ": " + e.what());
        } catch (const std::out_of_range&) {
            throw ConfigError(key + ": value out of range");
        }
    }
    if (task == Task::Centering && !entries.contains("centering.start_offset")) {
        auto& c = std::get<CenteringConfig>(cfg.env);
        c.start_offset = 2.0 * c.yaw_step;
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string resolved_config_text(const ExperimentConfig& c)
{
    std::ostringstream o;
    auto count = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string("none"); };
    const auto& e = c.evolution;
    o << "task = " << to_string(c.task()) << '\n';
    o << "algorithm = " << enum_name(e.algorithm, kAlgorithms) << '\n';
    o << "population_size = " << e.population_size << '\n';
    o << "royal_family_size = " << e.royal_family_size << '\n';
    o << "initial_resistance = " << format_real(e.initial_resistance) << '\n';
    o << "resistance_decrement = " << format_real(e.resistance_decrement) << '\n';
    o << "resistance_floor = " << format_real(e.resistance_floor) << '\n';
    o << "stagnation_lo = " << format_real(e.stagnation_lo) << '\n';
    o << "stagnation_hi = " << format_real(e.stagnation_hi) << '\n';
    o << "mutation_magnitude = " << format_real(e.mutation_magnitude) << '\n';
    o << "mutation_distribution = " << enum_name(e.mutation_distribution, kDistributions) << '\n';
    o << "stagnation_metric = " << enum_name(e.stagnation_metric, kMetrics) << '\n';
    o << "baseline_mutation_prob = " << format_real(e.baseline_mutation_prob) << '\n';
    o << "hidden_sizes = ";
    if (c.topology.hidden_sizes.empty()) {
        o << "none";
    }
    for (std::size_t i = 0; i < c.topology.hidden_sizes.size(); ++i) {
        o << (i ? "," : "") << c.topology.hidden_sizes[i];
    }
    o << '\n';
    o << "hidden_activation = " << enum_name(c.topology.hidden_activation, kHidden) << '\n';
    o << "output_activation = " << enum_name(c.topology.output_activation, kOutput) << '\n';
    if (const auto* u = std::get_if<UniformInit>(&c.init)) {
        o << "init = uniform\ninit_lo = " << format_real(u->lo) << "\ninit_hi = " << format_real(u->hi) << '\n';
    } else {
        const auto& g = std::get<GaussianInit>(c.init);
        o << "init = gaussian\ninit_mean = " << format_real(g.mean) << "\ninit_sd = " << format_real(g.sd) << '\n';
    }
    o << "max_generations = " << count(c.termination.max_generations) << '\n';
    o << "optimal_count = " << count(c.termination.optimal_count) << '\n';
    o << "master_seed = " << c.master_seed << '\n';
    o << "replications = " << c.replications << '\n';
    o << "output_dir = " << c.output_dir << '\n';
    o << "trajectory = " << (c.trajectory ? "true" : "false") << '\n';
    if (const auto* f = std::get_if<FlappyConfig>(&c.env)) {
        o << "flappy.gravity = " << format_real(f->gravity) << '\n';
        o << "flappy.flap_impulse = " << format_real(f->flap_impulse) << '\n';
        o << "flappy.pipe_speed = " << format_real(f->pipe_speed) << '\n';
        o << "flappy.pipe_gap = " << format_real(f->pipe_gap) << '\n';
        o << "flappy.pipe_width = " << format_real(f->pipe_width) << '\n';
        o << "flappy.pipe_spacing = " << f->pipe_spacing << '\n';
        o << "flappy.world_height = " << format_real(f->world_height) << '\n';
        o << "flappy.max_frames = " << f->max_frames << '\n';
        o << "flappy.score_per_frame = " << format_real(f->score_per_frame) << '\n';
        o << "flappy.score_per_pipe = " << format_real(f->score_per_pipe) << '\n';
    } else {
        const auto& k = std::get<CenteringConfig>(c.env);
        o << "centering.yaw_step = " << format_real(k.yaw_step) << '\n';
        o << "centering.field_half_width = " << format_real(k.field_half_width) << '\n';
        o << "centering.center_band = " << format_real(k.center_band) << '\n';
        o << "centering.episodes = " << k.episodes << '\n';
        o << "centering.reward_per_correct = " << format_real(k.reward_per_correct) << '\n';
        o << "centering.start_offset = " << format_real(k.start_offset) << '\n';
        o << "centering.misclassification_rate = " << format_real(k.misclassification_rate) << '\n';
        o << "centering.starts = ";
        for (std::size_t i = 0; i < c.starts.size(); ++i) {
            o << (i ? "," : "") << to_string(c.starts[i]);
        }
        o << '\n';
    }
    return o.str();
}

} // namespace anv
