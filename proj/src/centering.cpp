#include <cmath>
#include <ostream>

#include "anv/env.hpp"
#include "anv/error.hpp"
#include "anv/text.hpp"

namespace anv {

std::string_view to_string(LocationClass c)
{
    switch (c) {
    case LocationClass::TopLeft: return "TopLeft";
    case LocationClass::TopCenter: return "TopCenter";
    case LocationClass::TopRight: return "TopRight";
    case LocationClass::Left: return "Left";
    case LocationClass::Center: return "Center";
    case LocationClass::Right: return "Right";
    case LocationClass::BottomLeft: return "BottomLeft";
    case LocationClass::BottomCenter: return "BottomCenter";
    case LocationClass::BottomRight: return "BottomRight";
    case LocationClass::NoImage: return "NoImage";
    }
    return "?";
}

std::string_view to_string(Command c)
{
    switch (c) {
    case Command::MoveLeft: return "MoveLeft";
    case Command::NoMovement: return "NoMovement";
    case Command::MoveRight: return "MoveRight";
    }
    return "?";
}

std::string_view to_string(StartPosition s)
{
    switch (s) {
    case StartPosition::Left: return "left";
    case StartPosition::Center: return "center";
    case StartPosition::Right: return "right";
    }
    return "?";
}

std::optional<StartPosition> parse_start(std::string_view s)
{
    if (s == "left") return StartPosition::Left;
    if (s == "center") return StartPosition::Center;
    if (s == "right") return StartPosition::Right;
    return std::nullopt;
}

void CenteringConfig::validate() const
{
    if (!(yaw_step > 0.0)) {
        throw ConfigError("centering.yaw_step must be positive");
    }
    if (!(center_band >= 0.0) || !(center_band < field_half_width)) {
        throw ConfigError("centering.center_band must be in [0, centering.field_half_width)");
    }
    if (!(std::abs(start_offset) < field_half_width)) {
        throw ConfigError("centering.start_offset must be smaller than centering.field_half_width");
    }
    if (episodes == 0) {
        throw ConfigError("centering.episodes must be >= 1");
    }
    if (!(misclassification_rate >= 0.0 && misclassification_rate <= 1.0)) {
        throw ConfigError("centering.misclassification_rate must be in [0, 1]");
    }
}

double CenteringConfig::start_azimuth(StartPosition start) const
{
    switch (start) {
    case StartPosition::Left: return -start_offset;
    case StartPosition::Right: return start_offset;
    case StartPosition::Center: break;
    }
    return 0.0;
}

LocationClass true_location(const CenteringState& state, const CenteringConfig& cfg)
{
    double az = state.relative_azimuth;
    if (std::abs(az) > cfg.field_half_width) {
        return LocationClass::NoImage;
    }
    if (az < -cfg.center_band) {
        return LocationClass::Left;
    }
    if (az > cfg.center_band) {
        return LocationClass::Right;
    }
    return LocationClass::Center;
}

LocationClass classify_location(const CenteringState& state, const CenteringConfig& cfg, Rng& rng)
{
    auto truth = true_location(state, cfg);
    if (cfg.misclassification_rate > 0.0 && rng.bernoulli(cfg.misclassification_rate)) {
        auto other = rng.below(kLocationClassCount - 1);
        if (other >= static_cast<std::uint64_t>(truth)) {
            ++other;
        }
        return static_cast<LocationClass>(other);
    }
    return truth;
}

Command correct_command(LocationClass c)
{
    switch (c) {
    case LocationClass::TopLeft:
    case LocationClass::Left:
    case LocationClass::BottomLeft: return Command::MoveLeft;
    case LocationClass::TopRight:
    case LocationClass::Right:
    case LocationClass::BottomRight: return Command::MoveRight;
    default: return Command::NoMovement;
    }
}

std::array<double, kLocationClassCount> one_hot(LocationClass c)
{
    std::array<double, kLocationClassCount> v{};
    v[static_cast<std::size_t>(c)] = 1.0;
    return v;
}

CenteringState centering_step(CenteringState state, Command command, const CenteringConfig& cfg)
{
    if (state.step_index >= cfg.episodes) {
        throw UsageError("centering_step: all episodes already used");
    }
    // Turning the head toward the object moves the object toward the center.
    if (command == Command::MoveLeft) {
        state.relative_azimuth += cfg.yaw_step;
    } else if (command == Command::MoveRight) {
        state.relative_azimuth -= cfg.yaw_step;
    }
    ++state.step_index;
    return state;
}

double evaluate_centering(const Genome& genome, StartPosition start, const CenteringConfig& cfg, Rng& rng,
                          std::ostream* trajectory)
{
    const auto& topo = genome.topology();
    if (topo.input_size != kLocationClassCount || topo.output_size != 3) {
        throw InputError("evaluate_centering: topology must have 10 inputs and 3 outputs");
    }
    if (trajectory) {
        *trajectory << "step,azimuth,class,command,reward\n";
    }
    CenteringState s;
    s.relative_azimuth = cfg.start_azimuth(start);
    while (s.step_index < cfg.episodes) {
        auto truth = true_location(s, cfg);
        auto seen = classify_location(s, cfg, rng);
        auto out = forward(genome, one_hot(seen));
        auto command = static_cast<Command>(argmax_action(out));
        double reward = command == correct_command(truth) ? cfg.reward_per_correct : 0.0;
        s.accumulated_reward += reward;
        if (trajectory) {
            *trajectory << s.step_index << ',' << format_real(s.relative_azimuth) << ',' << to_string(seen) << ','
                        << to_string(command) << ',' << format_real(reward) << '\n';
        }
        s = centering_step(s, command, cfg);
    }
    return s.accumulated_reward;
}

CenteringEnvironment::CenteringEnvironment(CenteringConfig cfg, StartPosition start)
    : cfg_(cfg)
    , start_(start)
{
    cfg_.validate();
}

double CenteringEnvironment::evaluate(const Genome& genome, std::uint64_t eval_seed) const
{
    Rng rng(eval_seed);
    return evaluate_centering(genome, start_, cfg_, rng);
}

std::optional<double> CenteringEnvironment::max_fitness() const
{
    return static_cast<double>(cfg_.episodes) * cfg_.reward_per_correct;
}

} // namespace anv
