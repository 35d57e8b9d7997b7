#include <algorithm>
#include <cmath>
#include <ostream>

#include "anv/env.hpp"
#include "anv/error.hpp"
#include "anv/text.hpp"

namespace anv {

void FlappyConfig::validate() const
{
    auto positive = [](double v, const char* key) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError(std::string("flappy.") + key + " must be positive");
        }
    };
    positive(gravity, "gravity");
    positive(flap_impulse, "flap_impulse");
    positive(pipe_speed, "pipe_speed");
    positive(pipe_gap, "pipe_gap");
    positive(pipe_width, "pipe_width");
    positive(world_height, "world_height");
    if (pipe_spacing == 0) {
        throw ConfigError("flappy.pipe_spacing must be >= 1");
    }
    if (max_frames == 0) {
        throw ConfigError("flappy.max_frames must be >= 1");
    }
    if (!(pipe_gap < world_height)) {
        throw ConfigError("flappy.pipe_gap must be smaller than flappy.world_height");
    }
    if (!(pipe_width < pipe_pitch())) {
        throw ConfigError("flappy.pipe_width must be smaller than pipe_spacing * pipe_speed");
    }
    if (score_per_frame < 0.0 || score_per_pipe < 0.0) {
        throw ConfigError("flappy scores must be non-negative");
    }
}

double flappy_gap_center(const FlappyConfig& cfg, std::uint64_t seed, std::uint64_t index)
{
    Rng rng(derive_seed({seed, index}));
    double half = cfg.pipe_gap / 2.0;
    return rng.uniform(half, cfg.world_height - half);
}

FlappyState flappy_reset(const FlappyConfig& cfg, std::uint64_t seed)
{
    FlappyState s;
    s.bird_height = cfg.world_height / 2.0;
    s.seed = seed;
    double pitch = cfg.pipe_pitch();
    for (int i = 0; i < 2; ++i) {
        s.pipes.push_back({pitch * (i + 1), flappy_gap_center(cfg, seed, s.pipes_spawned++)});
    }
    return s;
}

FlappyState flappy_step(FlappyState s, FlapAction action, const FlappyConfig& cfg)
{
    if (!s.alive) {
        throw UsageError("flappy_step: bird is dead");
    }
    s.bird_velocity = action == FlapAction::Flap ? -cfg.flap_impulse : s.bird_velocity + cfg.gravity;
    s.bird_height -= s.bird_velocity;
    for (auto& p : s.pipes) {
        p.distance -= cfg.pipe_speed;
    }
    ++s.frame;

    if (s.bird_height < 0.0 || s.bird_height > cfg.world_height) {
        s.alive = false;
    }
    double half_gap = cfg.pipe_gap / 2.0;
    for (const auto& p : s.pipes) {
        bool overlapping = p.distance <= 0.0 && p.distance + cfg.pipe_width >= 0.0;
        if (overlapping && std::abs(s.bird_height - p.gap_center) > half_gap) {
            s.alive = false;
        }
    }
    if (!s.alive) {
        return s;
    }

    while (!s.pipes.empty() && s.pipes.front().distance + cfg.pipe_width < 0.0) {
        s.score += cfg.score_per_pipe;
        s.pipes.erase(s.pipes.begin());
        double back = s.pipes.empty() ? 0.0 : s.pipes.back().distance;
        s.pipes.push_back({back + cfg.pipe_pitch(), flappy_gap_center(cfg, s.seed, s.pipes_spawned++)});
    }
    s.score += cfg.score_per_frame;
    return s;
}

std::array<double, 3> flappy_observe(const FlappyState& s, const FlappyConfig& cfg)
{
    const Pipe* next = nullptr;
    for (const auto& p : s.pipes) {
        if (p.distance + cfg.pipe_width >= 0.0) {
            next = &p;
            break;
        }
    }
    double dist = next ? std::max(next->distance, 0.0) : cfg.pipe_pitch();
    double gap = next ? next->gap_center : cfg.world_height / 2.0;
    auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
    return {unit(dist / cfg.pipe_pitch()), unit(gap / cfg.world_height), unit(s.bird_height / cfg.world_height)};
}

double flappy_score_cap(const FlappyConfig& cfg)
{
    double frames = static_cast<double>(cfg.max_frames);
    double pipes = std::floor(frames * cfg.pipe_speed / cfg.pipe_pitch()) + 1.0;
    return frames * cfg.score_per_frame + pipes * cfg.score_per_pipe;
}

double evaluate_flappy(const Genome& genome, const FlappyConfig& cfg, std::uint64_t seed, std::ostream* trajectory)
{
    const auto& topo = genome.topology();
    if (topo.input_size != 3 || topo.output_size != 1) {
        throw InputError("evaluate_flappy: topology must have 3 inputs and 1 output");
    }
    auto s = flappy_reset(cfg, seed);
    if (trajectory) {
        *trajectory << "frame,height,velocity,score\n";
    }
    auto dump = [&] {
        if (trajectory) {
            *trajectory << s.frame << ',' << format_real(s.bird_height) << ',' << format_real(s.bird_velocity)
                        << ',' << format_real(s.score) << '\n';
        }
    };
    dump();
    while (s.alive && s.frame < cfg.max_frames) {
        auto obs = flappy_observe(s, cfg);
        auto out = forward(genome, obs);
        s = flappy_step(std::move(s), out[0] > 0.5 ? FlapAction::Flap : FlapAction::NoFlap, cfg);
        dump();
    }
    return s.score;
}

FlappyEnvironment::FlappyEnvironment(FlappyConfig cfg, std::uint64_t course_seed)
    : cfg_(cfg)
    , course_seed_(course_seed)
{
    cfg_.validate();
}

double FlappyEnvironment::evaluate(const Genome& genome, std::uint64_t /*eval_seed*/) const
{
    return evaluate_flappy(genome, cfg_, course_seed_);
}

} // namespace anv
