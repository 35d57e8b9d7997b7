#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "anv/neuro.hpp"
#include "anv/rng.hpp"

namespace anv {

/// Evaluation contract used by the engine. Implementations hold no mutable
/// state, so evaluate may be called concurrently.
class Environment {
public:
    virtual ~Environment() = default;

    /// Fitness of one genome. `eval_seed` is the engine's per-(generation,
    /// slot) substream; deterministic tasks may ignore it.
    virtual double evaluate(const Genome& genome, std::uint64_t eval_seed) const = 0;

    /// Task maximum, when one exists. Used to count optimal populations.
    virtual std::optional<double> max_fitness() const = 0;
};

// ---------------------------------------------------------------------------
// Flappy

/// Heights are measured upward from the floor; velocity is positive
/// downward. The bird sits at horizontal position 0 and pipes approach from
/// positive distances.
struct FlappyConfig {
    double gravity = 0.002;
    double flap_impulse = 0.02;
    double pipe_speed = 0.01;
    double pipe_gap = 0.25;
    double pipe_width = 0.08;
    std::size_t pipe_spacing = 60;
    double world_height = 1.0;
    std::size_t max_frames = 10000;
    double score_per_frame = 1.0;
    double score_per_pipe = 50.0;

    void validate() const;

    /// Horizontal distance between consecutive pipes.
    double pipe_pitch() const { return static_cast<double>(pipe_spacing) * pipe_speed; }

    bool operator==(const FlappyConfig&) const = default;
};

struct Pipe {
    double distance;   // to the pipe's leading edge
    double gap_center; // height of the middle of the opening
};

enum class FlapAction { NoFlap, Flap };

struct FlappyState {
    double bird_height = 0.0;
    double bird_velocity = 0.0;
    std::vector<Pipe> pipes; // ascending distance
    std::size_t frame = 0;
    bool alive = true;
    double score = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t pipes_spawned = 0;
};

/// Gap center of the i-th pipe of a course; a pure function of (seed, i).
double flappy_gap_center(const FlappyConfig& cfg, std::uint64_t seed, std::uint64_t index);

FlappyState flappy_reset(const FlappyConfig& cfg, std::uint64_t seed);

/// Advances one frame. A pipe counts as passed once its trailing edge is
/// behind the bird. Throws UsageError on a dead state.
FlappyState flappy_step(FlappyState state, FlapAction action, const FlappyConfig& cfg);

/// [distance to nearest pipe ahead, its gap center, bird height], each
/// scaled into [0, 1]. Distance is 0 while the bird is inside a pipe.
std::array<double, 3> flappy_observe(const FlappyState& state, const FlappyConfig& cfg);

/// Upper bound on any episode score under `cfg`.
double flappy_score_cap(const FlappyConfig& cfg);

/// One episode from reset to death or max_frames; flaps iff the single
/// output exceeds 0.5. Optionally writes "frame,height,velocity,score" rows.
double evaluate_flappy(const Genome& genome, const FlappyConfig& cfg, std::uint64_t seed,
                       std::ostream* trajectory = nullptr);

/// Every genome flies the same course (fixed at construction), which makes
/// fitness a function of the genome alone.
class FlappyEnvironment final : public Environment {
public:
    FlappyEnvironment(FlappyConfig cfg, std::uint64_t course_seed);

    double evaluate(const Genome& genome, std::uint64_t eval_seed) const override;
    std::optional<double> max_fitness() const override { return std::nullopt; }

    const FlappyConfig& config() const { return cfg_; }
    std::uint64_t course_seed() const { return course_seed_; }

private:
    FlappyConfig cfg_;
    std::uint64_t course_seed_;
};

// ---------------------------------------------------------------------------
// Object centering

/// Location classes in one-hot order.
enum class LocationClass : std::uint8_t {
    TopLeft,
    TopCenter,
    TopRight,
    Left,
    Center,
    Right,
    BottomLeft,
    BottomCenter,
    BottomRight,
    NoImage,
};
inline constexpr std::size_t kLocationClassCount = 10;

/// Command order matches the control net's output indices.
enum class Command : std::uint8_t { MoveLeft, NoMovement, MoveRight };

enum class StartPosition : std::uint8_t { Left, Center, Right };

std::string_view to_string(LocationClass c);
std::string_view to_string(Command c);
std::string_view to_string(StartPosition s);
std::optional<StartPosition> parse_start(std::string_view s);

/// Angles in degrees. relative_azimuth < 0 means the object appears left of
/// the view center.
struct CenteringConfig {
    double yaw_step = 10.0;
    double field_half_width = 30.0;
    double center_band = 5.0;
    std::size_t episodes = 5;
    double reward_per_correct = 100.0;
    double start_offset = 20.0; // magnitude of the Left/Right starts
    double misclassification_rate = 0.0;

    void validate() const;
    double start_azimuth(StartPosition start) const;

    bool operator==(const CenteringConfig&) const = default;
};

struct CenteringState {
    double relative_azimuth = 0.0;
    std::size_t step_index = 0;
    double accumulated_reward = 0.0;
};

/// Noise-free class of the current bearing.
LocationClass true_location(const CenteringState& state, const CenteringConfig& cfg);

/// Location oracle. With probability misclassification_rate the true class is
/// replaced by one of the other nine, uniformly.
LocationClass classify_location(const CenteringState& state, const CenteringConfig& cfg, Rng& rng);

Command correct_command(LocationClass c);

std::array<double, kLocationClassCount> one_hot(LocationClass c);

/// Applies one yaw command. Throws UsageError once all episodes are used.
CenteringState centering_step(CenteringState state, Command command, const CenteringConfig& cfg);

/// Runs `episodes` perceive-act steps from the given start. Rewards are
/// judged against the true class. Optionally writes
/// "step,azimuth,class,command,reward" rows.
double evaluate_centering(const Genome& genome, StartPosition start, const CenteringConfig& cfg, Rng& rng,
                          std::ostream* trajectory = nullptr);

class CenteringEnvironment final : public Environment {
public:
    CenteringEnvironment(CenteringConfig cfg, StartPosition start);

    double evaluate(const Genome& genome, std::uint64_t eval_seed) const override;
    std::optional<double> max_fitness() const override;

    const CenteringConfig& config() const { return cfg_; }
    StartPosition start() const { return start_; }

private:
    CenteringConfig cfg_;
    StartPosition start_;
};

} // namespace anv
