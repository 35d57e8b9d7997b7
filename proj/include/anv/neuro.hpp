#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "anv/rng.hpp"

namespace anv {

enum class HiddenActivation { Sigmoid, Tanh, ReLU };
enum class OutputActivation { Sigmoid, Softmax, Identity };

/// Layer sizes and activations of a fixed-architecture, fully connected
/// feedforward net.
struct Topology {
    std::size_t input_size = 1;
    std::vector<std::size_t> hidden_sizes;
    std::size_t output_size = 1;
    HiddenActivation hidden_activation = HiddenActivation::Sigmoid;
    OutputActivation output_activation = OutputActivation::Sigmoid;

    /// Throws InputError if any size is zero.
    void validate() const;

    /// input, hidden..., output
    std::vector<std::size_t> layer_sizes() const;

    /// Number of weight layers (hidden_sizes.size() + 1).
    std::size_t layer_count() const { return hidden_sizes.size() + 1; }

    bool operator==(const Topology&) const = default;
};

/// Flat genome length: sum over consecutive layers of (fan_in + 1) * fan_out.
std::size_t total_weights(const Topology& topology);

/// Contiguous span of the flat genome holding one weight layer.
struct LayerBlock {
    std::size_t offset;
    std::size_t length;
    std::size_t fan_in;
    std::size_t fan_out;
};

/// Block boundaries in canonical order. Within a block the weights are
/// row-major by destination neuron, each row being fan_in incoming weights
/// followed by that neuron's bias.
std::vector<LayerBlock> layer_blocks(const Topology& topology);

/// Flat weight vector bound to the topology it decodes under. The length is
/// checked on construction; a mismatch is rejected, never padded.
class Genome {
public:
    Genome(Topology topology, std::vector<double> weights);

    const Topology& topology() const noexcept { return topology_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<double> weights() noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }

    double operator[](std::size_t i) const { return weights_[i]; }
    double& operator[](std::size_t i) { return weights_[i]; }

    bool operator==(const Genome&) const = default;

private:
    Topology topology_;
    std::vector<double> weights_;
};

struct UniformInit {
    double lo = -1.0;
    double hi = 1.0;

    bool operator==(const UniformInit&) const = default;
};

struct GaussianInit {
    double mean = 0.0;
    double sd = 1.0;

    bool operator==(const GaussianInit&) const = default;
};

using InitScheme = std::variant<UniformInit, GaussianInit>;

/// Draws every weight i.i.d. from the scheme. Throws ConfigError when
/// lo >= hi or sd <= 0.
Genome init_genome(const Topology& topology, const InitScheme& scheme, Rng& rng);

/// Affine-then-activation per layer. Pure; throws InputError when the input
/// length differs from topology.input_size.
std::vector<double> forward(const Genome& genome, std::span<const double> input);

/// Index of the largest element, lowest index on ties. Returns 0 for an
/// empty vector.
std::size_t argmax_action(std::span<const double> output);

/// Splits flat weights into per-layer matrices [layer][dest][src..., bias].
std::vector<std::vector<std::vector<double>>> unflatten(const Topology& topology,
                                                        std::span<const double> weights);

std::vector<double> flatten(const std::vector<std::vector<std::vector<double>>>& layers);

/// Text checkpoint: "topology: in,h1,...,out" then one weight per line in
/// shortest exact decimal form.
void write_genome(std::ostream& out, const Genome& genome);
std::string genome_to_string(const Genome& genome);

/// Reads a checkpoint. Activations are not part of the file format and are
/// taken from the arguments.
Genome read_genome(std::istream& in,
                   HiddenActivation hidden = HiddenActivation::Sigmoid,
                   OutputActivation output = OutputActivation::Sigmoid);

} // namespace anv
