#include "anv/neuro.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "anv/error.hpp"
#include "anv/text.hpp"

namespace anv {

void Topology::validate() const
{
    if (input_size == 0 || output_size == 0) {
        throw InputError("topology: layer sizes must be >= 1");
    }
    for (auto h : hidden_sizes) {
        if (h == 0) {
            throw InputError("topology: layer sizes must be >= 1");
        }
    }
}

std::vector<std::size_t> Topology::layer_sizes() const
{
    std::vector<std::size_t> sizes;
    sizes.reserve(hidden_sizes.size() + 2);
    sizes.push_back(input_size);
    sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
    sizes.push_back(output_size);
    return sizes;
}

std::size_t total_weights(const Topology& topology)
{
    auto sizes = topology.layer_sizes();
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        total += (sizes[l] + 1) * sizes[l + 1];
    }
    return total;
}

std::vector<LayerBlock> layer_blocks(const Topology& topology)
{
    auto sizes = topology.layer_sizes();
    std::vector<LayerBlock> blocks;
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        std::size_t len = (sizes[l] + 1) * sizes[l + 1];
        blocks.push_back({offset, len, sizes[l], sizes[l + 1]});
        offset += len;
    }
    return blocks;
}

Genome::Genome(Topology topology, std::vector<double> weights)
    : topology_(std::move(topology))
    , weights_(std::move(weights))
{
    topology_.validate();
    auto expected = total_weights(topology_);
    if (weights_.size() != expected) {
        throw InputError("genome has " + std::to_string(weights_.size()) + " weights, topology requires "
                         + std::to_string(expected));
    }
}

Genome init_genome(const Topology& topology, const InitScheme& scheme, Rng& rng)
{
    topology.validate();
    std::vector<double> w(total_weights(topology));
    if (const auto* u = std::get_if<UniformInit>(&scheme)) {
        if (!(u->lo < u->hi)) {
            throw ConfigError("init: uniform bounds require lo < hi");
        }
        for (auto& x : w) {
            x = rng.uniform(u->lo, u->hi);
        }
    } else {
        const auto& g = std::get<GaussianInit>(scheme);
        if (!(g.sd > 0.0)) {
            throw ConfigError("init: gaussian sd must be > 0");
        }
        for (auto& x : w) {
            x = rng.normal(g.mean, g.sd);
        }
    }
    return Genome(topology, std::move(w));
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void apply_hidden(HiddenActivation act, std::vector<double>& v)
{
    for (auto& x : v) {
        switch (act) {
        case HiddenActivation::Sigmoid: x = sigmoid(x); break;
        case HiddenActivation::Tanh: x = std::tanh(x); break;
        case HiddenActivation::ReLU: x = x > 0.0 ? x : 0.0; break;
        }
    }
}

void apply_output(OutputActivation act, std::vector<double>& v)
{
    switch (act) {
    case OutputActivation::Sigmoid:
        for (auto& x : v) {
            x = sigmoid(x);
        }
        break;
    case OutputActivation::Softmax: {
        double m = *std::max_element(v.begin(), v.end());
        double sum = 0.0;
        for (auto& x : v) {
            x = std::exp(x - m);
            sum += x;
        }
        for (auto& x : v) {
            x /= sum;
        }
        break;
    }
    case OutputActivation::Identity: break;
    }
}

} // namespace

std::vector<double> forward(const Genome& genome, std::span<const double> input)
{
    const auto& topo = genome.topology();
    if (input.size() != topo.input_size) {
        throw InputError("forward: input has " + std::to_string(input.size()) + " values, topology expects "
                         + std::to_string(topo.input_size));
    }
    auto w = genome.weights();
    std::vector<double> act(input.begin(), input.end());
    std::vector<double> next;
    auto blocks = layer_blocks(topo);
    for (std::size_t l = 0; l < blocks.size(); ++l) {
        const auto& b = blocks[l];
        next.assign(b.fan_out, 0.0);
        const double* row = w.data() + b.offset;
        for (std::size_t j = 0; j < b.fan_out; ++j, row += b.fan_in + 1) {
            double z = 0.0;
            for (std::size_t i = 0; i < b.fan_in; ++i) {
                z += row[i] * act[i];
            }
            next[j] = z + row[b.fan_in];
        }
        if (l + 1 < blocks.size()) {
            apply_hidden(topo.hidden_activation, next);
        } else {
            apply_output(topo.output_activation, next);
        }
        act.swap(next);
    }
    return act;
}

std::size_t argmax_action(std::span<const double> output)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < output.size(); ++i) {
        if (output[i] > output[best]) {
            best = i;
        }
    }
    return best;
}

std::vector<std::vector<std::vector<double>>> unflatten(const Topology& topology, std::span<const double> weights)
{
    if (weights.size() != total_weights(topology)) {
        throw InputError("unflatten: weight count does not match topology");
    }
    std::vector<std::vector<std::vector<double>>> layers;
    for (const auto& b : layer_blocks(topology)) {
        auto& layer = layers.emplace_back(b.fan_out);
        for (std::size_t j = 0; j < b.fan_out; ++j) {
            auto first = weights.begin() + static_cast<std::ptrdiff_t>(b.offset + j * (b.fan_in + 1));
            layer[j].assign(first, first + static_cast<std::ptrdiff_t>(b.fan_in + 1));
        }
    }
    return layers;
}

std::vector<double> flatten(const std::vector<std::vector<std::vector<double>>>& layers)
{
    std::vector<double> out;
    for (const auto& layer : layers) {
        for (const auto& row : layer) {
            out.insert(out.end(), row.begin(), row.end());
        }
    }
    return out;
}

void write_genome(std::ostream& out, const Genome& genome)
{
    out << "topology: ";
    auto sizes = genome.topology().layer_sizes();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        out << (i ? "," : "") << sizes[i];
    }
    out << '\n';
    for (double w : genome.weights()) {
        out << format_real(w) << '\n';
    }
}

std::string genome_to_string(const Genome& genome)
{
    std::ostringstream os;
    write_genome(os, genome);
    return os.str();
}

Genome read_genome(std::istream& in, HiddenActivation hidden, OutputActivation output)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError("genome file: missing header");
    }
    constexpr std::string_view prefix = "topology:";
    std::string_view header = trim(line);
    if (header.substr(0, prefix.size()) != prefix) {
        throw InputError("genome file: header must start with 'topology:'");
    }
    auto fields = split(header.substr(prefix.size()), ',');
    if (fields.size() < 2) {
        throw InputError("genome file: topology needs at least input and output sizes");
    }
    std::vector<std::size_t> sizes;
    for (const auto& f : fields) {
        try {
            std::size_t pos = 0;
            auto v = std::stoull(f, &pos);
            if (pos != f.size()) {
                throw std::invalid_argument(f);
            }
            sizes.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw InputError("genome file: bad layer size '" + f + "'");
        }
    }
    Topology topo;
    topo.input_size = sizes.front();
    topo.output_size = sizes.back();
    topo.hidden_sizes.assign(sizes.begin() + 1, sizes.end() - 1);
    topo.hidden_activation = hidden;
    topo.output_activation = output;
    topo.validate();

    std::vector<double> w;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        try {
            w.push_back(parse_real(line));
        } catch (const std::invalid_argument& e) {
            throw InputError(std::string("genome file: ") + e.what());
        }
    }
    return Genome(std::move(topo), std::move(w));
}

} // namespace anv
