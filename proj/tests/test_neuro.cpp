#include <cmath>
#include <numeric>
#include <sstream>

#include "anv/error.hpp"
#include "anv/neuro.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace anv;

namespace {

Topology topo(std::size_t in, std::vector<std::size_t> hidden, std::size_t out,
              OutputActivation oa = OutputActivation::Sigmoid)
{
    return {in, std::move(hidden), out, HiddenActivation::Sigmoid, oa};
}

} // namespace

TEST_CASE("total_weights follows (fan_in + 1) * fan_out per layer")
{
    CHECK(total_weights(topo(3, {7}, 1)) == 36);
    CHECK(total_weights(topo(10, {10}, 3)) == 143);
    CHECK(total_weights(topo(1, {1}, 1)) == 4);
    CHECK(total_weights(topo(3, {50}, 1)) == 251);
    CHECK(total_weights(topo(2, {}, 2)) == 6);
}

TEST_CASE("layer blocks tile the genome")
{
    auto blocks = layer_blocks(topo(3, {4, 5}, 2));
    REQUIRE(blocks.size() == 3);
    CHECK(blocks[0].offset == 0);
    CHECK(blocks[0].length == 16);
    CHECK(blocks[1].offset == 16);
    CHECK(blocks[1].length == 25);
    CHECK(blocks[2].offset == 41);
    CHECK(blocks[2].length == 12);
}

TEST_CASE("zero-size layers are rejected")
{
    CHECK_THROWS_AS(topo(0, {3}, 1).validate(), InputError);
    CHECK_THROWS_AS(topo(2, {0}, 1).validate(), InputError);
    CHECK_THROWS_AS(Genome(topo(1, {1}, 0), {}), InputError);
}

TEST_CASE("genome length must match the topology exactly")
{
    CHECK_NOTHROW(Genome(topo(1, {1}, 1), {1, 2, 3, 4}));
    CHECK_THROWS_AS(Genome(topo(1, {1}, 1), {1, 2, 3}), InputError);
    CHECK_THROWS_AS(Genome(topo(1, {1}, 1), {1, 2, 3, 4, 5}), InputError);
}

TEST_CASE("init_genome")
{
    auto t = topo(10, {10}, 3);

    SUBCASE("uniform stays in range")
    {
        Rng rng(7);
        auto g = init_genome(t, UniformInit{-1.0, 1.0}, rng);
        CHECK(g.size() == 143);
        for (double w : g.weights()) {
            CHECK(w >= -1.0);
            CHECK(w < 1.0);
        }
    }

    SUBCASE("same seed gives bit-identical genomes")
    {
        Rng r1(42), r2(42);
        CHECK(init_genome(t, UniformInit{}, r1) == init_genome(t, UniformInit{}, r2));
    }

    SUBCASE("gaussian sample mean")
    {
        // 10,000 draws of N(0, 0.5): standard error 0.005.
        Topology big = topo(99, {}, 100); // 100 * 100 = 10,000 weights
        REQUIRE(total_weights(big) == 10000);
        Rng rng(3);
        auto g = init_genome(big, GaussianInit{0.0, 0.5}, rng);
        double mean = std::accumulate(g.weights().begin(), g.weights().end(), 0.0) / 10000.0;
        CHECK(std::abs(mean) < 0.05);
        double var = 0.0;
        for (double w : g.weights()) {
            var += (w - mean) * (w - mean);
        }
        CHECK(std::sqrt(var / 9999.0) == doctest::Approx(0.5).epsilon(0.05));
    }

    SUBCASE("bad schemes are configuration errors")
    {
        Rng rng(1);
        CHECK_THROWS_AS(init_genome(t, UniformInit{1.0, 1.0}, rng), ConfigError);
        CHECK_THROWS_AS(init_genome(t, GaussianInit{0.0, 0.0}, rng), ConfigError);
        CHECK_THROWS_AS(init_genome(t, GaussianInit{0.0, -1.0}, rng), ConfigError);
    }
}

TEST_CASE("forward")
{
    SUBCASE("zero weights with sigmoid output give 0.5")
    {
        Genome g(topo(3, {7}, 2), std::vector<double>(total_weights(topo(3, {7}, 2)), 0.0));
        std::vector<double> in = {0.3, -2.0, 9.0};
        for (double y : forward(g, in)) {
            CHECK(y == 0.5);
        }
    }

    SUBCASE("1-1-1 net against hand evaluation")
    {
        // Layout: [w1, b1, w2, b2].
        const double w1 = 0.7, b1 = -0.2, w2 = -1.3, b2 = 0.4, x = 0.9;
        Genome g(topo(1, {1}, 1), {w1, b1, w2, b2});
        double expected = oracle::sigmoid(w2 * oracle::sigmoid(w1 * x + b1) + b2);
        auto y = forward(g, std::vector<double>{x});
        REQUIRE(y.size() == 1);
        CHECK(y[0] == doctest::Approx(expected).epsilon(1e-15));
    }

    SUBCASE("row-major by destination neuron, bias last")
    {
        // 2 inputs -> 2 outputs, identity. Row j = [w_j0, w_j1, b_j].
        Genome g(topo(2, {}, 2, OutputActivation::Identity), {1, 2, 3, 4, 5, 6});
        auto y = forward(g, std::vector<double>{10, 100});
        CHECK(y[0] == 1 * 10 + 2 * 100 + 3);
        CHECK(y[1] == 4 * 10 + 5 * 100 + 6);
    }

    SUBCASE("softmax sums to one")
    {
        auto t = topo(10, {10}, 3, OutputActivation::Softmax);
        Rng rng(11);
        auto g = init_genome(t, UniformInit{-3, 3}, rng);
        for (std::size_t k = 0; k < 10; ++k) {
            std::vector<double> in(10, 0.0);
            in[k] = 1.0;
            auto y = forward(g, in);
            CHECK(std::abs(y[0] + y[1] + y[2] - 1.0) < 1e-12);
            for (double v : y) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }

    SUBCASE("hidden activations")
    {
        // One hidden unit with pre-activation -0.5, identity output copies it.
        std::vector<double> w = {0.0, -0.5, 1.0, 0.0};
        auto run = [&](HiddenActivation h) {
            Topology t{1, {1}, 1, h, OutputActivation::Identity};
            return forward(Genome(t, w), std::vector<double>{1.0})[0];
        };
        CHECK(run(HiddenActivation::ReLU) == 0.0);
        CHECK(run(HiddenActivation::Tanh) == doctest::Approx(std::tanh(-0.5)));
        CHECK(run(HiddenActivation::Sigmoid) == doctest::Approx(oracle::sigmoid(-0.5)));
    }

    SUBCASE("deterministic")
    {
        auto t = topo(3, {50}, 1);
        Rng rng(5);
        auto g = init_genome(t, UniformInit{}, rng);
        std::vector<double> in = {0.1, 0.2, 0.3};
        CHECK(forward(g, in) == forward(g, in));
    }

    SUBCASE("dimension mismatch")
    {
        Genome g(topo(3, {7}, 1), std::vector<double>(36, 0.0));
        CHECK_THROWS_AS(forward(g, std::vector<double>{1.0, 2.0}), InputError);
    }
}

TEST_CASE("argmax_action")
{
    CHECK(argmax_action(std::vector<double>{0.1, 0.7, 0.2}) == 1);
    CHECK(argmax_action(std::vector<double>{0.5, 0.5, 0.5}) == 0);
    CHECK(argmax_action(std::vector<double>{0.2, 0.9, 0.9}) == 1);
    CHECK(argmax_action(std::vector<double>{-4.0}) == 0);
}

TEST_CASE("flatten/unflatten round trip on random topologies")
{
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        Topology t = topo(1 + rng.below(6), {}, 1 + rng.below(4));
        for (auto k = rng.below(3); k > 0; --k) {
            t.hidden_sizes.push_back(1 + rng.below(8));
        }
        auto g = init_genome(t, GaussianInit{0.0, 2.0}, rng);
        auto layers = unflatten(t, g.weights());
        REQUIRE(layers.size() == t.layer_count());
        CHECK(flatten(layers) == std::vector<double>(g.weights().begin(), g.weights().end()));
    }
}

TEST_CASE("genome checkpoint text")
{
    SUBCASE("format")
    {
        Genome g(topo(1, {1}, 1), {0.5, -1.0, 1e-7, 3.0});
        CHECK(genome_to_string(g) == "topology: 1,1,1\n0.5\n-1\n1e-07\n3\n");
    }

    SUBCASE("exact round trip")
    {
        Topology t = topo(3, {50}, 1);
        Rng rng(17);
        auto g = init_genome(t, GaussianInit{0.0, 3.0}, rng);
        g[0] = 0.1;
        g[1] = std::nextafter(1.0, 2.0);
        g[2] = -5e-324;
        std::istringstream in(genome_to_string(g));
        auto back = read_genome(in);
        CHECK(back == g);
    }

    SUBCASE("activations come from the caller")
    {
        std::string text = "topology: 2,2\n";
        for (int i = 0; i < 6; ++i) {
            text += "0\n";
        }
        std::istringstream in2(text);
        auto g = read_genome(in2, HiddenActivation::Tanh, OutputActivation::Softmax);
        CHECK(g.topology().output_activation == OutputActivation::Softmax);
        CHECK(g.topology().hidden_sizes.empty());
    }

    SUBCASE("malformed files")
    {
        std::istringstream bad_header("layers: 1,1,1\n0\n0\n0\n0\n");
        CHECK_THROWS_AS(read_genome(bad_header), InputError);
        std::istringstream short_body("topology: 1,1,1\n0\n0\n0\n");
        CHECK_THROWS_AS(read_genome(short_body), InputError);
        std::istringstream garbage("topology: 1,1,1\n0\n0\nx\n0\n");
        CHECK_THROWS_AS(read_genome(garbage), InputError);
        std::istringstream empty("");
        CHECK_THROWS_AS(read_genome(empty), InputError);
    }
}
