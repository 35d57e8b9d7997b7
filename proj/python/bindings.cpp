#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "anv/error.hpp"
#include "anv/harness.hpp"

namespace py = pybind11;
using namespace anv;

namespace {

std::vector<double> weights_of(const Genome& g) { return {g.weights().begin(), g.weights().end()}; }

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Accelerated neuroevolution core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_RuntimeError);
    py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_RuntimeError);

    py::enum_<HiddenActivation>(m, "HiddenActivation")
        .value("Sigmoid", HiddenActivation::Sigmoid)
        .value("Tanh", HiddenActivation::Tanh)
        .value("ReLU", HiddenActivation::ReLU);
    py::enum_<OutputActivation>(m, "OutputActivation")
        .value("Sigmoid", OutputActivation::Sigmoid)
        .value("Softmax", OutputActivation::Softmax)
        .value("Identity", OutputActivation::Identity);
    py::enum_<MutationDistribution>(m, "MutationDistribution")
        .value("UniformAdditive", MutationDistribution::UniformAdditive)
        .value("GaussianAdditive", MutationDistribution::GaussianAdditive)
        .value("UniformReplace", MutationDistribution::UniformReplace);
    py::enum_<StartPosition>(m, "StartPosition")
        .value("Left", StartPosition::Left)
        .value("Center", StartPosition::Center)
        .value("Right", StartPosition::Right);

    py::class_<Topology>(m, "Topology")
        .def(py::init([](std::size_t in, std::vector<std::size_t> hidden, std::size_t out, HiddenActivation h,
                         OutputActivation o) {
                 Topology t{in, std::move(hidden), out, h, o};
                 t.validate();
                 return t;
             }),
             py::arg("input_size"), py::arg("hidden_sizes"), py::arg("output_size"),
             py::arg("hidden_activation") = HiddenActivation::Sigmoid,
             py::arg("output_activation") = OutputActivation::Sigmoid)
        .def_readonly("input_size", &Topology::input_size)
        .def_readonly("hidden_sizes", &Topology::hidden_sizes)
        .def_readonly("output_size", &Topology::output_size)
        .def_property_readonly("total_weights", [](const Topology& t) { return total_weights(t); });

    py::class_<Genome>(m, "Genome")
        .def(py::init<Topology, std::vector<double>>(), py::arg("topology"), py::arg("weights"))
        .def_property_readonly("topology", &Genome::topology)
        .def_property_readonly("weights", &weights_of)
        .def("__len__", &Genome::size)
        .def("__eq__", [](const Genome& a, const Genome& b) { return a == b; })
        .def("to_text", &genome_to_string)
        .def_static(
            "from_text",
            [](const std::string& text, HiddenActivation h, OutputActivation o) {
                std::istringstream in(text);
                return read_genome(in, h, o);
            },
            py::arg("text"), py::arg("hidden_activation") = HiddenActivation::Sigmoid,
            py::arg("output_activation") = OutputActivation::Sigmoid);

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", py::overload_cast<>(&Rng::uniform));

    m.def(
        "init_uniform", [](const Topology& t, Rng& rng, double lo, double hi) {
            return init_genome(t, UniformInit{lo, hi}, rng);
        },
        py::arg("topology"), py::arg("rng"), py::arg("lo") = -1.0, py::arg("hi") = 1.0);
    m.def(
        "init_gaussian", [](const Topology& t, Rng& rng, double mean, double sd) {
            return init_genome(t, GaussianInit{mean, sd}, rng);
        },
        py::arg("topology"), py::arg("rng"), py::arg("mean") = 0.0, py::arg("sd") = 1.0);
    m.def(
        "forward", [](const Genome& g, const std::vector<double>& x) { return forward(g, x); }, py::arg("genome"),
        py::arg("inputs"));
    m.def("checkered_crossover", &checkered_crossover, py::arg("a"), py::arg("b"));
    m.def("layer_swap_crossover", &layer_swap_crossover, py::arg("a"), py::arg("b"), py::arg("rng"));
    m.def("mutate", &mutate, py::arg("genome"), py::arg("selection_prob"), py::arg("magnitude"),
          py::arg("distribution"), py::arg("rng"));

    py::class_<EvolutionConfig>(m, "EvolutionConfig")
        .def(py::init<>())
        .def_readwrite("population_size", &EvolutionConfig::population_size)
        .def_readwrite("royal_family_size", &EvolutionConfig::royal_family_size)
        .def_readwrite("initial_resistance", &EvolutionConfig::initial_resistance)
        .def_readwrite("resistance_decrement", &EvolutionConfig::resistance_decrement)
        .def_readwrite("resistance_floor", &EvolutionConfig::resistance_floor)
        .def_readwrite("stagnation_lo", &EvolutionConfig::stagnation_lo)
        .def_readwrite("stagnation_hi", &EvolutionConfig::stagnation_hi)
        .def_readwrite("mutation_magnitude", &EvolutionConfig::mutation_magnitude);

    py::class_<MutationController>(m, "MutationController")
        .def(py::init<const EvolutionConfig&>(), py::arg("config"))
        .def("update", &MutationController::update, py::arg("winner_fitness"), py::arg("config"))
        .def_property_readonly("resistance", &MutationController::current_resistance)
        .def_property_readonly("selection_prob", &MutationController::selection_prob)
        .def_property_readonly("last_was_stagnant", &MutationController::last_was_stagnant);

    m.def(
        "evaluate_flappy", [](const Genome& g, std::uint64_t seed) { return evaluate_flappy(g, FlappyConfig{}, seed); },
        py::arg("genome"), py::arg("seed"), "One Flappy episode under the default physics.");
    m.def(
        "evaluate_centering",
        [](const Genome& g, StartPosition start, double noise, std::uint64_t seed) {
            CenteringConfig cfg;
            cfg.misclassification_rate = noise;
            cfg.validate();
            Rng rng(seed);
            return evaluate_centering(g, start, cfg, rng);
        },
        py::arg("genome"), py::arg("start"), py::arg("noise") = 0.0, py::arg("seed") = 0);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readwrite("master_seed", &ExperimentConfig::master_seed)
        .def_readwrite("replications", &ExperimentConfig::replications)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def_property_readonly("task", [](const ExperimentConfig& c) { return std::string(to_string(c.task())); })
        .def("resolved", &resolved_config_text);
    m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));

    py::class_<ReplicationResult>(m, "ReplicationResult")
        .def_readonly("run_index", &ReplicationResult::run_index)
        .def_readonly("replication", &ReplicationResult::replication)
        .def_readonly("seed", &ReplicationResult::seed)
        .def_readonly("ok", &ReplicationResult::ok)
        .def_readonly("error", &ReplicationResult::error)
        .def_readonly("generations", &ReplicationResult::generations)
        .def_readonly("final_winner_fitness", &ReplicationResult::final_winner_fitness)
        .def_readonly("mean_last10_normalized", &ReplicationResult::mean_last10_normalized);

    py::class_<CampaignSummary>(m, "CampaignSummary")
        .def_readonly("runs", &CampaignSummary::runs)
        .def("all_ok", &CampaignSummary::all_ok)
        .def("csv", [](const CampaignSummary& s) { return emit_summary(s, SummaryFormat::Csv); })
        .def("table", [](const CampaignSummary& s) { return emit_summary(s, SummaryFormat::PlainTable); });

    m.def(
        "run_campaign",
        [](const ExperimentConfig& cfg, std::size_t threads, bool write_artifacts) {
            py::gil_scoped_release release;
            return run_campaign(cfg, {threads, write_artifacts});
        },
        py::arg("config"), py::arg("threads") = 1, py::arg("write_artifacts") = true);

    py::class_<ComparisonRow>(m, "ComparisonRow")
        .def_readonly("seed", &ComparisonRow::seed)
        .def_readonly("score_a", &ComparisonRow::score_a)
        .def_readonly("score_b", &ComparisonRow::score_b)
        .def_readonly("ratio", &ComparisonRow::ratio);
    py::class_<Comparison>(m, "Comparison")
        .def_readonly("rows", &Comparison::rows)
        .def_readonly("geometric_mean_ratio", &Comparison::geometric_mean_ratio)
        .def("csv", &comparison_csv);
    m.def(
        "compare_algorithms",
        [](const ExperimentConfig& a, const ExperimentConfig& b, const std::vector<std::uint64_t>& seeds,
           std::size_t threads) {
            py::gil_scoped_release release;
            return compare_algorithms(a, b, seeds, threads);
        },
        py::arg("a"), py::arg("b"), py::arg("seeds"), py::arg("threads") = 1);
}
