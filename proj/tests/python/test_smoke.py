import pytest

import anv


def centering_topology():
    return anv.Topology(10, [10], 3, anv.HiddenActivation.Tanh, anv.OutputActivation.Softmax)


def test_forward_and_weights():
    t = anv.Topology(1, [1], 1)
    assert t.total_weights == 4
    g = anv.Genome(t, [0.0, 0.0, 0.0, 0.0])
    assert anv.forward(g, [0.3]) == [0.5]
    with pytest.raises(anv.InputError):
        anv.Genome(t, [0.0])


def test_crossover_and_mutation():
    t = anv.Topology(3, [], 1, output_activation=anv.OutputActivation.Identity)
    a = anv.Genome(t, [1, 2, 3, 4])
    b = anv.Genome(t, [5, 6, 7, 8])
    c1, c2 = anv.checkered_crossover(a, b)
    assert c1.weights == [1, 6, 3, 8]
    assert c2.weights == [5, 2, 7, 4]
    same = anv.mutate(a, 0.0, 0.3, anv.MutationDistribution.GaussianAdditive, anv.Rng(1))
    assert same == a


def test_controller():
    cfg = anv.EvolutionConfig()
    mc = anv.MutationController(cfg)
    assert mc.update(100.0, cfg) == 0.95
    assert mc.update(100.0, cfg) == pytest.approx(0.90)
    assert mc.last_was_stagnant


def test_genome_text_round_trip():
    g = anv.init_gaussian(centering_topology(), anv.Rng(3))
    back = anv.Genome.from_text(g.to_text(), anv.HiddenActivation.Tanh, anv.OutputActivation.Softmax)
    assert back == g


def test_tasks():
    zero = anv.Genome(anv.Topology(3, [7], 1), [0.0] * 36)
    assert anv.evaluate_flappy(zero, 1) == 21.0
    g = anv.init_uniform(centering_topology(), anv.Rng(5))
    score = anv.evaluate_centering(g, anv.StartPosition.Left)
    assert score in {0, 100, 200, 300, 400, 500}


def test_campaign(tmp_path):
    cfg = anv.parse_config("task = centering\nreplications = 1\nmax_generations = 5\n")
    cfg.output_dir = str(tmp_path)
    summary = anv.run_campaign(cfg)
    assert summary.all_ok()
    assert len(summary.runs) == 3
    assert (tmp_path / "summary.csv").read_text() == summary.csv()
    assert anv.parse_config(cfg.resolved()).resolved() == cfg.resolved()


def test_compare_and_errors():
    a = anv.parse_config("task = centering\nmax_generations = 4\noptimal_count = none\n")
    cmp = anv.compare_algorithms(a, a, [1, 2])
    assert [r.ratio for r in cmp.rows] == [1.0, 1.0]
    assert cmp.csv().endswith("geomean,,,1\n")
    with pytest.raises(anv.ConfigError, match="bogus"):
        anv.parse_config("task = centering\nbogus = 1\n")
