import numpy as np
import pytest

import blocklearn as bl
from oracles import enumerate_posterior, exact_marginals


def _tv(a, b):
    return 0.5 * np.abs(a - b).sum(axis=1).max()


def test_marginals_match_enumeration(tiny_graph):
    prior = bl.PriorConfig()
    partial = bl.PartialLabeling()
    partial.add(0, 0)
    cfg = bl.ChainConfig(num_chains=16, steps_per_chain=8000, burn_in=2000, seed=1)
    acc, _ = bl.run_chains(tiny_graph, partial, prior, cfg, k=2)
    states, probs = enumerate_posterior(tiny_graph, partial, prior, 2)
    exact = exact_marginals(states, probs, tiny_graph.n, 2)
    assert _tv(acc.mean_conditional, exact) < 0.02


def test_marginals_directed_ml_mode(tiny_directed):
    prior = bl.PriorConfig(mode="ml")
    partial = bl.PartialLabeling()
    partial.add(0, 0)
    cfg = bl.ChainConfig(num_chains=16, steps_per_chain=8000, burn_in=2000, seed=2)
    acc, _ = bl.run_chains(tiny_directed, partial, prior, cfg, k=2)
    states, probs = enumerate_posterior(tiny_directed, partial, prior, 2)
    exact = exact_marginals(states, probs, tiny_directed.n, 2)
    assert _tv(acc.mean_conditional, exact) < 0.03


def test_explored_nodes_are_point_mass(tiny_graph, fast_chains):
    partial = bl.PartialLabeling()
    partial.add(3, 1)
    acc, pairs = bl.run_chains(tiny_graph, partial, bl.PriorConfig(), fast_chains, k=2)
    assert acc.mean_conditional[3, 1] == 1.0
    assert acc.mean_conditional[3, 0] == 0.0
    assert acc.mean_conditional_entropy[3] == 0.0
    assert pairs.agree_count[3] == 0


def test_rows_are_distributions(tiny_graph, fast_chains):
    acc, _ = bl.run_chains(tiny_graph, bl.PartialLabeling(), bl.PriorConfig(),
                           fast_chains, k=3)
    assert np.allclose(acc.mean_conditional.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(acc.mean_conditional >= 0)
    assert np.all(acc.mean_conditional_entropy <= 1e-12)
    assert np.all(acc.mean_conditional_entropy >= -np.log(3) - 1e-12)


def test_worker_count_does_not_change_results(tiny_graph):
    cfg = bl.ChainConfig(num_chains=12, steps_per_chain=2000, burn_in=500, seed=9)
    out = []
    for workers in (1, 3, 5):
        acc, pairs = bl.run_chains(tiny_graph, bl.PartialLabeling(),
                                   bl.PriorConfig(), cfg, k=2, workers=workers)
        out.append((acc.mean_conditional.tobytes(), pairs.agree_sum.tobytes()))
    assert out[0] == out[1] == out[2]


def test_seed_changes_samples(tiny_graph):
    base = bl.ChainConfig(num_chains=4, steps_per_chain=1000, burn_in=200, seed=0)
    other = bl.ChainConfig(num_chains=4, steps_per_chain=1000, burn_in=200, seed=1)
    a, _ = bl.run_chains(tiny_graph, bl.PartialLabeling(), bl.PriorConfig(), base, k=2)
    b, _ = bl.run_chains(tiny_graph, bl.PartialLabeling(), bl.PriorConfig(), other, k=2)
    assert not np.array_equal(a.mean_conditional, b.mean_conditional)


def test_aa_modes_agree(tiny_graph):
    prior = bl.PriorConfig()
    partial = bl.PartialLabeling()
    partial.add(0, 0)
    ratios = {}
    for mode in ("pooled", "matched"):
        cfg = bl.ChainConfig(num_chains=16, steps_per_chain=6000, burn_in=2000,
                             seed=4, aa_mode=mode)
        _, pairs = bl.run_chains(tiny_graph, partial, prior, cfg, k=2)
        mask = pairs.agree_count > 0
        r = np.zeros(tiny_graph.n)
        r[mask] = pairs.agree_sum[mask] / pairs.agree_count[mask]
        ratios[mode] = r
    assert np.abs(ratios["pooled"] - ratios["matched"]).max() < 0.25


def test_all_explored_short_circuits(tiny_graph, fast_chains):
    partial = bl.PartialLabeling()
    for v in range(tiny_graph.n):
        partial.add(v, v % 2)
    acc, pairs = bl.run_chains(tiny_graph, partial, bl.PriorConfig(),
                               fast_chains, k=2)
    for v in range(tiny_graph.n):
        assert acc.mean_conditional[v, v % 2] == 1.0
    assert pairs.pairs_drawn == 0


def test_equilibrium_check_small(tiny_graph):
    cfg = bl.ChainConfig(num_chains=8, steps_per_chain=4000, burn_in=1000, seed=0)
    drift = bl.equilibrium_check(tiny_graph, bl.PartialLabeling(), bl.PriorConfig(),
                                 cfg, k=2)
    assert drift < 0.1


def test_sample_labelings(tiny_graph):
    cfg = bl.ChainConfig(num_chains=4, steps_per_chain=1000, burn_in=500, seed=0)
    partial = bl.PartialLabeling()
    partial.add(0, 1)
    samples = bl.sample_labelings(tiny_graph, partial, bl.PriorConfig(), cfg,
                                  m=10, k=2)
    assert len(samples) == 10
    for s in samples:
        assert s.labels[0] == 1
        assert np.all((s.labels >= 0) & (s.labels < 2))


def test_chain_config_validation():
    with pytest.raises(ValueError):
        bl.ChainConfig(num_chains=0)
    with pytest.raises(ValueError):
        bl.ChainConfig(steps_per_chain=10, burn_in=20)
    with pytest.raises(ValueError):
        bl.ChainConfig(num_chains=3, aa_mode="matched")
    with pytest.raises(ValueError):
        bl.ChainConfig(aa_mode="bogus")
