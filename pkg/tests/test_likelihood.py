import math

import numpy as np
import pytest

import blocklearn as bl
from conftest import random_graph
from oracles import enumerate_posterior, pairwise_log_likelihood


def test_fixed_p_likelihood_matches_pairwise_product():
    rng = np.random.default_rng(2)
    for directed in (False, True):
        for trial in range(15):
            g = random_graph(rng, n=6, directed=directed)
            k = 2
            labels = bl.Labeling(rng.integers(0, k, g.n), k)
            p = rng.random((k, k))
            if not directed:
                p = np.triu(p) + np.triu(p, 1).T
            stats = bl.block_stats(g, labels)
            got = bl.log_likelihood_given_p(stats, p)
            want = pairwise_log_likelihood(g, labels, p)
            assert got == pytest.approx(want, rel=1e-10)


def test_fixed_p_contradiction_is_minus_inf():
    g = bl.make_graph(2, [(0, 1)], directed=False)
    labels = bl.Labeling(np.array([0, 1]), 2)
    stats = bl.block_stats(g, labels)
    p = np.array([[0.5, 0.0], [0.0, 0.5]])
    assert bl.log_likelihood_given_p(stats, p) == -math.inf


def test_uniform_prior_closed_form():
    # with a flat prior the integrated likelihood per block is
    # 1 / ((N+1) * C(N, e)), checked in exact integer arithmetic
    rng = np.random.default_rng(7)
    prior = bl.PriorConfig(1.0, 1.0, "integrated")
    for directed in (False, True):
        for trial in range(15):
            g = random_graph(rng, n=7, directed=directed)
            k = int(rng.integers(1, 4))
            labels = bl.Labeling(rng.integers(0, k, g.n), k)
            stats = bl.block_stats(g, labels)
            got = bl.integrated_log_likelihood(stats, prior)
            want = 0.0
            N = stats.pair_counts()
            for i in range(k):
                for j in range(k):
                    if not directed and j < i:
                        continue
                    n_ij = int(N[i, j])
                    e_ij = int(stats.edge_counts[i, j])
                    want -= math.log((n_ij + 1) * math.comb(n_ij, e_ij))
            assert got == pytest.approx(want, rel=1e-9)


def test_max_likelihood_p():
    g = bl.make_graph(4, [(0, 1), (0, 2), (1, 2), (2, 3)], directed=False)
    labels = bl.Labeling(np.array([0, 0, 0, 1]), 2)
    stats = bl.block_stats(g, labels)
    p = bl.max_likelihood_p(stats)
    assert p[0, 0] == pytest.approx(1.0)      # 3 edges out of 3 pairs
    assert p[0, 1] == pytest.approx(1.0 / 3)  # edge (2,3) out of 3 cross pairs
    assert p[1, 0] == p[0, 1]                 # symmetrized
    assert p[1, 1] == 0.0                     # zero pairs -> defined as 0


def test_ml_score_beats_or_equals_any_fixed_p():
    rng = np.random.default_rng(3)
    g = random_graph(rng, n=6)
    labels = bl.Labeling(rng.integers(0, 2, 6), 2)
    stats = bl.block_stats(g, labels)
    best = bl.log_likelihood_given_p(stats, bl.max_likelihood_p(stats))
    for _ in range(50):
        p = rng.random((2, 2))
        p = np.triu(p) + np.triu(p, 1).T
        assert best >= bl.log_likelihood_given_p(stats, p) - 1e-12


def test_integrated_prior_shapes_shift_score():
    g = bl.make_graph(4, [(0, 1), (2, 3)], directed=False)
    labels = bl.Labeling(np.array([0, 0, 1, 1]), 2)
    stats = bl.block_stats(g, labels)
    flat = bl.integrated_log_likelihood(stats, bl.PriorConfig(1.0, 1.0))
    dense = bl.integrated_log_likelihood(stats, bl.PriorConfig(4.0, 1.0))
    assert flat != dense


def test_conditional_label_distribution_matches_enumeration(tiny_graph):
    prior = bl.PriorConfig()
    k = 2
    partial = bl.PartialLabeling()
    partial.add(0, 0)
    states, probs = enumerate_posterior(tiny_graph, partial, prior, k)
    for v in (1, 4):
        # exact conditional given every other node fixed to a specific state
        base = np.array([0, 0, 0, 1, 1, 1])
        labeling = bl.Labeling(base.copy(), k)
        stats = bl.block_stats(tiny_graph, labeling)
        cond = bl.conditional_label_distribution(tiny_graph, stats, labeling, v, prior)
        weights = []
        for c in range(k):
            trial = base.copy()
            trial[v] = c
            s = bl.block_stats(tiny_graph, bl.Labeling(trial, k))
            weights.append(bl.model_log_score(s, prior))
        weights = np.exp(np.array(weights) - max(weights))
        weights /= weights.sum()
        assert np.allclose(cond, weights, atol=1e-12)


def test_prior_config_validation():
    with pytest.raises(ValueError):
        bl.PriorConfig(0.0, 1.0)
    with pytest.raises(ValueError):
        bl.PriorConfig(1.0, 1.0, "bogus")
