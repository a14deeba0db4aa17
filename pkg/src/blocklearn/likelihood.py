"""Block-model likelihoods: parameterized, beta-integrated, and conditionals.

Everything is computed in log space with log-gamma; block pair counts can
reach ~2.4e5 so factorials are never formed directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .graph import BlockStats, Graph, Labeling, relabel_delta

INTEGRATED = "integrated"
MAX_LIKELIHOOD = "ml"


@dataclass
class PriorConfig:
    """Beta prior on block edge probabilities, or the ML point estimate."""

    alpha: float = 1.0
    beta: float = 1.0
    mode: str = INTEGRATED

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("beta-prior shapes must be positive")
        if self.mode not in (INTEGRATED, MAX_LIKELIHOOD):
            raise ValueError(f"unknown prior mode {self.mode!r}")


def _block_iter(stats: BlockStats):
    """Yield (e_ij, N_ij) over the blocks the likelihood product runs over:
    all ordered pairs when directed, i <= j when undirected."""
    npairs = stats.pair_counts()
    e = stats.edge_counts
    k = stats.k
    for i in range(k):
        for j in range(k):
            if not stats.directed and j < i:
                continue
            yield int(e[i, j]), int(npairs[i, j])


def log_likelihood_given_p(stats: BlockStats, p: np.ndarray) -> float:
    """Log of the Bernoulli product over blocks at fixed edge probabilities.

    Returns -inf when some p_ij contradicts the counts (p=0 with edges
    present, or p=1 with non-edges present).
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (stats.k, stats.k):
        raise ValueError(f"p must be {stats.k}x{stats.k}, got {p.shape}")
    total = 0.0
    npairs = stats.pair_counts()
    for i in range(stats.k):
        for j in range(stats.k):
            if not stats.directed and j < i:
                continue
            e, N = int(stats.edge_counts[i, j]), int(npairs[i, j])
            pij = p[i, j]
            if e > 0:
                if pij == 0.0:
                    return -np.inf
                total += e * np.log(pij)
            if N - e > 0:
                if pij == 1.0:
                    return -np.inf
                total += (N - e) * np.log1p(-pij)
    return total


def integrated_log_likelihood(stats: BlockStats, prior: PriorConfig) -> float:
    """Log likelihood with each block probability integrated over Beta(a, b).

    Per block: lnG(a+b) - lnG(a) - lnG(b)
               + lnG(e+a) + lnG(N-e+b) - lnG(N+a+b).
    With a = b = 1 this reduces to -ln((N+1) * C(N, e)).
    """
    a, b = prior.alpha, prior.beta
    const = gammaln(a + b) - gammaln(a) - gammaln(b)
    total = 0.0
    for e, N in _block_iter(stats):
        total += const + gammaln(e + a) + gammaln(N - e + b) - gammaln(N + a + b)
    return float(total)


def max_likelihood_p(stats: BlockStats) -> np.ndarray:
    """p_ij = e_ij / N_ij, with 0 where N_ij = 0. Symmetric when undirected."""
    npairs = stats.pair_counts().astype(float)
    e = stats.edge_counts.astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(npairs > 0, e / np.where(npairs > 0, npairs, 1.0), 0.0)
    if not stats.directed:
        p = p + np.triu(p, 1).T
    return p


def model_log_score(stats: BlockStats, prior: PriorConfig) -> float:
    """Unnormalized log Gibbs weight of the labeling behind `stats`."""
    if prior.mode == INTEGRATED:
        return integrated_log_likelihood(stats, prior)
    return log_likelihood_given_p(stats, max_likelihood_p(stats))


def conditional_label_distribution(graph: Graph, stats: BlockStats,
                                   labeling: Labeling, v: int,
                                   prior: PriorConfig) -> np.ndarray:
    """Heat-bath conditional over t(v) with all other labels fixed.

    Normalized after subtracting the max log score; inputs are not mutated.
    """
    k = stats.k
    log_w = np.empty(k)
    for c in range(k):
        trial = relabel_delta(stats, graph, labeling, v, c)
        log_w[c] = model_log_score(trial, prior)
    log_w -= log_w.max()
    w = np.exp(log_w)
    return w / w.sum()
