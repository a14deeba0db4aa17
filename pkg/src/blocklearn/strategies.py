"""Per-node exploration scores (MI, AA, and baselines) and node selection."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, PartialLabeling, unexplored_subgraph
from .sampler import MarginalAccumulator, SamplePairStats

STRATEGIES = ("mi", "aa", "degree", "betweenness", "random")


@dataclass
class ScoreVector:
    """Scores over nodes; explored nodes carry NaN. `selectable` marks the
    nodes select_next may pick; `flagged` marks estimates that were missing
    (unvisited node for MI, no agreeing pairs for AA)."""

    scores: np.ndarray
    strategy: str
    explored: np.ndarray
    selectable: np.ndarray = field(default=None)
    flagged: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.selectable is None:
            self.selectable = ~self.explored & ~np.isnan(self.scores)
        if self.flagged is None:
            self.flagged = np.zeros(len(self.scores), dtype=bool)


def mutual_information_scores(acc: MarginalAccumulator, k: int) -> ScoreVector:
    """MI(v) = H(<P>) - <H(P)> = -sum <P_i> ln <P_i> + <sum P_i ln P_i>.

    Nodes never visited by any chain are flagged and scored ln k, the
    maximal uncertainty, which forces a visit.
    """
    n = len(acc.visits)
    scores = np.full(n, np.nan)
    flagged = np.zeros(n, dtype=bool)
    for v in range(n):
        if acc.explored[v]:
            continue
        if acc.visits[v] == 0:
            scores[v] = np.log(k)
            flagged[v] = True
            continue
        mean = acc.mean_conditional[v]
        with np.errstate(divide="ignore", invalid="ignore"):
            h = -np.sum(np.where(mean > 0, mean * np.log(np.where(mean > 0, mean, 1.0)), 0.0))
        scores[v] = max(0.0, h + acc.mean_conditional_entropy[v])
    return ScoreVector(scores, "mi", acc.explored.copy(),
                       selectable=~acc.explored, flagged=flagged)


def average_agreement_scores(pairs: SamplePairStats) -> ScoreVector:
    """AA(v) = mean agreement |t1 n t2| over sample pairs that agree at v.

    Nodes with no agreeing pairs get score 0, flagged, and are never
    selected over a node with a defined score.
    """
    n = len(pairs.agree_count)
    scores = np.full(n, np.nan)
    flagged = np.zeros(n, dtype=bool)
    selectable = np.zeros(n, dtype=bool)
    for v in range(n):
        if pairs.explored[v]:
            continue
        if pairs.agree_count[v] == 0:
            scores[v] = 0.0
            flagged[v] = True
        else:
            scores[v] = pairs.agree_sum[v] / pairs.agree_count[v]
            selectable[v] = True
    return ScoreVector(scores, "aa", pairs.explored.copy(),
                       selectable=selectable, flagged=flagged)


def degree_scores(graph: Graph, partial: PartialLabeling) -> ScoreVector:
    """Total degree within the induced subgraph of unexplored nodes."""
    sub, keep = unexplored_subgraph(graph, partial)
    scores = np.full(graph.n, np.nan)
    for i, v in enumerate(keep):
        scores[v] = sub.degree(i)
    explored = partial.explored_mask(graph.n)
    return ScoreVector(scores, "degree", explored, selectable=~explored)


def _brandes(graph: Graph) -> np.ndarray:
    """Unweighted shortest-path betweenness, endpoints excluded.

    Directed graphs count directed paths; undirected values are halved so
    each unordered pair contributes once.
    """
    n = graph.n
    bc = np.zeros(n)
    for s in range(n):
        dist = np.full(n, -1, dtype=np.int64)
        sigma = np.zeros(n)
        preds: list[list[int]] = [[] for _ in range(n)]
        order: list[int] = []
        dist[s] = 0
        sigma[s] = 1.0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in graph.out_neighbors(v):
                if w == v:
                    continue
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    if not graph.directed:
        bc /= 2.0
    return bc


def betweenness_scores(graph: Graph, partial: PartialLabeling) -> ScoreVector:
    """Shortest-path betweenness in the unexplored induced subgraph."""
    sub, keep = unexplored_subgraph(graph, partial)
    scores = np.full(graph.n, np.nan)
    if sub.n:
        scores[keep] = _brandes(sub)
    explored = partial.explored_mask(graph.n)
    return ScoreVector(scores, "betweenness", explored, selectable=~explored)


class EmptyFrontierError(RuntimeError):
    """select_next called with every node explored."""


def select_next(scores: ScoreVector, rng: np.random.Generator) -> int:
    """Argmax over selectable scores, ties broken uniformly at random.

    The random strategy ignores scores and draws uniformly from the
    unexplored nodes. If every unexplored node is flagged, falls back to
    the first unexplored node with a warning.
    """
    unexplored = np.flatnonzero(~scores.explored)
    if len(unexplored) == 0:
        raise EmptyFrontierError("all nodes are explored")
    if scores.strategy == "random":
        return int(rng.choice(unexplored))
    candidates = np.flatnonzero(scores.selectable & ~scores.explored)
    if len(candidates) == 0:
        warnings.warn("no defined scores among unexplored nodes; "
                      "falling back to the first unexplored node")
        return int(unexplored[0])
    vals = scores.scores[candidates]
    best = vals.max()
    ties = candidates[vals == best]
    return int(rng.choice(ties))
