"""Active-learning campaigns: the stage loop, evaluation metrics,
consistency iteration, misfit reporting, and synthetic SBM generation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .graph import (Graph, Labeling, LabelingError, PartialLabeling, block_stats,
                    make_graph)
from .likelihood import PriorConfig, conditional_label_distribution
from .sampler import ChainConfig, MarginalAccumulator, SamplePairStats, run_chains
from .strategies import (ScoreVector, average_agreement_scores, betweenness_scores,
                         degree_scores, mutual_information_scores, select_next)

Q_THRESHOLDS = (0.1, 0.3, 0.5, 0.7, 0.9)


class Oracle:
    """Source of true labels. Answers must be stable and in range."""

    def reveal(self, node: int) -> int:
        raise NotImplementedError


class CuratedOracle(Oracle):
    """Oracle backed by a ground-truth labeling."""

    def __init__(self, truth: Labeling):
        self.truth = truth

    def reveal(self, node: int) -> int:
        return int(self.truth.labels[node])


@dataclass
class StageRecord:
    stage: int
    queried_node: int | None
    revealed_label: int | None
    strategy: str
    scores: list          # per-node, None where undefined
    marginals: list       # n x k
    accuracy: dict | None  # q -> fraction over unexplored nodes, given truth


@dataclass
class CampaignTrajectory:
    strategy: str
    seed: int
    config: dict
    records: list[StageRecord] = field(default_factory=list)

    def explored_nodes(self) -> list[int]:
        return [r.queried_node for r in self.records if r.queried_node is not None]

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "seed": self.seed,
            "config": self.config,
            "records": [
                {"stage": r.stage, "queried_node": r.queried_node,
                 "revealed_label": r.revealed_label, "strategy": r.strategy,
                 "scores": r.scores, "marginals": r.marginals,
                 "accuracy": r.accuracy}
                for r in self.records],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignTrajectory":
        traj = cls(strategy=d["strategy"], seed=d["seed"], config=d["config"])
        for r in d["records"]:
            traj.records.append(StageRecord(
                stage=r["stage"], queried_node=r["queried_node"],
                revealed_label=r["revealed_label"], strategy=r["strategy"],
                scores=r["scores"], marginals=r["marginals"],
                accuracy=r["accuracy"]))
        return traj


def accuracy_at_threshold(marginals: np.ndarray, truth: Labeling,
                          partial: PartialLabeling, q: float) -> float:
    """Fraction of unexplored nodes whose marginal on the true label is >= q.

    Defined as 1 when every node is explored.
    """
    if not 0 < q < 1:
        raise ValueError("q must be in (0, 1)")
    mask = ~partial.explored_mask(len(truth.labels))
    if not mask.any():
        return 1.0
    idx = np.flatnonzero(mask)
    hits = marginals[idx, truth.labels[idx]] >= q
    return float(hits.mean())


def _scores_to_list(sv: ScoreVector) -> list:
    return [None if np.isnan(s) else float(s) for s in sv.scores]


class Campaign:
    """Sequential active-learning state machine over one graph.

    Per-stage chain seeds and tie-break streams derive from (seed, stage),
    so trajectories are reproducible and resumable. `propose()` samples and
    suggests a node; `accept()` records a revealed label and advances.
    """

    def __init__(self, graph: Graph, k: int, strategy: str, prior: PriorConfig,
                 chain_config: ChainConfig, seed: int,
                 truth: Labeling | None = None,
                 partial: PartialLabeling | None = None, workers: int = 1):
        self.graph = graph
        self.k = k
        self.strategy = strategy
        self.prior = prior
        self.chain_config = chain_config
        self.seed = seed
        self.truth = truth
        self.partial = partial if partial is not None else PartialLabeling()
        self.workers = workers
        self.records: list[StageRecord] = []
        self._pending: tuple[int | None, ScoreVector, MarginalAccumulator] | None = None
        self._strategy_history: list[tuple[int, str]] = [(len(self.partial), strategy)]

    @property
    def stage(self) -> int:
        return len(self.partial)

    def config_fingerprint(self) -> dict:
        cc = self.chain_config
        return {
            "k": self.k,
            "n": self.graph.n,
            "directed": self.graph.directed,
            "self_loops": self.graph.allow_self_loops,
            "prior": {"alpha": self.prior.alpha, "beta": self.prior.beta,
                      "mode": self.prior.mode},
            "chains": {"num_chains": cc.num_chains, "steps": cc.steps_per_chain,
                       "burn_in": cc.burn_in, "paired": cc.paired,
                       "sweeps": cc.sweeps},
            "strategy_history": [list(h) for h in self._strategy_history],
        }

    def _stage_chain_config(self) -> ChainConfig:
        stage_seed = int(np.random.SeedSequence(
            [self.seed, self.stage]).generate_state(1)[0])
        return replace(self.chain_config, seed=stage_seed)

    def _stage_rng(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence([self.seed, self.stage, 7]))

    def sample(self) -> tuple[MarginalAccumulator, SamplePairStats]:
        return run_chains(self.graph, self.partial, self.prior,
                          self._stage_chain_config(), k=self.k,
                          workers=self.workers)

    def score(self, acc: MarginalAccumulator, pairs: SamplePairStats) -> ScoreVector:
        if self.strategy == "mi":
            return mutual_information_scores(acc, self.k)
        if self.strategy == "aa":
            return average_agreement_scores(pairs)
        if self.strategy == "degree":
            return degree_scores(self.graph, self.partial)
        if self.strategy == "betweenness":
            return betweenness_scores(self.graph, self.partial)
        if self.strategy == "random":
            explored = self.partial.explored_mask(self.graph.n)
            scores = np.where(explored, np.nan, 0.0)
            return ScoreVector(scores, "random", explored)
        raise ValueError(f"unknown strategy {self.strategy!r}")

    def propose(self) -> tuple[int | None, ScoreVector, MarginalAccumulator]:
        """Sample the posterior, score, and pick the next node to query.

        Returns (node, scores, accumulator); node is None when every node
        is already explored.
        """
        acc, pairs = self.sample()
        sv = self.score(acc, pairs)
        if self.stage >= self.graph.n:
            suggestion = None
        else:
            suggestion = select_next(sv, self._stage_rng())
        self._pending = (suggestion, sv, acc)
        return suggestion, sv, acc

    def _accuracy_curve(self, acc: MarginalAccumulator) -> dict | None:
        if self.truth is None:
            return None
        return {str(q): accuracy_at_threshold(acc.mean_conditional, self.truth,
                                              self.partial, q)
                for q in Q_THRESHOLDS}

    def accept(self, node: int | None, label: int | None) -> StageRecord:
        """Record the pending snapshot plus the revealed label; advance."""
        if self._pending is None:
            raise RuntimeError("accept() without a pending propose()")
        _, sv, acc = self._pending
        record = StageRecord(
            stage=self.stage, queried_node=None if node is None else int(node),
            revealed_label=None if label is None else int(label),
            strategy=self.strategy, scores=_scores_to_list(sv),
            marginals=[[float(x) for x in row] for row in acc.mean_conditional],
            accuracy=self._accuracy_curve(acc))
        self.records.append(record)
        if node is not None:
            if label is None or not 0 <= label < self.k:
                raise LabelingError(f"revealed label {label} out of range")
            self.partial.add(int(node), int(label))
        self._pending = None
        return record

    def set_strategy(self, strategy: str) -> None:
        self.strategy = strategy
        self._strategy_history.append((self.stage, strategy))
        self._pending = None

    def trajectory(self) -> CampaignTrajectory:
        return CampaignTrajectory(strategy=self.strategy, seed=self.seed,
                                  config=self.config_fingerprint(),
                                  records=list(self.records))


def run_campaign(graph: Graph, oracle: Oracle, strategy: str, prior: PriorConfig,
                 chain_config: ChainConfig, stop: int, k: int, seed: int = 0,
                 truth: Labeling | None = None,
                 workers: int = 1) -> CampaignTrajectory:
    """Stage loop: sample -> score -> select -> query the oracle -> record.

    `stop` is the number of queries; stop=0 still emits one stage-0
    snapshot record with scores and marginals but no query.
    """
    camp = Campaign(graph, k, strategy, prior, chain_config, seed,
                    truth=truth, workers=workers)
    if stop == 0:
        camp.propose()
        camp.accept(None, None)
        return camp.trajectory()
    while camp.stage < min(stop, graph.n):
        node, _, _ = camp.propose()
        camp.accept(node, oracle.reveal(node))
    return camp.trajectory()


def exploration_order_stats(trajectories: list[CampaignTrajectory],
                            n: int) -> list[tuple[int, float, float, float]]:
    """Per-node (node, median stage, 5th, 95th percentile) across runs.

    Nodes a run never explored take the sentinel stage n.
    """
    if len(trajectories) < 2:
        raise ValueError("need at least two trajectories")
    stages = np.full((len(trajectories), n), n, dtype=float)
    for r, traj in enumerate(trajectories):
        for rec in traj.records:
            if rec.queried_node is not None:
                stages[r, rec.queried_node] = rec.stage
    out = []
    for v in range(n):
        out.append((v, float(np.median(stages[:, v])),
                    float(np.percentile(stages[:, v], 5)),
                    float(np.percentile(stages[:, v], 95))))
    return out


@dataclass
class ConsistencyResult:
    labeling: Labeling
    iterations: int
    oscillating: bool = False


def make_consistent_dataset(graph: Graph, labels: Labeling,
                            prior: PriorConfig,
                            max_iterations: int = 200) -> ConsistencyResult:
    """Iterate synchronous argmax passes of the conditional distribution
    until the labeling is a fixed point of the block model's predictions.

    A detected 2-cycle returns early with the oscillation flag set.
    """
    current = labels.copy()
    previous: np.ndarray | None = None
    for iteration in range(1, max_iterations + 1):
        stats = block_stats(graph, current)
        new = np.empty(graph.n, dtype=np.int64)
        for v in range(graph.n):
            dist = conditional_label_distribution(graph, stats, current, v, prior)
            new[v] = int(np.argmax(dist))
        if np.array_equal(new, current.labels):
            return ConsistencyResult(current, iteration)
        if previous is not None and np.array_equal(new, previous):
            return ConsistencyResult(Labeling(new, labels.k), iteration,
                                     oscillating=True)
        previous = current.labels
        current = Labeling(new, labels.k)
    return ConsistencyResult(current, max_iterations, oscillating=True)


def misfit_report(graph: Graph, labels: Labeling,
                  prior: PriorConfig) -> list[tuple[int, int, float]]:
    """Nodes whose most likely label, given all other true labels, differs
    from their curated label: (node, argmax label, argmax probability)."""
    stats = block_stats(graph, labels)
    report = []
    for v in range(graph.n):
        dist = conditional_label_distribution(graph, stats, labels, v, prior)
        best = int(np.argmax(dist))
        if best != labels.labels[v]:
            report.append((v, best, float(dist[best])))
    return report


def generate_sbm(group_sizes, p: np.ndarray, directed: bool,
                 self_loops: bool, seed: int) -> tuple[Graph, Labeling]:
    """Planted-partition sample: each eligible pair edged independently
    with probability p[t(u), t(v)]."""
    p = np.asarray(p, dtype=float)
    if p.min() < 0 or p.max() > 1:
        raise ValueError("edge probabilities must be in [0, 1]")
    sizes = list(group_sizes)
    k = len(sizes)
    if p.shape != (k, k):
        raise ValueError(f"p must be {k}x{k}")
    n = sum(sizes)
    labels = np.repeat(np.arange(k, dtype=np.int64), sizes)
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(n):
        for v in range(n):
            if not directed and v < u:
                continue
            if u == v and not self_loops:
                continue
            if rng.random() < p[labels[u], labels[v]]:
                edges.append((u, v))
    graph = make_graph(n, edges, directed, self_loops)
    return graph, Labeling(labels, k)
