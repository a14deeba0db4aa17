"""Gibbs engine: independent heat-bath chains, marginal accumulation,
agreement statistics, and equilibrium diagnostics.

Chains are embarrassingly parallel; per-chain accumulators are reduced in
chain order, so results are identical for any worker count given the seed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln

from . import _kernels
from .graph import BlockStats, Graph, Labeling, PartialLabeling, block_stats
from .likelihood import INTEGRATED, PriorConfig


@dataclass
class ChainConfig:
    num_chains: int = 100
    steps_per_chain: int = 20_000
    burn_in: int = 10_000
    seed: int = 0
    paired: bool = True          # collect agreement statistics for AA
    sweeps: bool = False         # reinterpret step counts as full sweeps
    aa_mode: str = "pooled"      # "pooled": all cross-chain pairs at matched
                                 # snapshot indices; "matched": disjoint chain
                                 # pairs compared at every post-burn-in step
    aa_snapshots: int = 200      # snapshots per chain in pooled mode

    def __post_init__(self):
        if self.num_chains < 1:
            raise ValueError("num_chains must be >= 1")
        if not 0 <= self.burn_in < self.steps_per_chain:
            raise ValueError("need 0 <= burn_in < steps_per_chain")
        if self.aa_mode not in ("pooled", "matched"):
            raise ValueError(f"unknown aa_mode {self.aa_mode!r}")
        if self.paired and self.aa_mode == "matched" and self.num_chains % 2:
            raise ValueError("matched pairing needs an even num_chains")
        if self.paired and self.aa_mode == "pooled" and self.num_chains < 2:
            raise ValueError("pooled pairing needs at least two chains")

    def effective_counts(self, num_free: int) -> tuple[int, int]:
        if self.sweeps:
            mult = max(1, num_free)
            return self.steps_per_chain * mult, self.burn_in * mult
        return self.steps_per_chain, self.burn_in


@dataclass
class MarginalAccumulator:
    """Averaged heat-bath conditionals and conditional entropies per node.

    mean_conditional_entropy holds <sum_i P_i ln P_i> (in [-ln k, 0]);
    explored nodes carry point masses with entropy 0 and visits 0.
    """

    mean_conditional: np.ndarray          # (n, k)
    mean_conditional_entropy: np.ndarray  # (n,)
    visits: np.ndarray                    # (n,) int64
    explored: np.ndarray                  # (n,) bool


@dataclass
class SamplePairStats:
    """AA numerator/denominator sums from paired posterior samples."""

    agree_count: np.ndarray   # (n,) pairs agreeing at v
    agree_sum: np.ndarray     # (n,) sum of |t1 n t2| over those pairs
    pairs_drawn: int
    explored: np.ndarray      # (n,) bool


def _score_tables(prior: PriorConfig, max_pairs: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lookup tables for the per-block score f(e,N) = t_e[e]+t_ne[N-e]-t_n[N]."""
    x = np.arange(max_pairs + 2, dtype=np.float64)
    if prior.mode == INTEGRATED:
        return (gammaln(x + prior.alpha), gammaln(x + prior.beta),
                gammaln(x + prior.alpha + prior.beta))
    with np.errstate(divide="ignore", invalid="ignore"):
        xlx = np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)
    return xlx, xlx, xlx


def _chain_seed(seed: int, chain_id: int, salt: int = 0) -> np.ndarray:
    ss = np.random.SeedSequence([np.uint32(seed & 0xFFFFFFFF), seed >> 32, chain_id, salt])
    return ss.generate_state(1, dtype=np.uint64)


def _initial_labeling(graph: Graph, partial: PartialLabeling, k: int,
                      seed: int, chain_id: int) -> np.ndarray:
    """Explored nodes at their known labels, the rest uniform at random."""
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([np.uint32(seed & 0xFFFFFFFF), seed >> 32, chain_id, 1])))
    labels = rng.integers(0, k, size=graph.n, dtype=np.int64)
    for v, lab in partial.explored:
        labels[v] = lab
    return labels


def _free_nodes(graph: Graph, partial: PartialLabeling) -> np.ndarray:
    return np.flatnonzero(~partial.explored_mask(graph.n)).astype(np.int64)


def _point_mass_accumulator(graph: Graph, partial: PartialLabeling, k: int) -> MarginalAccumulator:
    n = graph.n
    mean = np.full((n, k), 1.0 / k)
    for v, lab in partial.explored:
        mean[v] = 0.0
        mean[v, lab] = 1.0
    return MarginalAccumulator(mean, np.zeros(n), np.zeros(n, dtype=np.int64),
                               partial.explored_mask(n))


def run_chains(graph: Graph, partial: PartialLabeling, prior: PriorConfig,
               config: ChainConfig, k: int | None = None,
               workers: int = 1) -> tuple[MarginalAccumulator, SamplePairStats]:
    """Run the configured chains and merge their statistics.

    k is taken from the explored labels' range unless given explicitly
    (stage 0 has no explored labels, so pass it when partial is empty).
    """
    if k is None:
        if not len(partial):
            raise ValueError("k must be given when nothing is explored")
        k = max(lab for _, lab in partial.explored) + 1
    n = graph.n
    free = _free_nodes(graph, partial)
    explored_mask = partial.explored_mask(n)
    if len(free) == 0:
        acc = _point_mass_accumulator(graph, partial, k)
        return acc, SamplePairStats(np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64),
                                    0, explored_mask)

    steps, burn_in = config.effective_counts(len(free))
    tables = _score_tables(prior, n * n)
    nc = config.num_chains
    matched = config.paired and config.aa_mode == "matched"
    pooled = config.paired and config.aa_mode == "pooled"
    num_slots = nc // 2 if matched else nc
    cond = [np.zeros((n, k)) for _ in range(num_slots)]
    ents = [np.zeros(n) for _ in range(num_slots)]
    vis = [np.zeros(n, dtype=np.int64) for _ in range(num_slots)]
    agree_cnt = [np.zeros(n, dtype=np.int64) for _ in range(num_slots)]
    agree_sum = [np.zeros(n, dtype=np.int64) for _ in range(num_slots)]
    pair_counts = [0] * num_slots
    no_records = np.zeros(0, dtype=np.int64)
    empty_buf = np.zeros((0, n), dtype=np.int64)
    snaps = min(config.aa_snapshots, steps - burn_in) if pooled else 0
    snap_steps = (burn_in + (np.arange(snaps, dtype=np.int64) * (steps - burn_in)) // snaps
                  if snaps else no_records)
    recs = np.zeros((nc, snaps, n), dtype=np.int8) if pooled else None

    def init_chain(chain_id: int):
        labels = _initial_labeling(graph, partial, k, config.seed, chain_id)
        stats = block_stats(graph, Labeling(labels, k))
        return labels, stats.group_sizes, stats.edge_counts

    def run_slot(slot: int):
        if matched:
            c1, c2 = 2 * slot, 2 * slot + 1
            l1, n1, e1 = init_chain(c1)
            l2, n2, e2 = init_chain(c2)
            pair_counts[slot] = _kernels.run_pair(
                graph.out_indptr, graph.out_indices, graph.in_indptr, graph.in_indices,
                graph.directed, graph.allow_self_loops, *tables,
                l1, n1, e1, l2, n2, e2, free, steps, burn_in,
                _chain_seed(config.seed, c1), _chain_seed(config.seed, c2),
                cond[slot], ents[slot], vis[slot],
                agree_cnt[slot], agree_sum[slot])
        else:
            labels, nvec, emat = init_chain(slot)
            rec_buf = np.zeros((snaps, n), dtype=np.int64) if pooled else empty_buf
            _kernels.run_chain(
                graph.out_indptr, graph.out_indices, graph.in_indptr, graph.in_indices,
                graph.directed, graph.allow_self_loops, *tables,
                labels, nvec, emat, free, steps, burn_in,
                _chain_seed(config.seed, slot),
                cond[slot], ents[slot], vis[slot], snap_steps, rec_buf)
            if pooled:
                recs[slot] = rec_buf

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_slot, range(num_slots)))
    else:
        for slot in range(num_slots):
            run_slot(slot)

    # reduce in slot order for bitwise reproducibility
    cond_total = np.zeros((n, k))
    ent_total = np.zeros(n)
    vis_total = np.zeros(n, dtype=np.int64)
    for slot in range(num_slots):
        cond_total += cond[slot]
        ent_total += ents[slot]
        vis_total += vis[slot]
    mean = np.full((n, k), 1.0 / k)
    mean_ent = np.zeros(n)
    seen = vis_total > 0
    mean[seen] = cond_total[seen] / vis_total[seen, None]
    mean_ent[seen] = ent_total[seen] / vis_total[seen]
    for v, lab in partial.explored:
        mean[v] = 0.0
        mean[v, lab] = 1.0
        mean_ent[v] = 0.0
        vis_total[v] = 0
    acc = MarginalAccumulator(mean, mean_ent, vis_total, explored_mask)

    ac = np.zeros(n, dtype=np.int64)
    asum = np.zeros(n, dtype=np.int64)
    if pooled:
        total_pairs = int(_kernels.pooled_pair_stats(recs, ac, asum))
    else:
        for slot in range(num_slots):
            ac += agree_cnt[slot]
            asum += agree_sum[slot]
        total_pairs = sum(pair_counts)
    # agreement statistics are only meaningful at free nodes
    ac[explored_mask] = 0
    asum[explored_mask] = 0
    pairs = SamplePairStats(ac, asum, total_pairs, explored_mask)
    return acc, pairs


def equilibrium_check(graph: Graph, partial: PartialLabeling, prior: PriorConfig,
                      config: ChainConfig, k: int | None = None,
                      workers: int = 1) -> float:
    """Max marginal deviation between the schedule at T and 2T updates,
    run with fresh seeds. Large values indicate the chain has not mixed."""
    seed_a = int(np.random.SeedSequence([config.seed, 0xE1]).generate_state(1)[0])
    seed_b = int(np.random.SeedSequence([config.seed, 0xE2]).generate_state(1)[0])
    cfg_a = replace(config, seed=seed_a)
    cfg_b = replace(config, seed=seed_b,
                    steps_per_chain=2 * config.steps_per_chain,
                    burn_in=2 * config.burn_in)
    acc_a, _ = run_chains(graph, partial, prior, cfg_a, k=k, workers=workers)
    acc_b, _ = run_chains(graph, partial, prior, cfg_b, k=k, workers=workers)
    return float(np.abs(acc_a.mean_conditional - acc_b.mean_conditional).max())


def sample_labelings(graph: Graph, partial: PartialLabeling, prior: PriorConfig,
                     config: ChainConfig, m: int, k: int | None = None) -> list[Labeling]:
    """m thinned post-burn-in labelings spread evenly across chains."""
    if k is None:
        if not len(partial):
            raise ValueError("k must be given when nothing is explored")
        k = max(lab for _, lab in partial.explored) + 1
    if m == 0:
        return []
    free = _free_nodes(graph, partial)
    if len(free) == 0:
        labels = np.zeros(graph.n, dtype=np.int64)
        for v, lab in partial.explored:
            labels[v] = lab
        return [Labeling(labels.copy(), k) for _ in range(m)]

    steps, burn_in = config.effective_counts(len(free))
    span = steps - burn_in
    nc = config.num_chains
    if m > span * nc:
        raise ValueError("m exceeds post-burn-in capacity")
    base, extra = divmod(m, nc)
    tables = _score_tables(prior, graph.n * graph.n)
    out: list[Labeling] = []
    for chain_id in range(nc):
        cnt = base + (1 if chain_id < extra else 0)
        if cnt == 0:
            continue
        record_steps = burn_in + (np.arange(cnt, dtype=np.int64) * span) // cnt
        records = np.zeros((cnt, graph.n), dtype=np.int64)
        labels = _initial_labeling(graph, partial, k, config.seed, chain_id)
        stats = block_stats(graph, Labeling(labels, k))
        sink_c = np.zeros((graph.n, k))
        sink_e = np.zeros(graph.n)
        sink_v = np.zeros(graph.n, dtype=np.int64)
        _kernels.run_chain(
            graph.out_indptr, graph.out_indices, graph.in_indptr, graph.in_indices,
            graph.directed, graph.allow_self_loops, *tables,
            labels, stats.group_sizes, stats.edge_counts, free, steps, burn_in,
            _chain_seed(config.seed, chain_id),
            sink_c, sink_e, sink_v, record_steps, records)
        for row in records:
            out.append(Labeling(row.copy(), k))
    return out
