"""Graph representation, labelings, and block sufficient statistics.

Nodes are dense integers 0..n-1 internally; external string names live in a
side table on the Graph. Class labels are dense integers 0..k-1 internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GraphError(ValueError):
    """Malformed graph input (duplicate edge, bad self-loop, bad node id)."""


class LabelingError(ValueError):
    """Labeling inconsistent with the graph or with k."""


@dataclass
class Graph:
    """Simple directed or undirected graph with CSR adjacency both ways.

    Undirected edges are stored once in canonical (u <= v) order; the
    adjacency lists contain each neighbor once per incident edge. Immutable
    after construction (treat all arrays as read-only).
    """

    n: int
    directed: bool
    allow_self_loops: bool
    edges: np.ndarray            # (m, 2) int64, canonicalized when undirected
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray        # equals out_* for undirected graphs
    in_indices: np.ndarray
    node_names: list[str] | None = None

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[v]:self.out_indptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[v]:self.in_indptr[v + 1]]

    def neighbors(self, v: int) -> np.ndarray:
        """All neighbors of v (same as out_neighbors when undirected)."""
        if self.directed:
            return np.concatenate([self.out_neighbors(v), self.in_neighbors(v)])
        return self.out_neighbors(v)

    def degree(self, v: int) -> int:
        """Total degree: in+out for directed, edge count for undirected."""
        if self.directed:
            return len(self.out_neighbors(v)) + len(self.in_neighbors(v))
        return len(self.out_neighbors(v))

    def name_of(self, v: int) -> str:
        if self.node_names is not None:
            return self.node_names[v]
        return str(v)


def _build_csr(n: int, sources: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(sources, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, sources + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, targets[order].astype(np.int64)


def make_graph(
    n: int,
    edge_list,
    directed: bool,
    allow_self_loops: bool | None = None,
    node_names: list[str] | None = None,
) -> Graph:
    """Validate and build a Graph from an iterable of (u, v) pairs.

    Defaults: directed graphs allow self-loops, undirected graphs forbid
    them. Duplicate edges (including (v,u) after canonicalization in the
    undirected case) are rejected.
    """
    if allow_self_loops is None:
        allow_self_loops = directed
    edges = np.asarray(list(edge_list), dtype=np.int64).reshape(-1, 2)
    if len(edges) and (edges.min() < 0 or edges.max() >= n):
        raise GraphError(f"edge endpoint out of range 0..{n - 1}")
    if not directed and len(edges):
        edges = np.sort(edges, axis=1)
    if not allow_self_loops and len(edges) and np.any(edges[:, 0] == edges[:, 1]):
        bad = edges[edges[:, 0] == edges[:, 1]][0, 0]
        raise GraphError(f"self-loop at node {bad} but self-loops are forbidden")
    if len(edges):
        keys = edges[:, 0] * np.int64(n) + edges[:, 1]
        uniq, counts = np.unique(keys, return_counts=True)
        if np.any(counts > 1):
            u, v = divmod(int(uniq[np.argmax(counts > 1)]), n)
            raise GraphError(f"duplicate edge ({u}, {v})")
    out_indptr, out_indices = _build_csr(n, edges[:, 0], edges[:, 1]) if len(edges) else (
        np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))
    if directed:
        in_indptr, in_indices = _build_csr(n, edges[:, 1], edges[:, 0]) if len(edges) else (
            np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))
    else:
        # undirected adjacency: each edge appears in both endpoint lists,
        # self-loops (if allowed) once
        if len(edges):
            mask = edges[:, 0] != edges[:, 1]
            src = np.concatenate([edges[:, 0], edges[mask, 1]])
            dst = np.concatenate([edges[:, 1], edges[mask, 0]])
            out_indptr, out_indices = _build_csr(n, src, dst)
        in_indptr, in_indices = out_indptr, out_indices
    if node_names is not None and len(node_names) != n:
        raise GraphError("node_names length must equal n")
    return Graph(n=n, directed=directed, allow_self_loops=allow_self_loops,
                 edges=edges, out_indptr=out_indptr, out_indices=out_indices,
                 in_indptr=in_indptr, in_indices=in_indices, node_names=node_names)


@dataclass
class Labeling:
    """Total assignment of class labels 0..k-1 to all nodes."""

    labels: np.ndarray   # (n,) int64
    k: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.k):
            raise LabelingError(f"label out of range 0..{self.k - 1}")

    @property
    def n(self) -> int:
        return len(self.labels)

    def copy(self) -> "Labeling":
        return Labeling(self.labels.copy(), self.k)


@dataclass
class PartialLabeling:
    """Explored nodes with known labels, in exploration order. Stage = len."""

    explored: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        nodes = [v for v, _ in self.explored]
        if len(set(nodes)) != len(nodes):
            raise LabelingError("node explored twice")

    def __len__(self) -> int:
        return len(self.explored)

    @property
    def nodes(self) -> list[int]:
        return [v for v, _ in self.explored]

    def label_of(self, v: int) -> int | None:
        for u, lab in self.explored:
            if u == v:
                return lab
        return None

    def contains(self, v: int) -> bool:
        return any(u == v for u, _ in self.explored)

    def add(self, v: int, label: int) -> None:
        if self.contains(v):
            raise LabelingError(f"node {v} already explored")
        self.explored.append((int(v), int(label)))

    def explored_mask(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=bool)
        for v, _ in self.explored:
            mask[v] = True
        return mask

    def copy(self) -> "PartialLabeling":
        return PartialLabeling(list(self.explored))


@dataclass
class BlockStats:
    """Sufficient statistics of a labeling: group sizes and block edge counts.

    For undirected graphs edge_counts uses only the upper triangle (i <= j);
    the lower triangle is zero. pair_counts() gives the number of possible
    edge slots per block under the graph's conventions.
    """

    k: int
    directed: bool
    self_loops: bool
    group_sizes: np.ndarray    # (k,) int64
    edge_counts: np.ndarray    # (k, k) int64

    def pair_counts(self) -> np.ndarray:
        ns = self.group_sizes.astype(np.int64)
        npairs = np.outer(ns, ns)
        if self.directed:
            diag = ns * ns if self.self_loops else ns * (ns - 1)
        else:
            diag = ns * (ns + 1) // 2 if self.self_loops else ns * (ns - 1) // 2
            npairs = np.triu(npairs, 1)
        np.fill_diagonal(npairs, diag)
        return npairs

    def copy(self) -> "BlockStats":
        return BlockStats(self.k, self.directed, self.self_loops,
                          self.group_sizes.copy(), self.edge_counts.copy())


def block_stats(graph: Graph, labeling: Labeling) -> BlockStats:
    """Full recomputation of block statistics from scratch."""
    if labeling.n != graph.n:
        raise LabelingError("labeling length does not match graph")
    t = labeling.labels
    k = labeling.k
    sizes = np.bincount(t, minlength=k).astype(np.int64)
    e = np.zeros((k, k), dtype=np.int64)
    if graph.num_edges:
        src = t[graph.edges[:, 0]]
        dst = t[graph.edges[:, 1]]
        if not graph.directed:
            lo = np.minimum(src, dst)
            hi = np.maximum(src, dst)
            src, dst = lo, hi
        np.add.at(e, (src, dst), 1)
    return BlockStats(k=k, directed=graph.directed, self_loops=graph.allow_self_loops,
                      group_sizes=sizes, edge_counts=e)


def relabel_delta(stats: BlockStats, graph: Graph, labeling: Labeling,
                  v: int, new_label: int) -> BlockStats:
    """Stats after setting t(v) := new_label, in O(deg(v) + k).

    `stats` must be consistent with `labeling`; neither input is mutated.
    """
    if not 0 <= new_label < stats.k:
        raise LabelingError(f"label {new_label} out of range")
    old = int(labeling.labels[v])
    out = stats.copy()
    if new_label == old:
        return out
    t = labeling.labels
    sizes, e = out.group_sizes, out.edge_counts
    if graph.directed:
        self_loop = 0
        for u in graph.out_neighbors(v):
            if u == v:
                self_loop = 1
            else:
                e[old, t[u]] -= 1
                e[new_label, t[u]] += 1
        for u in graph.in_neighbors(v):
            if u != v:
                e[t[u], old] -= 1
                e[t[u], new_label] += 1
        if self_loop:
            e[old, old] -= 1
            e[new_label, new_label] += 1
    else:
        for u in graph.out_neighbors(v):
            if u == v:
                e[old, old] -= 1
                e[new_label, new_label] += 1
            else:
                j = t[u]
                e[min(old, j), max(old, j)] -= 1
                e[min(new_label, j), max(new_label, j)] += 1
    sizes[old] -= 1
    sizes[new_label] += 1
    return out


def unexplored_subgraph(graph: Graph, partial: PartialLabeling) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on unexplored nodes plus a map back to original ids."""
    mask = ~partial.explored_mask(graph.n)
    keep = np.flatnonzero(mask)
    remap = -np.ones(graph.n, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    edges = []
    for u, v in graph.edges:
        if mask[u] and mask[v]:
            edges.append((remap[u], remap[v]))
    names = [graph.name_of(v) for v in keep] if graph.node_names is not None else None
    sub = make_graph(len(keep), edges, graph.directed, graph.allow_self_loops, names)
    return sub, keep
