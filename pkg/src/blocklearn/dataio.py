"""Dataset loading and result serialization.

Edge lists are whitespace-separated "source target" lines; label files are
"node class" lines. `#` starts a comment. Node and class names map to dense
ids in first-appearance order, so loading is deterministic.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .campaign import CampaignTrajectory, Q_THRESHOLDS
from .graph import Graph, Labeling, make_graph

DATA_DIR_ENV = "BLOCKLEARN_DATA_DIR"


class DataError(ValueError):
    """Malformed or inconsistent input data (CLI exit code 2)."""


@dataclass
class DatasetBundle:
    graph: Graph
    truth: Labeling | None
    class_names: list[str] | None
    name: str = ""
    source: str = ""

    @property
    def k(self) -> int | None:
        return self.truth.k if self.truth is not None else None


def data_dir() -> Path | None:
    """Default directory for user-supplied datasets, from the environment."""
    d = os.environ.get(DATA_DIR_ENV)
    return Path(d) if d else None


def resolve_data_path(path: str | Path) -> Path:
    p = Path(path)
    if p.exists():
        return p
    base = data_dir()
    if base is not None and (base / p).exists():
        return base / p
    raise DataError(f"no such file: {path}")


def _tokens(path: Path):
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            yield lineno, line.split()


def load_edge_list(path: str | Path, directed: bool,
                   allow_self_loops: bool | None = None) -> Graph:
    """Parse an edge list; node names become dense ids in appearance order."""
    path = resolve_data_path(path)
    if allow_self_loops is None:
        allow_self_loops = directed
    ids: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, toks in _tokens(path):
        if len(toks) != 2:
            raise DataError(f"{path}:{lineno}: expected 'source target', got {len(toks)} tokens")
        u = ids.setdefault(toks[0], len(ids))
        v = ids.setdefault(toks[1], len(ids))
        if u == v and not allow_self_loops:
            raise DataError(f"{path}:{lineno}: self-loop at {toks[0]!r} is forbidden")
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            raise DataError(f"{path}:{lineno}: duplicate edge {toks[0]!r} -> {toks[1]!r}")
        seen.add(key)
        edges.append((u, v))
    names = [None] * len(ids)
    for name, i in ids.items():
        names[i] = name
    return make_graph(len(ids), edges, directed, allow_self_loops, names)


def load_labels(path: str | Path, graph: Graph,
                class_names: list[str] | None = None) -> tuple[Labeling, list[str]]:
    """Parse a "node class" file covering every node exactly once."""
    path = resolve_data_path(path)
    if graph.node_names is None:
        raise DataError("graph has no node name table")
    node_ids = {name: i for i, name in enumerate(graph.node_names)}
    classes: dict[str, int] = ({c: i for i, c in enumerate(class_names)}
                               if class_names else {})
    fixed_classes = class_names is not None
    labels = [-1] * graph.n
    for lineno, toks in _tokens(path):
        if len(toks) != 2:
            raise DataError(f"{path}:{lineno}: expected 'node class', got {len(toks)} tokens")
        node, cls = toks
        if node not in node_ids:
            raise DataError(f"{path}:{lineno}: unknown node {node!r}")
        v = node_ids[node]
        if labels[v] != -1:
            raise DataError(f"{path}:{lineno}: duplicate label for node {node!r}")
        if cls not in classes:
            if fixed_classes:
                raise DataError(f"{path}:{lineno}: unknown class {cls!r}")
            classes[cls] = len(classes)
        labels[v] = classes[cls]
    missing = [graph.node_names[v] for v, lab in enumerate(labels) if lab == -1]
    if missing:
        raise DataError(f"{path}: missing labels for {len(missing)} nodes "
                        f"(first: {missing[0]!r})")
    names = [None] * len(classes)
    for name, i in classes.items():
        names[i] = name
    return Labeling(labels, len(classes)), names


def _bundled(name: str) -> Path:
    return Path(str(resources.files("blocklearn").joinpath("data", name)))


def load_karate() -> DatasetBundle:
    """The bundled karate-club network: 34 members, two factions."""
    graph = load_edge_list(_bundled("karate.edges"), directed=False)
    truth, class_names = load_labels(_bundled("karate.labels"), graph)
    return DatasetBundle(graph, truth, class_names, name="karate",
                         source="Zachary (1977)")


BUILTIN_DATASETS = {"karate": load_karate}


def export_trajectory_json(trajectory: CampaignTrajectory, path: str | Path) -> None:
    with open(path, "w") as f:
        json.dump(trajectory.to_dict(), f)


def load_trajectory_json(path: str | Path) -> CampaignTrajectory:
    with open(resolve_data_path(path)) as f:
        return CampaignTrajectory.from_dict(json.load(f))


def export_learning_curve_csv(trajectories, path: str | Path) -> None:
    """Rows: stage, strategy, q, accuracy (only stages with truth curves)."""
    if isinstance(trajectories, CampaignTrajectory):
        trajectories = [trajectories]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["stage", "strategy", "q", "accuracy"])
        for traj in trajectories:
            for rec in traj.records:
                if rec.accuracy is None:
                    continue
                for q in Q_THRESHOLDS:
                    w.writerow([rec.stage, rec.strategy, q, rec.accuracy[str(q)]])


def export_exploration_stats_csv(stats, path: str | Path) -> None:
    """Rows: node, median_stage, p5, p95."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["node", "median_stage", "p5", "p95"])
        for node, median, p5, p95 in stats:
            w.writerow([node, median, p5, p95])
