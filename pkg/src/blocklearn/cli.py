"""Command-line entry points.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from .campaign import (CuratedOracle, exploration_order_stats, generate_sbm,
                       make_consistent_dataset, misfit_report, run_campaign)
from .dataio import (BUILTIN_DATASETS, DataError, DatasetBundle,
                     export_exploration_stats_csv, export_learning_curve_csv,
                     export_trajectory_json, load_edge_list, load_labels)
from .graph import GraphError, LabelingError
from .likelihood import PriorConfig
from .sampler import ChainConfig, run_chains
from .strategies import (STRATEGIES, average_agreement_scores, betweenness_scores,
                         degree_scores, mutual_information_scores)
from .graph import PartialLabeling


def _prior_options(f):
    f = click.option("--alpha", default=1.0, show_default=True,
                     help="beta-prior shape for edges present")(f)
    f = click.option("--beta", default=1.0, show_default=True,
                     help="beta-prior shape for edges absent")(f)
    f = click.option("--prior", "prior_mode", default="integrated", show_default=True,
                     type=click.Choice(["integrated", "ml"]))(f)
    return f


def _chain_options(f):
    f = click.option("--chains", default=100, show_default=True)(f)
    f = click.option("--steps", default=20_000, show_default=True)(f)
    f = click.option("--burn-in", default=10_000, show_default=True)(f)
    f = click.option("--workers", default=1, show_default=True)(f)
    return f


def _dataset_options(f):
    f = click.option("--edges", required=True, help="edge list file or builtin name")(f)
    f = click.option("--labels", "labels_path", default=None,
                     help="ground-truth label file (node class per line)")(f)
    f = click.option("--k", default=None, type=int,
                     help="number of classes (defaults to the label file's)")(f)
    f = click.option("--directed/--undirected", default=False, show_default=True)(f)
    f = click.option("--self-loops/--no-self-loops", "self_loops", default=None,
                     help="default: allowed iff directed")(f)
    return f


def _load_dataset(edges, labels_path, directed, self_loops) -> DatasetBundle:
    if edges in BUILTIN_DATASETS:
        return BUILTIN_DATASETS[edges]()
    graph = load_edge_list(edges, directed, self_loops)
    truth = class_names = None
    if labels_path:
        truth, class_names = load_labels(labels_path, graph)
    return DatasetBundle(graph, truth, class_names, name=str(edges))


def _resolve_k(k, bundle: DatasetBundle) -> int:
    if k is None:
        if bundle.truth is None:
            raise click.UsageError("--k is required without a label file")
        return bundle.truth.k
    return k


@click.group()
def cli():
    """Active learning for node classification via stochastic block models."""


@cli.command()
@_dataset_options
@_prior_options
@_chain_options
@click.option("--strategy", default="mi", show_default=True,
              type=click.Choice(list(STRATEGIES)))
@click.option("--runs", default=1, show_default=True, help="independent campaigns")
@click.option("--stages", default=None, type=int, help="queries per campaign (default n)")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, help="output prefix (writes <out>.json / <out>.csv)")
def run(edges, labels_path, k, directed, self_loops, alpha, beta, prior_mode,
        chains, steps, burn_in, workers, strategy, runs, stages, seed, out):
    """Run active-learning campaigns against a curated oracle."""
    bundle = _load_dataset(edges, labels_path, directed, self_loops)
    if bundle.truth is None:
        raise click.UsageError("run needs ground-truth labels (--labels or builtin)")
    k = _resolve_k(k, bundle)
    prior = PriorConfig(alpha, beta, prior_mode)
    cfg = ChainConfig(num_chains=chains, steps_per_chain=steps, burn_in=burn_in)
    stop = stages if stages is not None else bundle.graph.n
    oracle = CuratedOracle(bundle.truth)
    trajectories = []
    for r in range(runs):
        traj = run_campaign(bundle.graph, oracle, strategy, prior, cfg, stop=stop,
                            k=k, seed=seed + r, truth=bundle.truth, workers=workers)
        trajectories.append(traj)
        final = traj.records[-1].accuracy
        click.echo(f"run {r}: explored {len(traj.explored_nodes())} nodes, "
                   f"final acc@0.9 = {final['0.9']:.3f}" if final else f"run {r} done")
    if out:
        export_trajectory_json(trajectories[0], f"{out}.json")
        export_learning_curve_csv(trajectories, f"{out}.csv")
        if runs >= 2 and all(len(t.explored_nodes()) == bundle.graph.n
                             for t in trajectories):
            stats = exploration_order_stats(trajectories, bundle.graph.n)
            export_exploration_stats_csv(stats, f"{out}_order.csv")
        click.echo(f"wrote {out}.json and {out}.csv")


@cli.command()
@_dataset_options
@_prior_options
@_chain_options
@click.option("--strategy", default="mi", show_default=True,
              type=click.Choice(list(STRATEGIES)))
@click.option("--known", default=None,
              help="label file for already-explored nodes")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, help="write scores JSON here (default stdout)")
def score(edges, labels_path, k, directed, self_loops, alpha, beta, prior_mode,
          chains, steps, burn_in, workers, strategy, known, seed, out):
    """One-shot node scoring without querying."""
    bundle = _load_dataset(edges, labels_path, directed, self_loops)
    k = _resolve_k(k, bundle)
    partial = PartialLabeling()
    if known:
        known_labels, _ = _load_partial(known, bundle, k)
        partial = known_labels
    prior = PriorConfig(alpha, beta, prior_mode)
    cfg = ChainConfig(num_chains=chains, steps_per_chain=steps, burn_in=burn_in,
                      seed=seed)
    acc, pairs = run_chains(bundle.graph, partial, prior, cfg, k=k, workers=workers)
    if strategy == "mi":
        sv = mutual_information_scores(acc, k)
    elif strategy == "aa":
        sv = average_agreement_scores(pairs)
    elif strategy == "degree":
        sv = degree_scores(bundle.graph, partial)
    elif strategy == "betweenness":
        sv = betweenness_scores(bundle.graph, partial)
    else:
        raise click.UsageError("score does not apply to the random strategy")
    payload = {
        "strategy": strategy,
        "scores": {bundle.graph.name_of(v): (None if np.isnan(s) else float(s))
                   for v, s in enumerate(sv.scores)},
    }
    text = json.dumps(payload, indent=2)
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        click.echo(text)


def _load_partial(path, bundle: DatasetBundle, k: int) -> tuple[PartialLabeling, list]:
    labeling, names = load_labels_partial(path, bundle.graph, k)
    return labeling, names


def load_labels_partial(path, graph, k) -> tuple[PartialLabeling, list]:
    """Like load_labels but the file may cover a subset of nodes."""
    from .dataio import _tokens, resolve_data_path
    path = resolve_data_path(path)
    node_ids = {name: i for i, name in enumerate(graph.node_names or map(str, range(graph.n)))}
    classes: dict[str, int] = {}
    partial = PartialLabeling()
    for lineno, toks in _tokens(path):
        if len(toks) != 2:
            raise DataError(f"{path}:{lineno}: expected 'node class'")
        node, cls = toks
        if node not in node_ids:
            raise DataError(f"{path}:{lineno}: unknown node {node!r}")
        if cls not in classes:
            if len(classes) >= k:
                raise DataError(f"{path}:{lineno}: more than {k} classes")
            classes[cls] = len(classes)
        partial.add(node_ids[node], classes[cls])
    return partial, list(classes)


@cli.command()
@_dataset_options
@_prior_options
@click.option("--out", default=None, help="output prefix for the consistent labels")
def consistency(edges, labels_path, k, directed, self_loops, alpha, beta,
                prior_mode, out):
    """Iterate labels to a block-model fixed point and report misfits."""
    bundle = _load_dataset(edges, labels_path, directed, self_loops)
    if bundle.truth is None:
        raise click.UsageError("consistency needs --labels")
    prior = PriorConfig(alpha, beta, prior_mode)
    report = misfit_report(bundle.graph, bundle.truth, prior)
    click.echo(f"misfit nodes: {len(report)} of {bundle.graph.n}")
    for v, best, conf in report[:20]:
        name = bundle.class_names[best] if bundle.class_names else best
        click.echo(f"  {bundle.graph.name_of(v)}: most likely {name} (p={conf:.3f})")
    result = make_consistent_dataset(bundle.graph, bundle.truth, prior)
    click.echo(f"fixed point after {result.iterations} passes"
               + (" (oscillating)" if result.oscillating else ""))
    if out:
        with open(f"{out}_consistent.labels", "w") as f:
            for v in range(bundle.graph.n):
                lab = int(result.labeling.labels[v])
                name = bundle.class_names[lab] if bundle.class_names else str(lab)
                f.write(f"{bundle.graph.name_of(v)} {name}\n")
        click.echo(f"wrote {out}_consistent.labels")


@cli.command()
@click.option("--sizes", required=True, help="comma-separated group sizes, e.g. 15,15")
@click.option("--p-in", default=0.8, show_default=True)
@click.option("--p-out", default=0.05, show_default=True)
@click.option("--p", "p_matrix", default=None,
              help="full probability matrix, rows ';'-separated: '0.8,0.1;0.1,0.8'")
@click.option("--directed/--undirected", default=False, show_default=True)
@click.option("--self-loops/--no-self-loops", "self_loops", default=False, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, help="output prefix (.edges and .labels)")
def generate(sizes, p_in, p_out, p_matrix, directed, self_loops, seed, out):
    """Sample a synthetic planted-partition network."""
    group_sizes = [int(s) for s in sizes.split(",")]
    kk = len(group_sizes)
    if p_matrix:
        p = np.array([[float(x) for x in row.split(",")]
                      for row in p_matrix.split(";")])
    else:
        p = np.full((kk, kk), p_out)
        np.fill_diagonal(p, p_in)
    graph, labeling = generate_sbm(group_sizes, p, directed, self_loops, seed)
    with open(f"{out}.edges", "w") as f:
        for u, v in graph.edges:
            f.write(f"{u} {v}\n")
    with open(f"{out}.labels", "w") as f:
        for v in range(graph.n):
            f.write(f"{v} c{labeling.labels[v]}\n")
    click.echo(f"wrote {out}.edges ({graph.num_edges} edges) and {out}.labels")


@cli.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--dataset", "datasets", multiple=True,
              help="name=edges[:labels] dataset to serve (repeatable); "
                   "'karate' is always available")
@click.option("--directed/--undirected", default=False, show_default=True)
@_chain_options
@click.option("--state-dir", default=None, help="directory for session persistence")
def serve(port, host, datasets, directed, chains, steps, burn_in, workers, state_dir):
    """Start the interactive session service."""
    import uvicorn

    from .service import build_registry, create_app

    registry = build_registry(datasets, directed)
    cfg = ChainConfig(num_chains=chains, steps_per_chain=steps, burn_in=burn_in)
    app = create_app(registry, cfg, workers=workers, state_dir=state_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.exceptions.Abort:
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except (DataError, GraphError, LabelingError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
