"""Command-line pipeline: ingest edge lists, emit analysis files.

A run is described by a manifest — an INI-style file with one section per
network plus an optional ``[settings]`` section for shared knobs::

    [settings]
    policy = aggregate
    width = 10
    count = 6
    seed = 7

    [emails]
    path = data/emails.txt

    [calls]
    path = data/calls.txt
    policy = active

Per-network keys: ``path`` (required), ``policy``, ``width``, ``count``,
``origin``, ``sep``. Values in the manifest take precedence over
command-line flags, so a manifest fully determines a run; flags fill in
whatever the manifest leaves out. All outputs are written atomically and
deterministically: rerunning the same manifest reproduces every file
byte for byte.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .census import (
    GRAPHLET_CLASSES,
    compute_gdd,
    compute_orbit_frequencies,
    graphlet_class_frequencies,
    orbit_count,
)
from .graph_core import (
    EdgeListParseError,
    SnapshotPolicy,
    SnapshotSeries,
    StaticGraph,
    TemporalEdgeList,
    build_snapshots,
    final_aggregate_graph,
    parse_edge_list,
    snapshot_stats,
)
from .metrics import (
    AgreementConfig,
    MergeStep,
    SimilarityMatrix,
    gda_matrix,
    hierarchical_cluster,
    motif_distance_matrix,
    motif_scores_from_counts,
    ota_matrix,
)
from .nullmodel import RandomizationConfig, ensemble_frequencies
from .transitions import accumulate_series, discretize, row_normalize

STATS_HEADER = ("snapshot", "nodes", "edges", "avg_degree", "clustering", "cpl")


class CliError(Exception):
    """User-facing failure; message is printed without a traceback."""


# ---------------------------------------------------------------------------
# manifest handling


@dataclass(frozen=True)
class NetworkSpec:
    """One network's input file and snapshot configuration."""

    name: str
    path: Path
    policy_mode: str
    width: int | None
    count: int | None
    origin: int | None
    sep: str

    def snapshot_policy(self) -> SnapshotPolicy:
        if self.width is None or self.count is None:
            raise CliError(
                "snapshot width/count not configured; set 'width' and 'count' "
                "in the manifest"
            )
        return SnapshotPolicy(
            mode=self.policy_mode, width=self.width, count=self.count, origin=self.origin
        )

    def load_events(self) -> TemporalEdgeList:
        try:
            text = self.path.read_text()
        except OSError as e:
            raise CliError(f"cannot read {self.path}: {e}") from e
        try:
            return parse_edge_list(text, sep=self.sep)
        except EdgeListParseError as e:
            raise CliError(f"{self.path}: {e}") from e


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs: networks, knobs, output directory."""

    networks: tuple[NetworkSpec, ...]
    out_dir: Path
    threads: int
    k: int
    agreement: AgreementConfig
    randomization: RandomizationConfig
    linkage: str
    gda_include_k3: bool
    manifest_path: Path

    def network_summary(self) -> dict:
        return {
            net.name: {
                "path": str(net.path),
                "policy": net.policy_mode,
                "width": net.width,
                "count": net.count,
                "origin": net.origin,
                "sep": net.sep,
            }
            for net in self.networks
        }


def _get_int(section, key: str, context: str) -> int | None:
    raw = section.get(key)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"{context}: {key} = {raw!r} is not an integer") from None


def _get_bool(section, key: str, context: str) -> bool | None:
    raw = section.get(key)
    if raw is None:
        return None
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise CliError(f"{context}: {key} = {raw!r} is not a boolean")


def _get_choice(section, key: str, choices: tuple[str, ...], context: str) -> str | None:
    raw = section.get(key)
    if raw is None:
        return None
    if raw not in choices:
        raise CliError(f"{context}: {key} must be one of {choices}, got {raw!r}")
    return raw


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the manifest with command-line flags (manifest wins)."""
    manifest_path = Path(args.manifest)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(manifest_path) as fh:
            parser.read_file(fh)
    except OSError as e:
        raise CliError(f"cannot read manifest {manifest_path}: {e}") from e
    except configparser.Error as e:
        raise CliError(f"manifest {manifest_path}: {e}") from e

    settings = parser["settings"] if parser.has_section("settings") else {}
    ctx = f"manifest {manifest_path} [settings]"

    networks = []
    for name in parser.sections():
        if name == "settings":
            continue
        section = parser[name]
        nctx = f"manifest {manifest_path} [{name}]"
        if "path" not in section:
            raise CliError(f"{nctx}: missing required key 'path'")
        path = Path(section["path"])
        if not path.is_absolute():
            path = manifest_path.parent / path
        if not path.exists():
            raise CliError(f"{nctx}: input file {path} does not exist")
        policy_mode = (
            _get_choice(section, "policy", ("active", "aggregate"), nctx)
            or _get_choice(settings, "policy", ("active", "aggregate"), ctx)
            or args.policy
        )
        sep = (
            _get_choice(section, "sep", ("ws", "comma"), nctx)
            or _get_choice(settings, "sep", ("ws", "comma"), ctx)
            or args.sep
        )
        width = _get_int(section, "width", nctx)
        if width is None:
            width = _get_int(settings, "width", ctx)
        if width is None:
            width = args.width
        count = _get_int(section, "count", nctx)
        if count is None:
            count = _get_int(settings, "count", ctx)
        if count is None:
            count = args.count
        origin = _get_int(section, "origin", nctx)
        if origin is None:
            origin = _get_int(settings, "origin", ctx)
        networks.append(
            NetworkSpec(
                name=name,
                path=path,
                policy_mode=policy_mode,
                width=width,
                count=count,
                origin=origin,
                sep=sep,
            )
        )
    if not networks:
        raise CliError(f"manifest {manifest_path} defines no networks")

    seed = _get_int(settings, "seed", ctx)
    if seed is None:
        seed = args.seed
    agreement = AgreementConfig(
        ota_scaling=_get_choice(settings, "ota_scaling", ("normalized", "per_orbit"), ctx)
        or getattr(args, "ota_scaling", None)
        or "normalized",
        use_relative_rescale=_first_not_none(
            _get_bool(settings, "relative_rescale", ctx),
            (not args.no_relative_rescale) if hasattr(args, "no_relative_rescale") else None,
            True,
        ),
        gdd_scaling=_get_choice(settings, "gdd_scaling", ("inverse_k", "plain"), ctx)
        or getattr(args, "gdd_scaling", None)
        or "inverse_k",
    )
    randomization = RandomizationConfig(
        replicates=_first_not_none(
            _get_int(settings, "replicates", ctx), getattr(args, "replicates", None), 100
        ),
        swaps_per_edge=_first_not_none(
            _get_int(settings, "swaps_per_edge", ctx),
            getattr(args, "swaps_per_edge", None),
            10,
        ),
        seed=seed,
    )
    k = _first_not_none(_get_int(settings, "k", ctx), getattr(args, "k", None), 4)
    if k not in (3, 4):
        raise CliError(f"subgraph size k must be 3 or 4, got {k}")
    out_value = settings.get("out") if settings else None
    out_dir = Path(out_value) if out_value else Path(args.out)
    linkage = (
        _get_choice(settings, "linkage", ("average", "single", "complete"), ctx)
        or getattr(args, "linkage", None)
        or "average"
    )
    return RunConfig(
        networks=tuple(networks),
        out_dir=out_dir,
        threads=max(1, args.threads),
        k=k,
        agreement=agreement,
        randomization=randomization,
        linkage=linkage,
        gda_include_k3=bool(getattr(args, "gda_include_k3", False)),
        manifest_path=manifest_path,
    )


def _first_not_none(*values):
    for v in values:
        if v is not None:
            return v
    return None


# ---------------------------------------------------------------------------
# output helpers


def fmt(value) -> str:
    """Render one CSV cell: ints verbatim, floats with 12 significant digits."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def write_atomic(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data)
    os.replace(tmp, path)


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])
    write_atomic(path, buf.getvalue())


def write_json(path: Path, obj) -> None:
    write_atomic(path, json.dumps(obj, indent=2) + "\n")


def _file_stem(name: str) -> str:
    return name.replace(os.sep, "_").replace("/", "_")


def write_orbit_matrix_csv(path: Path, values) -> None:
    m = len(values)
    header = ["orbit"] + [str(b + 1) for b in range(m)]
    write_csv(path, header, ([a + 1, *row] for a, row in enumerate(values)))


# ---------------------------------------------------------------------------
# per-network pipelines


def _network_series(net: NetworkSpec) -> tuple[TemporalEdgeList, SnapshotSeries]:
    events = net.load_events()
    series = build_snapshots(events, net.snapshot_policy())
    return events, series


def run_per_network(run: RunConfig, worker: Callable[[NetworkSpec], object]) -> tuple[dict, list[str]]:
    """Apply ``worker`` to each network, isolating per-network failures.

    Returns (results by network name, error messages). Workers only
    touch files named after their own network, so thread-parallel
    execution cannot interleave outputs.
    """

    def safe(net: NetworkSpec):
        try:
            return net.name, worker(net), None
        except (CliError, ValueError, OSError) as e:
            return net.name, None, f"network {net.name!r}: {e}"

    if run.threads > 1:
        with ThreadPoolExecutor(max_workers=run.threads) as pool:
            outcomes = list(pool.map(safe, run.networks))
    else:
        outcomes = [safe(net) for net in run.networks]
    results = {name: value for name, value, err in outcomes if err is None}
    errors = [err for _name, _value, err in outcomes if err]
    return results, errors


def _report_errors(errors: list[str]) -> int:
    for msg in errors:
        print(f"error: {msg}", file=sys.stderr)
    return 1 if errors else 0


# ---------------------------------------------------------------------------
# subcommands


def cmd_stats(args: argparse.Namespace) -> int:
    run = load_run_config(args)

    def worker(net: NetworkSpec):
        _events, series = _network_series(net)
        rows = snapshot_stats(series)
        table = [[r[col] for col in STATS_HEADER] for r in rows]
        write_csv(run.out_dir / f"{_file_stem(net.name)}.stats.csv", STATS_HEADER, table)
        return table

    results, errors = run_per_network(run, worker)
    combined = [
        [net.name, *row] for net in run.networks if net.name in results for row in results[net.name]
    ]
    if results:
        write_csv(run.out_dir / "stats.csv", ("network", *STATS_HEADER), combined)
    return _report_errors(errors)


def _census_bundle(run: RunConfig, stem: str, tag: str, g: StaticGraph, labels) -> None:
    fr = compute_orbit_frequencies(g, run.k)
    gdd = compute_gdd(fr, scaling=run.agreement.gdd_scaling)
    classes = graphlet_class_frequencies(g, run.k)
    header = ["node"] + [f"orbit_{j + 1}" for j in range(fr.m)]
    write_csv(
        run.out_dir / f"{stem}.{tag}.fr.csv",
        header,
        ([labels[v], *fr.counts[v]] for v in range(fr.n)),
    )
    write_csv(
        run.out_dir / f"{stem}.{tag}.classes.csv",
        ("class", "count"),
        classes.items(),
    )
    write_json(
        run.out_dir / f"{stem}.{tag}.gdd.json",
        {
            "k": gdd.k,
            "scaling": gdd.scaling,
            "orbits": {
                str(j + 1): {
                    "raw": {str(d): c for d, c in sorted(gdd.raw[j].items())},
                    "normalized": {
                        str(d): v for d, v in sorted(gdd.normalized[j].items())
                    },
                }
                for j in range(len(gdd.raw))
            },
            "untouched_orbits": list(gdd.untouched),
        },
    )


def cmd_census(args: argparse.Namespace) -> int:
    run = load_run_config(args)

    def worker(net: NetworkSpec):
        events, series = _network_series(net)
        stem = _file_stem(net.name)
        for i, snap in enumerate(series.snapshots):
            _census_bundle(run, stem, f"snap{i}", snap, events.labels)
        _census_bundle(run, stem, "final", final_aggregate_graph(events), events.labels)

    _results, errors = run_per_network(run, worker)
    return _report_errors(errors)


def cmd_transitions(args: argparse.Namespace) -> int:
    run = load_run_config(args)

    def worker(net: NetworkSpec):
        _events, series = _network_series(net)
        t = accumulate_series(series, run.k)
        nt = row_normalize(t)
        fp = discretize(nt)
        stem = _file_stem(net.name)
        write_orbit_matrix_csv(run.out_dir / f"{stem}.transitions.csv", t.counts)
        write_orbit_matrix_csv(run.out_dir / f"{stem}.transitions_normalized.csv", nt.values)
        write_orbit_matrix_csv(run.out_dir / f"{stem}.fingerprint.csv", fp.labels)
        write_json(
            run.out_dir / f"{stem}.transitions.json",
            {
                "k": t.k,
                "pairs_processed": t.pairs_processed,
                "counts": t.counts.tolist(),
                "normalized": nt.values.tolist(),
                "fingerprint": [list(row) for row in fp.labels],
                "dissolved": {str(a + 1): int(c) for a, c in enumerate(t.dissolved)},
                "total_node_transitions": t.total_node_transitions(),
            },
        )

    _results, errors = run_per_network(run, worker)
    return _report_errors(errors)


def cmd_motifs(args: argparse.Namespace) -> int:
    run = load_run_config(args)
    order = [c.name for c in GRAPHLET_CLASSES[4]]

    def worker(net: NetworkSpec):
        events = net.load_events()
        g = final_aggregate_graph(events)
        real = graphlet_class_frequencies(g, 4)
        means = ensemble_frequencies(g, run.randomization, 4)
        fp = motif_scores_from_counts(
            [real[name] for name in order], [means[name] for name in order], 4
        )
        stem = _file_stem(net.name)
        write_csv(
            run.out_dir / f"{stem}.motifs.csv",
            ("class", "real_count", "ensemble_mean", "delta"),
            (
                [name, real[name], means[name], fp.scores[i]]
                for i, name in enumerate(order)
            ),
        )
        return fp

    _results, errors = run_per_network(run, worker)
    if not errors:
        write_json(
            run.out_dir / "motifs.meta.json",
            {
                "tool_version": __version__,
                "replicates": run.randomization.replicates,
                "swaps_per_edge": run.randomization.swaps_per_edge,
                "seed": run.randomization.seed,
                "networks": run.network_summary(),
            },
        )
    return _report_errors(errors)


def _similarity_csv_rows(sim: SimilarityMatrix):
    for i, name in enumerate(sim.names):
        yield [name, *sim.values[i]]


def _tree_json(merges: list[MergeStep]) -> list[dict]:
    return [
        {"left": list(s.left), "right": list(s.right), "height": s.height} for s in merges
    ]


def cmd_compare(args: argparse.Namespace) -> int:
    run = load_run_config(args)
    if len(run.networks) < 2:
        raise CliError("compare needs at least 2 networks in the manifest")
    names = [net.name for net in run.networks]
    metric = args.metric

    def transition_worker(net: NetworkSpec):
        _events, series = _network_series(net)
        return accumulate_series(series, 4)

    def gdd_worker(net: NetworkSpec):
        events = net.load_events()
        g = final_aggregate_graph(events)
        bundles = [compute_gdd(compute_orbit_frequencies(g, 4), run.agreement.gdd_scaling)]
        if run.gda_include_k3:
            bundles.append(compute_gdd(compute_orbit_frequencies(g, 3), run.agreement.gdd_scaling))
        return bundles

    def motif_worker(net: NetworkSpec):
        events = net.load_events()
        g = final_aggregate_graph(events)
        order = [c.name for c in GRAPHLET_CLASSES[4]]
        real = graphlet_class_frequencies(g, 4)
        means = ensemble_frequencies(g, run.randomization, 4)
        return motif_scores_from_counts(
            [real[name] for name in order], [means[name] for name in order], 4
        )

    workers = {"ota": transition_worker, "gda": gdd_worker, "motif": motif_worker}
    results, errors = run_per_network(run, workers[metric])
    if errors:
        # a pairwise comparison cannot proceed with missing networks
        _report_errors(errors)
        return 1

    ordered = [results[name] for name in names]
    if metric == "ota":
        sim = ota_matrix(names, ordered, run.agreement)
    elif metric == "gda":
        sim = gda_matrix(names, ordered)
    else:
        sim = motif_distance_matrix(names, ordered)
    merges = hierarchical_cluster(sim, linkage=run.linkage)

    write_csv(
        run.out_dir / f"compare_{metric}.csv",
        ["network", *sim.names],
        _similarity_csv_rows(sim),
    )
    write_json(run.out_dir / f"compare_{metric}.tree.json", _tree_json(merges))
    write_json(
        run.out_dir / f"compare_{metric}.meta.json",
        {
            "tool_version": __version__,
            "metric": metric,
            "kind": sim.kind,
            "linkage": run.linkage,
            "k": 4,
            "ota_scaling": run.agreement.ota_scaling,
            "relative_rescale": run.agreement.use_relative_rescale,
            "gdd_scaling": run.agreement.gdd_scaling,
            "gda_include_k3": run.gda_include_k3,
            "replicates": run.randomization.replicates,
            "swaps_per_edge": run.randomization.swaps_per_edge,
            "seed": run.randomization.seed,
            "networks": run.network_summary(),
        },
    )
    return 0


def read_similarity_csv(path: Path, kind: str) -> SimilarityMatrix:
    """Load a similarity/distance matrix written by ``compare``."""
    try:
        text = path.read_text()
    except OSError as e:
        raise CliError(f"cannot read matrix {path}: {e}") from e
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or len(rows[0]) < 3:
        raise CliError(f"{path}: expected a header row with at least 2 network names")
    names = tuple(rows[0][1:])
    if len(rows) != len(names) + 1:
        raise CliError(f"{path}: matrix has {len(rows) - 1} rows for {len(names)} names")
    values = np.zeros((len(names), len(names)))
    for i, row in enumerate(rows[1:]):
        if row[0] != names[i]:
            raise CliError(f"{path}: row {i + 1} is {row[0]!r}, expected {names[i]!r}")
        try:
            values[i] = [float(x) for x in row[1:]]
        except ValueError as e:
            raise CliError(f"{path}: row {names[i]!r}: {e}") from None
    return SimilarityMatrix(names=names, values=values, kind=kind)


def cmd_cluster(args: argparse.Namespace) -> int:
    kind = "MotifDistance" if args.matrix_kind == "distance" else "OTA"
    sim = read_similarity_csv(Path(args.matrix), kind)
    merges = hierarchical_cluster(sim, linkage=args.linkage)
    out = Path(args.out) / "cluster.tree.json"
    write_json(out, _tree_json(merges))
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitrans",
        description="Temporal-network analysis via graphlet-orbit transitions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", required=False, help="run manifest (INI format)")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--threads", type=int, default=1, help="parallel networks (default: 1)")
    common.add_argument("--seed", type=int, default=0, help="base RNG seed (default: 0)")
    common.add_argument(
        "--policy",
        choices=("active", "aggregate"),
        default="aggregate",
        help="default snapshot semantics when the manifest is silent",
    )
    common.add_argument("--width", type=int, help="default snapshot width (time units)")
    common.add_argument("--count", type=int, help="default snapshot count")
    common.add_argument(
        "--sep", choices=("ws", "comma"), default="ws", help="edge list field separator"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common], help="per-snapshot summary metrics")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("census", parents=[common], help="orbit frequencies, classes, GDDs")
    p.add_argument("--k", type=int, choices=(3, 4), help="subgraph size (default 4)")
    p.add_argument("--gdd-scaling", choices=("inverse_k", "plain"), dest="gdd_scaling")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("transitions", parents=[common], help="orbit-transition matrices")
    p.add_argument("--k", type=int, choices=(3, 4), help="subgraph size (default 4)")
    p.set_defaults(func=cmd_transitions)

    p = sub.add_parser("motifs", parents=[common], help="motif scores vs random ensemble")
    p.add_argument("--replicates", type=int, help="ensemble size (default 100)")
    p.add_argument("--swaps-per-edge", type=int, dest="swaps_per_edge",
                   help="attempted swaps per edge (default 10)")
    p.set_defaults(func=cmd_motifs)

    p = sub.add_parser("compare", parents=[common], help="pairwise network comparison")
    p.add_argument("--metric", choices=("ota", "gda", "motif"), default="ota")
    p.add_argument("--ota-scaling", choices=("normalized", "per_orbit"), dest="ota_scaling")
    p.add_argument("--no-relative-rescale", action="store_true",
                   help="skip per-cell min/max rescaling across the set")
    p.add_argument("--gdd-scaling", choices=("inverse_k", "plain"), dest="gdd_scaling")
    p.add_argument("--gda-include-k3", action="store_true",
                   help="pool 3-node orbits into the GDA average")
    p.add_argument("--linkage", choices=("average", "single", "complete"))
    p.add_argument("--replicates", type=int, help="motif ensemble size (default 100)")
    p.add_argument("--swaps-per-edge", type=int, dest="swaps_per_edge")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("cluster", parents=[common], help="merge tree from a matrix CSV")
    p.add_argument("--matrix", required=True, help="similarity/distance CSV from compare")
    p.add_argument("--matrix-kind", choices=("agreement", "distance"), default="agreement")
    p.add_argument("--linkage", choices=("average", "single", "complete"), default="average")
    p.set_defaults(func=cmd_cluster)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "cluster" and not args.manifest:
        parser.error(f"{args.command} requires --manifest")
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
