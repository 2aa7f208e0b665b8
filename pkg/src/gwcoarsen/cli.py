"""Command-line interface: ``gwcoarsen {coarsen,reduce,sweep,pairdist}``."""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .dataio import ParseError, fmt, load_dataset, load_edge_list, write_result
from .distort import pair_distortion_matrix
from .gpc import CoarsenResult, gpc, minimal_representative
from .kgpc import KMeansConfig, kgpc
from .netcore import MeasureNetwork, Partition, Representation, build_network, to_representation
from .coarsen import coarsen

SWEEP_HEADER = ["dataset", "graph_id", "n_nodes", "level", "method", "distortion", "runtime_ms"]


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def target_from_ratio(ratio: float, n: int) -> int:
    return max(2, round_half_up(ratio * n))


def parse_levels(text: str) -> list[float]:
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be LO:HI:STEP, got {text!r}") from None
    if step <= 0 or not 0 <= lo <= hi < 1:
        raise argparse.ArgumentTypeError("levels need 0 <= LO <= HI < 1 and STEP > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 10) for k in range(count)]


def prepare_network(net: MeasureNetwork, representation: str, measure: str | None) -> MeasureNetwork:
    """Apply the chosen matrix representation and node measure to an input graph."""
    A = net.weights
    S = to_representation(A, Representation(representation))
    if measure is None:
        mass = net.mass
    elif measure == "uniform":
        mass = None
    else:
        deg = A.sum(axis=1)
        if np.any(deg <= 0):
            raise ValueError("degree measure requires positive row sums")
        mass = deg
    return build_network(S, mass)


def identity_result(net: MeasureNetwork) -> CoarsenResult:
    part = Partition.identity(net.n)
    return CoarsenResult(coarsen(net, part), part, [], 0.0, [])


def run_method(net: MeasureNetwork, method: str, target: int, seed: int = 0, tol: float = 1e-12) -> CoarsenResult:
    if target >= net.n:
        return identity_result(net)
    if method == "gpc":
        return gpc(net, net.n - target, tol=tol)
    return kgpc(net, target, KMeansConfig(target, seed=seed))


def _coarsen(args) -> int:
    net = prepare_network(load_edge_list(args.input), args.representation, args.measure)
    target = args.target_size if args.target_size is not None else target_from_ratio(args.ratio, net.n)
    if not 1 <= target < net.n:
        raise ValueError(f"target size must lie in [1, {net.n - 1}], got {target}")
    if args.method == "kgpc" and target < 2:
        raise ValueError("kgpc needs a target size of at least 2")
    t0 = time.perf_counter()
    if args.method == "gpc":
        res = gpc(net, net.n - target, tol=args.tol)
    else:
        res = kgpc(net, target, KMeansConfig(target, seed=args.seed))
    elapsed = (time.perf_counter() - t0) * 1e3
    write_result(res, args.out)
    print(f"method={args.method} n={net.n} target={target} objective={fmt(res.objective)} "
          f"elapsed_ms={elapsed:.3f}")
    return 0


def _reduce(args) -> int:
    net = load_edge_list(args.input)
    res = minimal_representative(net, tol=args.tol)
    write_result(res, args.out)
    print(f"{net.n} -> {res.network.n}")
    return 0


def _pairdist(args) -> int:
    net = load_edge_list(args.input)
    H = pair_distortion_matrix(net).values
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in H:
            w.writerow([fmt(v) for v in row])
    return 0


def sweep_graph(task) -> list[tuple[float, float, float]]:
    """Coarsen one graph at every level; returns ``(level, distortion, runtime_ms)``."""
    net, method, levels, seed = task
    out = []
    for level in levels:
        target = target_from_ratio(1.0 - level, net.n)
        t0 = time.perf_counter()
        res = run_method(net, method, target, seed)
        out.append((level, res.distortion, (time.perf_counter() - t0) * 1e3))
    return out


def run_sweep(graphs, name: str, method: str, levels, seed: int = 0, jobs: int = 1,
              timing: bool = True) -> str:
    """Sweep coarsening levels over a dataset and return the CSV text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    usable = [(g, net) for g, net in enumerate(graphs) if net.n >= 3]
    tasks = [(net, method, levels, seed) for _, net in usable]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(sweep_graph, tasks))
    else:
        results = [sweep_graph(t) for t in tasks]
    by_graph = dict(zip((g for g, _ in usable), results))
    per_level: dict[float, list[tuple[float, float]]] = {lv: [] for lv in levels}
    for g, net in enumerate(graphs):
        if g not in by_graph:
            print(f"warning: graph {g} has {net.n} nodes (< 3), skipped", file=sys.stderr)
            w.writerow([name, g, net.n, "", method, "skipped", ""])
            continue
        for level, dist, ms in by_graph[g]:
            per_level[level].append((dist, ms))
            w.writerow([name, g, net.n, format(level, ".10g"), method, fmt(dist),
                        f"{ms:.3f}" if timing else "NA"])
    for level in levels:
        vals = per_level[level]
        if not vals:
            continue
        avg = math.fsum(d for d, _ in vals) / len(vals)
        ms = math.fsum(t for _, t in vals) / len(vals)
        w.writerow([name, "AVG", "", format(level, ".10g"), method, fmt(avg),
                    f"{ms:.3f}" if timing else "NA"])
    return buf.getvalue()


def _sweep(args) -> int:
    graphs = load_dataset(args.dataset, args.name)
    text = run_sweep(graphs, args.name, args.method, args.levels, args.seed, args.jobs,
                     timing=not args.no_timing)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gwcoarsen",
                                description="Gromov-Wasserstein graph coarsening.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coarsen", help="coarsen one graph with GPC or KGPC")
    c.add_argument("--input", required=True)
    c.add_argument("--method", choices=["gpc", "kgpc"], required=True)
    size = c.add_mutually_exclusive_group(required=True)
    size.add_argument("--target-size", type=int)
    size.add_argument("--ratio", type=float, help="target = max(2, round(ratio * N))")
    c.add_argument("--representation", default="adjacency",
                   choices=[r.value for r in Representation])
    c.add_argument("--measure", choices=["uniform", "degree"], default=None,
                   help="node measure; default: the input file's mass line, else uniform")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--out", default=".")
    c.set_defaults(func=_coarsen)

    r = sub.add_parser("reduce", help="reduce a graph to its minimal representative")
    r.add_argument("--input", required=True)
    r.add_argument("--tol", type=float, default=1e-9)
    r.add_argument("--out", default=".")
    r.set_defaults(func=_reduce)

    s = sub.add_parser("sweep", help="distortion versus coarsening level over a dataset")
    s.add_argument("--dataset", required=True)
    s.add_argument("--name", required=True)
    s.add_argument("--method", choices=["gpc", "kgpc"], required=True)
    s.add_argument("--levels", type=parse_levels, default=parse_levels("0.15:0.85:0.05"),
                   help="fractions of nodes removed, LO:HI:STEP")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--no-timing", action="store_true",
                   help="write NA for runtime_ms so repeated runs are byte-identical")
    s.add_argument("--out", default="-")
    s.set_defaults(func=_sweep)

    d = sub.add_parser("pairdist", help="export the pair-merge distortion matrix as CSV")
    d.add_argument("--input", required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=_pairdist)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "coarsen" and args.ratio is not None and not 0 < args.ratio <= 1:
        build_parser().error("--ratio must lie in (0, 1]")
    try:
        return args.func(args)
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
