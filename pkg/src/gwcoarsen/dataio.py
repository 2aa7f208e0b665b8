"""Reading graphs and datasets, writing coarsening results.

Edge-list format::

    # comment
    N E directed|undirected
    i j w            (E lines, 0-based node indices)
    mass m_0 ... m_{N-1}   (optional, last line)

TUDataset format: ``{name}_A.txt`` with comma-separated 1-based edge pairs,
``{name}_graph_indicator.txt`` with one graph id per node, and optionally
``{name}_graph_labels.txt``.
"""

from __future__ import annotations

import io
import math
import os
from pathlib import Path

import numpy as np

from .netcore import MeasureNetwork, build_network


class ParseError(ValueError):
    """Malformed input; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        where = ""
        if source is not None:
            where += f"{source}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)
        self.message = message
        self.lineno = lineno
        self.source = source


def fmt(x: float) -> str:
    """Lossless decimal text for a float (17 significant digits)."""
    return format(float(x), ".17g")


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", lineno) from None


def _float(tok: str, lineno: int, what: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"expected number {what}, got {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise ParseError(f"{what} must be finite, got {tok!r}", lineno)
    return v


def read_edge_list(stream) -> MeasureNetwork:
    """Parse an edge-list stream (or string) into a network."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    lines = [
        (k, line.strip())
        for k, line in enumerate(stream, start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise ParseError("empty input: missing header line")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 3:
        raise ParseError("header must be 'N E directed|undirected'", lineno)
    n = _int(parts[0], lineno, "node count")
    e = _int(parts[1], lineno, "edge count")
    kind = parts[2]
    if n < 1:
        raise ParseError("node count must be positive", lineno)
    if e < 0:
        raise ParseError("edge count must be nonnegative", lineno)
    if kind not in ("directed", "undirected"):
        raise ParseError(f"expected 'directed' or 'undirected', got {kind!r}", lineno)
    directed = kind == "directed"

    body = lines[1:]
    mass = None
    if body and body[-1][1].split()[0] == "mass":
        lineno, text = body.pop()
        toks = text.split()[1:]
        if len(toks) != n:
            raise ParseError(f"mass line has {len(toks)} entries, expected {n}", lineno)
        mass = [_float(t, lineno, "mass") for t in toks]
        if any(m <= 0 for m in mass):
            raise ParseError("mass entries must be positive", lineno)
    for lineno, text in body:
        if text.split()[0] == "mass":
            raise ParseError("mass line must be the last line", lineno)
    if len(body) != e:
        where = body[e][0] if len(body) > e else (lines[-1][0])
        raise ParseError(f"header declares {e} edges but found {len(body)}", where)

    S = np.zeros((n, n))
    seen: dict[tuple[int, int], float] = {}
    for lineno, text in body:
        toks = text.split()
        if len(toks) != 3:
            raise ParseError("edge line must be 'i j w'", lineno)
        i = _int(toks[0], lineno, "node index")
        j = _int(toks[1], lineno, "node index")
        w = _float(toks[2], lineno, "weight")
        for v in (i, j):
            if not 0 <= v < n:
                raise ParseError(f"node index {v} out of range [0, {n})", lineno)
        key = (i, j) if directed else (min(i, j), max(i, j))
        if key in seen and seen[key] != w:
            raise ParseError(f"edge {key} repeated with conflicting weight", lineno)
        seen[key] = w
        S[i, j] = w
        if not directed:
            S[j, i] = w
    return build_network(S, mass)


def load_edge_list(path) -> MeasureNetwork:
    path = Path(path)
    try:
        with open(path) as fh:
            return read_edge_list(fh)
    except ParseError as exc:
        raise ParseError(exc.message, exc.lineno, str(path)) from None


def write_edge_list(net: MeasureNetwork, stream) -> None:
    """Write ``net`` in edge-list format, including its mass line."""
    S = net.weights
    symmetric = bool(np.array_equal(S, S.T))
    if symmetric:
        iu, ju = np.nonzero(np.triu(S != 0))
    else:
        iu, ju = np.nonzero(S != 0)
    kind = "undirected" if symmetric else "directed"
    stream.write(f"{net.n} {iu.size} {kind}\n")
    for i, j in zip(iu, ju):
        stream.write(f"{i} {j} {fmt(S[i, j])}\n")
    stream.write("mass " + " ".join(fmt(m) for m in net.mass) + "\n")


def save_edge_list(net: MeasureNetwork, path) -> None:
    with open(path, "w", newline="\n") as fh:
        write_edge_list(net, fh)


def _read_ints(path: Path, sep: str | None = None) -> list[tuple[int, list[int]]]:
    rows = []
    with open(path) as fh:
        for k, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            toks = line.split(sep) if sep else line.split()
            try:
                rows.append((k, [int(t.strip()) for t in toks]))
            except ValueError:
                raise ParseError(f"expected integers, got {line.strip()!r}", k, str(path)) from None
    return rows


def read_tud_dataset(directory, name: str):
    """Load a TUDataset as unit-weight undirected networks with uniform mass.

    Returns
    -------
    graphs : list of MeasureNetwork
    labels : list of int or None
        Graph labels when ``{name}_graph_labels.txt`` exists.
    """
    d = Path(directory)
    a_path = d / f"{name}_A.txt"
    ind_path = d / f"{name}_graph_indicator.txt"
    for p in (a_path, ind_path):
        if not p.is_file():
            raise FileNotFoundError(f"missing TUDataset file {p}")
    indicator = []
    for k, row in _read_ints(ind_path):
        if len(row) != 1:
            raise ParseError("expected one graph id per line", k, str(ind_path))
        indicator.append(row[0])
    ind = np.asarray(indicator, dtype=np.int64)
    if ind.size == 0:
        raise ParseError("graph indicator is empty", source=str(ind_path))
    if ind[0] != 1 or np.any(np.diff(ind) < 0) or np.any(np.diff(ind) > 1):
        raise ParseError("graph ids must be contiguous, start at 1 and be nondecreasing",
                         source=str(ind_path))
    n_graphs = int(ind[-1])
    starts = np.searchsorted(ind, np.arange(1, n_graphs + 2))
    mats = [np.zeros((starts[g + 1] - starts[g],) * 2) for g in range(n_graphs)]
    for k, row in _read_ints(a_path, sep=","):
        if len(row) != 2:
            raise ParseError("edge line must be 'i, j'", k, str(a_path))
        u, v = row[0] - 1, row[1] - 1
        if not (0 <= u < ind.size and 0 <= v < ind.size):
            raise ParseError(f"node id out of range [1, {ind.size}]", k, str(a_path))
        if ind[u] != ind[v]:
            raise ParseError(f"edge ({u + 1}, {v + 1}) crosses graph boundaries", k, str(a_path))
        g = ind[u] - 1
        off = starts[g]
        mats[g][u - off, v - off] = 1.0
        mats[g][v - off, u - off] = 1.0
    graphs = [build_network(S) for S in mats]
    labels = None
    lab_path = d / f"{name}_graph_labels.txt"
    if lab_path.is_file():
        rows = [r for _, r in _read_ints(lab_path)]
        if len(rows) != n_graphs or any(len(r) != 1 for r in rows):
            raise ParseError(f"expected {n_graphs} graph labels", source=str(lab_path))
        labels = [r[0] for r in rows]
    return graphs, labels


def write_tud_dataset(directory, name: str, adjacencies, labels=None) -> None:
    """Write 0/1 adjacency matrices in TUDataset layout (nonzeros become edges)."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    off = 0
    with open(d / f"{name}_A.txt", "w") as fa, open(d / f"{name}_graph_indicator.txt", "w") as fi:
        for g, A in enumerate(adjacencies, start=1):
            A = np.asarray(A)
            for i, j in zip(*np.nonzero(A)):
                fa.write(f"{i + off + 1}, {j + off + 1}\n")
            fi.write(f"{g}\n" * A.shape[0])
            off += A.shape[0]
    if labels is not None:
        with open(d / f"{name}_graph_labels.txt", "w") as fl:
            fl.writelines(f"{int(v)}\n" for v in labels)


def read_edgelist_dataset(directory, name: str) -> list[MeasureNetwork]:
    """Load every ``*.txt`` edge-list file in ``directory/name``, sorted by file name."""
    d = Path(directory) / name
    if not d.is_dir():
        raise FileNotFoundError(f"missing dataset directory {d}")
    files = sorted(p for p in d.iterdir() if p.suffix == ".txt")
    if not files:
        raise FileNotFoundError(f"no edge-list files in {d}")
    return [load_edge_list(p) for p in files]


def write_edgelist_dataset(directory, name: str, networks) -> None:
    d = Path(directory) / name
    d.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(len(networks))))
    for g, net in enumerate(networks):
        save_edge_list(net, d / f"graph_{g:0{width}d}.txt")


def load_dataset(directory, name: str) -> list[MeasureNetwork]:
    """TUDataset if ``{name}_A.txt`` exists, else an edge-list dataset directory."""
    if (Path(directory) / f"{name}_A.txt").is_file():
        return read_tud_dataset(directory, name)[0]
    return read_edgelist_dataset(directory, name)


def write_result(result, directory) -> dict[str, Path]:
    """Write ``coarsened.txt``, ``partition.tsv`` and ``metrics.txt`` into ``directory``."""
    d = Path(directory)
    paths = {
        "network": d / "coarsened.txt",
        "partition": d / "partition.tsv",
        "metrics": d / "metrics.txt",
    }
    try:
        d.mkdir(parents=True, exist_ok=True)
        save_edge_list(result.network, paths["network"])
        with open(paths["partition"], "w", newline="\n") as fh:
            for i, k in enumerate(result.partition.assignment):
                fh.write(f"{i}\t{k}\n")
        with open(paths["metrics"], "w", newline="\n") as fh:
            fh.write(f"objective {fmt(result.objective)}\n")
            fh.write(f"distortion {fmt(result.distortion)}\n")
            fh.write(f"n_original {result.partition.n}\n")
            fh.write(f"n_coarsened {result.network.n}\n")
            fh.write(f"steps {len(result.step_distortions)}\n")
            for t, ((i, j), v) in enumerate(zip(result.merges, result.step_distortions)):
                fh.write(f"step {t} {i} {j} {fmt(v)}\n")
            for key in sorted(result.extras):
                val = result.extras[key]
                val = fmt(val) if isinstance(val, float) else val
                fh.write(f"extra {key} {val}\n")
    except OSError as exc:
        raise OSError(f"failed writing result to {d}: {exc}") from exc
    return paths


def read_partition(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for k, line in enumerate(fh, start=1):
            toks = line.split("\t")
            if len(toks) != 2:
                raise ParseError("expected 'node<TAB>supernode'", k, os.fspath(path))
            rows.append((int(toks[0]), int(toks[1])))
    return np.array([k for _, k in sorted(rows)], dtype=np.int64)
