import csv
import subprocess
import sys

import numpy as np
import pytest

from conftest import random_network
from gwcoarsen.cli import main, parse_levels, run_sweep, target_from_ratio
from gwcoarsen.dataio import fmt, load_edge_list, read_partition, save_edge_list, write_edgelist_dataset
from gwcoarsen.netcore import build_network
from gwcoarsen.synthgen import blow_up, complete_k_partite


@pytest.fixture
def files(tmp_path, k3, p3):
    paths = {}
    for name, net in {"k3": k3, "p3": p3, "k23": complete_k_partite((2, 3))}.items():
        paths[name] = tmp_path / f"{name}.txt"
        save_edge_list(net, paths[name])
    return paths


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_coarsen_path(files, tmp_path, capsys):
    code, out, _ = run(["coarsen", "--input", files["p3"], "--method", "gpc", "--target-size", 2,
                        "--out", tmp_path / "o"], capsys)
    assert code == 0
    assert "objective=0 " in out
    assert read_partition(tmp_path / "o" / "partition.tsv").tolist() == [0, 1, 0]


@pytest.mark.parametrize("method", ["gpc", "kgpc"])
def test_coarsen_k3(files, tmp_path, capsys, method):
    code, out, _ = run(["coarsen", "--input", files["k3"], "--method", method, "--target-size", 2,
                        "--out", tmp_path], capsys)
    assert code == 0
    value = float(out.split("objective=")[1].split()[0])
    assert value == pytest.approx(1 / 9, abs=1e-15)
    assert len(out.strip().splitlines()) == 1 and "elapsed_ms=" in out


def test_ratio_rule(tmp_path, rng, capsys):
    assert target_from_ratio(0.4, 10) == 4
    assert target_from_ratio(0.05, 10) == 2
    assert target_from_ratio(0.25, 10) == 3
    p = tmp_path / "g.txt"
    save_edge_list(random_network(rng, 10), p)
    code, out, _ = run(["coarsen", "--input", p, "--method", "gpc", "--ratio", 0.4, "--out", tmp_path], capsys)
    assert code == 0 and "target=4" in out
    assert load_edge_list(tmp_path / "coarsened.txt").n == 4


@pytest.mark.parametrize("rep", ["adjacency", "laplacian", "signless-laplacian"])
@pytest.mark.parametrize("measure", ["uniform", "degree"])
def test_representation_and_measure(files, tmp_path, capsys, rep, measure):
    code, _, _ = run(["coarsen", "--input", files["k23"], "--method", "gpc", "--target-size", 3,
                      "--representation", rep, "--measure", measure, "--out", tmp_path], capsys)
    assert code == 0
    out = load_edge_list(tmp_path / "coarsened.txt")
    assert abs(out.mass.sum() - 1) <= 1e-12


def test_degree_measure_needs_edges(tmp_path, capsys):
    p = tmp_path / "g.txt"
    p.write_text("3 1 undirected\n0 1 1\n")
    code, _, err = run(["coarsen", "--input", p, "--method", "gpc", "--target-size", 2,
                        "--measure", "degree", "--out", tmp_path], capsys)
    assert code == 1 and "degree" in err


def test_flag_errors(files, capsys):
    with pytest.raises(SystemExit) as info:
        main(["coarsen", "--input", str(files["k3"]), "--method", "gpc"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["coarsen", "--input", str(files["k3"]), "--method", "gpc", "--target-size", "2", "--ratio", "0.5"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--dataset", ".", "--name", "x", "--method", "gpc", "--levels", "0.9:0.1:0.1"])
    assert info.value.code == 2


def test_compute_errors(files, tmp_path, capsys):
    code, _, err = run(["coarsen", "--input", files["k3"], "--method", "gpc", "--target-size", 3,
                        "--out", tmp_path], capsys)
    assert code == 1 and err.startswith("error:")
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1 undirected\n0 7 1\n")
    code, _, err = run(["reduce", "--input", bad, "--out", tmp_path], capsys)
    assert code == 1 and ":2:" in err
    code, _, err = run(["reduce", "--input", tmp_path / "missing.txt"], capsys)
    assert code == 1


def test_reduce_bipartite(files, tmp_path, capsys):
    code, out, _ = run(["reduce", "--input", files["k23"], "--tol", 1e-9, "--out", tmp_path], capsys)
    assert code == 0 and out.strip() == "5 -> 2"


def test_reduce_blow_up(tmp_path, rng, capsys):
    p = tmp_path / "b.txt"
    save_edge_list(blow_up(random_network(rng, 4), [3, 2, 2, 2], seed=0), p)
    code, out, _ = run(["reduce", "--input", p, "--out", tmp_path], capsys)
    assert out.strip() == "9 -> 4"


def test_reduce_distinct(tmp_path, rng, capsys):
    p = tmp_path / "d.txt"
    save_edge_list(random_network(rng, 6), p)
    _, out, _ = run(["reduce", "--input", p, "--out", tmp_path], capsys)
    assert out.strip() == "6 -> 6"


def read_matrix(path):
    return [row for row in csv.reader(open(path))]


def test_pairdist(files, tmp_path, capsys):
    out = tmp_path / "h.csv"
    assert run(["pairdist", "--input", files["k3"], "--out", out], capsys)[0] == 0
    rows = read_matrix(out)
    H = np.array(rows, dtype=float)
    np.testing.assert_allclose(H, (1 - np.eye(3)) / 3, rtol=1e-14)
    assert all(rows[i][j] == rows[j][i] for i in range(3) for j in range(3))
    assert all(len(v.lstrip("0.")) <= 17 for r in rows for v in r)

    run(["pairdist", "--input", files["p3"], "--out", out], capsys)
    rows = read_matrix(out)
    assert float(rows[0][2]) == 0.0 and rows[0][2] == rows[2][0]


def test_parse_levels():
    levels = parse_levels("0.15:0.85:0.05")
    assert len(levels) == 15
    assert levels[0] == 0.15 and levels[-1] == 0.85


def test_sweep_k3(tmp_path, k3, capsys):
    write_edgelist_dataset(tmp_path, "K", [k3])
    code, out, _ = run(["sweep", "--dataset", tmp_path, "--name", "K", "--method", "gpc",
                        "--levels", "0.5:0.5:0.1"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert float(rows[0]["distortion"]) == pytest.approx(1 / 3, abs=1e-15)
    assert rows[1]["graph_id"] == "AVG"


def test_sweep_blow_ups_are_free(rng):
    graphs = [blow_up(random_network(rng, 3), [3, 3, 4], seed=s) for s in range(3)]
    text = run_sweep(graphs, "B", "gpc", parse_levels("0.15:0.7:0.05"), timing=False)
    rows = list(csv.DictReader(text.splitlines()))
    # level 0.7 of 10 nodes keeps 3
    assert all(float(r["distortion"]) <= 1e-12 for r in rows)


def test_sweep_skips_tiny_graphs(rng, capsys):
    graphs = [build_network([[0.0, 1.0], [1.0, 0.0]]), random_network(rng, 5)]
    text = run_sweep(graphs, "S", "kgpc", [0.5], timing=False)
    lines = text.splitlines()
    assert lines[1] == "S,0,2,,kgpc,skipped,"
    assert "skipped" in capsys.readouterr().err
    assert lines[-1].startswith("S,AVG,,0.5,kgpc,")


def test_sweep_deterministic_and_parallel(rng):
    graphs = [random_network(rng, int(rng.integers(4, 12))) for _ in range(6)]
    levels = parse_levels("0.15:0.85:0.1")
    a = run_sweep(graphs, "R", "kgpc", levels, seed=3, timing=False)
    b = run_sweep(graphs, "R", "kgpc", levels, seed=3, timing=False)
    c = run_sweep(graphs, "R", "kgpc", levels, seed=3, jobs=2, timing=False)
    assert a == b == c


def test_sweep_writes_file(tmp_path, k3, capsys):
    write_edgelist_dataset(tmp_path, "K", [k3, k3])
    out = tmp_path / "s.csv"
    code, _, _ = run(["sweep", "--dataset", tmp_path, "--name", "K", "--method", "gpc",
                      "--out", out, "--no-timing"], capsys)
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "dataset,graph_id,n_nodes,level,method,distortion,runtime_ms"
    assert rows[1] == "K,0,3,0.15,gpc,0,NA"
    assert rows[-1] == f"K,AVG,,0.85,gpc,{fmt(1 / 3)},NA"


def test_sweep_missing_dataset(tmp_path, capsys):
    code, _, err = run(["sweep", "--dataset", tmp_path, "--name", "none", "--method", "gpc"], capsys)
    assert code == 1 and err


def test_module_entry_point(files, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "gwcoarsen", "reduce", "--input", str(files["k23"]), "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "5 -> 2"
