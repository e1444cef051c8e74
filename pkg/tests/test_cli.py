import json

import pytest

from expandertopo.cli import main
from expandertopo.constructors import named_graph
from expandertopo.graph import build_graph, read_graph, write_graph


@pytest.fixture
def petersen_file(tmp_path):
    path = tmp_path / "pet.json"
    write_graph(named_graph("petersen"), path)
    return str(path)


def test_gen_lps(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["gen", "--kind", "lps", "--p", "5", "--q", "13", "-o", str(out)]) == 0
    g = read_graph(out)
    assert g.n == 2184 and g.regular_degree() == 6
    assert json.loads(capsys.readouterr().out)["edges"] == g.m


def test_gen_random_seeded(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "--kind", "random", "--n", "50", "--d", "4", "--seed", "7", "-o", str(a)]) == 0
    assert main(["--seed", "7", "gen", "--kind", "random", "--n", "50", "--d", "4", "-o", str(b)]) == 0
    assert a.read_text() == b.read_text()


def test_gen_circulant_stdout(capsys):
    assert main(["gen", "--kind", "circulant", "--n", "12", "--d", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["n"] == 12 and len(doc["edges"]) == 24


def test_gen_missing_args(capsys):
    assert main(["gen", "--kind", "lps", "--p", "29"]) == 2
    assert main(["gen", "--kind", "circulant", "--n", "8", "--d", "2", "--reading", "literal"]) == 2


def test_gen_exhausted():
    assert main(["gen", "--kind", "random", "--n", "20", "--d", "18"]) == 4


def test_unknown_command():
    assert main(["frobnicate"]) == 2


def test_spectral_listing(petersen_file, capsys):
    assert main(["spectral", petersen_file]) == 0
    lines = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
    assert lines["degree_d"] == "3" and lines["ramanujan"] == "True"


@pytest.mark.parametrize("prefix", [True, False])
def test_spectral_json(petersen_file, capsys, prefix):
    argv = ["--json", "spectral", petersen_file] if prefix else ["spectral", petersen_file, "--json"]
    assert main(argv) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["spectral"]["lambda_second"] == pytest.approx(1.0)


def test_spectral_disconnected(tmp_path):
    path = tmp_path / "d.json"
    write_graph(build_graph(4, [(0, 1), (2, 3)]), path)
    assert main(["spectral", str(path)]) == 2


def test_spectral_bad_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 3, "edges": [[0, 1]')
    assert main(["spectral", str(path)]) == 2
    assert main(["spectral", str(tmp_path / "missing.json")]) == 2


def test_sparsify(tmp_path, capsys):
    src, out, costs = tmp_path / "k8.json", tmp_path / "h.json", tmp_path / "mu.json"
    g = named_graph("complete", 8)
    write_graph(g, src)
    costs.write_text(json.dumps({f"{u}-{v}": 1 + (u + v) % 3 for u, v in g.edge_list()}))
    assert main(["--json", "sparsify", str(src), "--d", "3", "--costs", str(costs), "-o", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["certificate"] and summary["edges"] <= 21
    assert read_graph(out).m == summary["edges"]


def test_simulate(tmp_path, petersen_file, capsys):
    trace = tmp_path / "t.csv"
    code = main(["simulate", "--graph", petersen_file, "--problem", "ex1", "--alpha", "0.02",
                 "--theta1", "0.5", "--tol", "1e-3", "--seed", "1", "-o", str(trace)])
    assert code == 0
    assert "status=converged" in capsys.readouterr().out
    assert "iter,delta_k,cumulative_messages" in trace.read_text()


def test_simulate_with_config(tmp_path, petersen_file, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"topology": petersen_file, "problem": "ex2", "alpha": 0.3}))
    assert main(["--json", "simulate", "--config", str(cfg), "--alpha", "0.05"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["algorithm"] == "pg-extra" and out["total"] == out["k0"] * 30


def test_simulate_exit_codes(petersen_file):
    assert main(["simulate", "--graph", petersen_file, "--theta1", "1.5"]) == 2
    assert main(["simulate", "--graph", petersen_file, "--tol", "1e-30", "--max-iters", "4"]) == 4
    assert main(["simulate", "--graph", petersen_file, "--alpha", "100", "--tol", "1e-30"]) == 3


def test_sweep(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--n", "64", "--degrees", "4,6", "-o", str(out)]) == 0
    rows = [line for line in out.read_text().splitlines() if not line.startswith("#")]
    header = rows[0].split(",")
    for col in ("d", "kappa_tilde", "k0", "per_round", "total"):
        assert col in header
    assert len(rows) == 3


def test_reproduce_tables(tmp_path, capsys):
    out = tmp_path / "tables.csv"
    assert main(["--json", "reproduce-tables", "-o", str(out)]) == 0
    checks = json.loads(capsys.readouterr().out)
    assert checks["kappa_matches"] and checks["ordering_example1"] and checks["ordering_example2"]
    text = out.read_text()
    assert text.count(",published,") == 8 and text.count(",measured,") == 8
