import csv
import io
import json
import math

import pytest

from ubgspanner import cli
from ubgspanner.geometry import UbgInstance, validate_instance
from ubgspanner.verify import check_spanner


def run_cli(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def inst_path(tmp_path):
    path = tmp_path / "inst.json"
    assert run_cli("gen", "--n", 100, "--alpha", 0.7, "--seed", 7, "--out", path) == 0
    return path


def read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


# -- gen ----------------------------------------------------------------------

def test_gen_single_node(tmp_path):
    out = tmp_path / "one.json"
    assert run_cli("gen", "--n", 1, "--out", out) == 0
    assert UbgInstance.load(out).edges == []


def test_gen_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run_cli("gen", "--n", 50, "--alpha", 0.6, "--policy", "bernoulli:0.5",
                       "--seed", 3, "--out", path) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_output_validates(inst_path):
    assert validate_instance(UbgInstance.load(inst_path)) == []


@pytest.mark.parametrize("flags", [
    ["--n", 0], ["--n", 10, "--alpha", 1.5], ["--n", 10, "--alpha", 0],
    ["--n", 10, "--policy", "bernoulli:2"], ["--n", 10, "--policy", "sometimes"],
    ["--n", 10, "--d", 1]])
def test_gen_usage_errors(tmp_path, flags):
    assert run_cli("gen", *flags, "--out", tmp_path / "x.json") == 2


def test_argparse_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as err:
        run_cli("gen", "--out", tmp_path / "x.json")
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        run_cli("run", "--algo", "quick", "--t", 1.5, "--input", "x", "--out", "y")
    assert err.value.code == 2


# -- run ----------------------------------------------------------------------

def test_run_seq_greedy_t1(inst_path, tmp_path):
    out = tmp_path / "s.json"
    assert run_cli("run", "--algo", "seq-greedy", "--t", 1, "--input", inst_path,
                   "--out", out) == 0
    inst = UbgInstance.load(inst_path)
    assert len(json.loads(out.read_text())["edges"]) <= len(inst.edges)


def test_run_relaxed(inst_path, tmp_path):
    out = tmp_path / "r.json"
    assert run_cli("run", "--algo", "relaxed", "--t", 1.5, "--input", inst_path,
                   "--out", out) == 0
    doc = json.loads(out.read_text())
    report = json.loads((tmp_path / "r.report.json").read_text())
    assert report["spanner"]["pass"] and report["spanner"]["value"] <= 1.5 + 1e-9
    inst = UbgInstance.load(inst_path)
    assert check_spanner(inst, [tuple(e) for e in doc["edges"]], 1.5)
    assert set(doc) >= {"t", "params", "edges", "phases"}


def test_run_dist_writes_transcript(inst_path, tmp_path):
    out = tmp_path / "d.json"
    assert run_cli("run", "--algo", "dist", "--t", 1.5, "--input", inst_path,
                   "--out", out, "--transcript", tmp_path / "tr.json") == 0
    tr = json.loads((tmp_path / "tr.json").read_text())
    assert tr["rounds_total"] > 0 and tr["messages_total"] > 0
    assert tr["edges"] == json.loads(out.read_text())["edges"]


def test_run_certificate_failure_exits_1(inst_path, tmp_path, monkeypatch, capsys):
    real = cli.build_spanner

    def lossy(inst, algo, t, seed=0):
        edges, doc, tr = real(inst, algo, t, seed)
        return edges[1:], doc, tr
    monkeypatch.setattr(cli, "build_spanner", lossy)
    out = tmp_path / "bad.json"
    assert run_cli("run", "--algo", "relaxed", "--t", 1.5, "--input", inst_path,
                   "--out", out) == 1
    assert not out.exists()
    report = json.loads((tmp_path / "bad.report.json").read_text())
    assert not report["spanner"]["pass"] and report["spanner"]["witness"]
    assert "certificate failed" in capsys.readouterr().err


def test_run_usage_errors(inst_path, tmp_path):
    assert run_cli("run", "--algo", "relaxed", "--t", 1.0, "--input", inst_path,
                   "--out", tmp_path / "x.json") == 2
    assert run_cli("run", "--algo", "relaxed", "--t", 1.5, "--input",
                   tmp_path / "missing.json", "--out", tmp_path / "x.json") == 2


def test_run_is_byte_identical(inst_path, tmp_path):
    blobs = []
    for k in range(2):
        out = tmp_path / f"d{k}.json"
        assert run_cli("run", "--algo", "dist", "--t", 1.5, "--input", inst_path,
                       "--out", out) == 0
        blobs.append([out.read_bytes(), (tmp_path / f"d{k}.report.json").read_bytes(),
                      (tmp_path / f"d{k}.transcript.json").read_bytes()])
    assert blobs[0] == blobs[1]


# -- bench --------------------------------------------------------------------

def test_bench_single_cell(tmp_path):
    out = tmp_path / "b.csv"
    assert run_cli("bench", "--sizes", 30, "--seeds", 1, "--algo", "relaxed",
                   "--out", out) == 0
    rows = read_csv(out)
    assert len(rows) == 1
    assert list(rows[0]) == list(cli.BENCH_COLUMNS)
    assert rows[0]["rounds_total"] == "" and rows[0]["ms_elapsed"] == ""


def test_bench_per_seed_and_timing(tmp_path):
    out = tmp_path / "b.csv"
    assert run_cli("bench", "--sizes", "20,30", "--seeds", 2, "--algo", "seq-greedy,dist",
                   "--per-seed", "--timing", "--out", out) == 0
    rows = read_csv(out)
    assert len(rows) == 8
    assert all(float(r["ms_elapsed"]) >= 0 for r in rows)
    assert all(r["rounds_total"] for r in rows if r["algo"] == "dist")


def test_bench_usage_errors(tmp_path):
    assert run_cli("bench", "--sizes", "10,x", "--out", tmp_path / "b.csv") == 2
    assert run_cli("bench", "--algo", "fast", "--out", tmp_path / "b.csv") == 2
    assert run_cli("bench", "--t", 0.9, "--out", tmp_path / "b.csv") == 2


def test_bench_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run_cli("bench", "--sizes", "30,60", "--seeds", 2, "--out", path) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.slow
def test_bench_growth(tmp_path):
    out = tmp_path / "g.csv"
    assert run_cli("bench", "--sizes", "50,100,200,400", "--seeds", 3, "--algo", "dist",
                   "--out", out) == 0
    rows = {int(r["size"]): r for r in read_csv(out)}
    rounds = {n: float(r["rounds_total"]) for n, r in rows.items()}
    degree = {n: float(r["max_degree"]) for n, r in rows.items()}
    # every doubling multiplies rounds by well under 2
    for n in (100, 200, 400):
        assert rounds[n] / rounds[n // 2] < 1.6
    assert rounds[400] / rounds[50] < math.log2(8) ** 2 / 2
    assert degree[400] <= 1.5 * degree[50]
