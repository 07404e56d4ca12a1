"""Command-line driver, run in process via main(argv)."""

import json
import os

import numpy as np
import pytest

from dsclab import read_csv, read_instance, read_matrix
from dsclab.cli import main
from dsclab.io import read_json


def _gen(tmp_path, name="inst.json", dims="8,12", lam="1", extra=()):
    out = str(tmp_path / name)
    code = main(["gen", "--dims", dims, "--lam", lam,
                 "--ensemble", "low-coherence", "--seed", "5",
                 "--out", out] + list(extra))
    assert code == 0
    return out


def test_gen_writes_instance(tmp_path):
    path = _gen(tmp_path)
    inst = read_instance(path)
    assert inst.depth == 1
    assert inst.dicts[1].shape == (8, 12)
    assert inst.truth[0].l0 <= 1


def test_gen_deterministic(tmp_path):
    a = _gen(tmp_path, "a.json")
    b = _gen(tmp_path, "b.json")
    assert open(a).read() == open(b).read()


def test_coherence_outputs_certificate(tmp_path, capsys):
    inst_path = _gen(tmp_path)
    inst = read_instance(inst_path)
    mat = tmp_path / "D.mat.txt"
    from dsclab import write_matrix
    write_matrix(mat, inst.dicts[1].data)
    out = tmp_path / "cert.json"
    assert main(["coherence", "--in", str(mat), "--out", str(out)]) == 0
    cert = read_json(out)
    assert 0 <= cert["mu_tilde"] <= cert["mu"] + 1e-9
    printed = capsys.readouterr().out
    assert "mu_tilde" in printed
    W = read_matrix(str(out)[:-len(".json")] + "_W.mat.txt")
    assert W.shape == (8, 12)
    G = W.T @ inst.dicts[1].data
    assert np.abs(np.diag(G) - 1).max() <= 1e-7


def test_certify_bundle(tmp_path):
    path = _gen(tmp_path, dims="8,12", lam="1")
    out = tmp_path / "bundle.json"
    assert main(["certify", "--instance", path, "--out", str(out)]) == 0
    bundle = read_json(out)
    assert "mu" in bundle and "ledger" in bundle and "corollaries" in bundle
    assert len(bundle["mu"]) == 1
    assert bundle["uniqueness"]["overall"] is True


def test_solve_bp_and_l0(tmp_path):
    path = _gen(tmp_path)
    inst = read_instance(path)
    for method in ("bp", "l0"):
        out = tmp_path / ("sol_%s.json" % method)
        assert main(["solve", "--method", method, "--instance", path,
                     "--out", str(out)]) == 0
        sol = read_json(out)
        got = np.array(sol["codes"][0], dtype=float)
        assert np.abs(got - inst.truth[0].values).max() <= 1e-6


def test_lista_compile_verify_net_chain(tmp_path):
    path = _gen(tmp_path, dims="16,32", lam="2")
    trace = tmp_path / "trace.csv"
    sched = tmp_path / "sched.json"
    assert main(["lista", "--instance", path, "--iters", "20",
                 "--trace", str(trace), "--out-schedule",
                 str(sched)]) == 0
    header, rows = read_csv(trace)
    assert header[0] == "k"
    assert len(rows) == 21
    final = float(rows[-1][header.index("err_l2")])
    assert final < 1e-4

    net = tmp_path / "net.json"
    assert main(["compile", "--schedule", str(sched),
                 "--out", str(net)]) == 0
    assert main(["verify-net", "--net", str(net), "--instance", path,
                 "--trials", "20"]) == 0


def test_compile_requires_embedded_dictionary(tmp_path):
    from dsclab import (SignalClass, compute_schedule,
                        low_coherence_dictionary, write_schedule)
    from dsclab.rng import make_generator
    D = low_coherence_dictionary(8, 12, make_generator(6))
    sched = compute_schedule(D, SignalClass(1.0, 1, 0.0), 4)
    bare = tmp_path / "sched.json"
    write_schedule(bare, sched)
    assert main(["compile", "--schedule", str(bare),
                 "--out", str(tmp_path / "x.json")]) == 1


def test_solve_cosparse(tmp_path):
    path = _gen(tmp_path)
    out = tmp_path / "cos.json"
    assert main(["solve", "--method", "cosparse", "--instance", path,
                 "--out", str(out)]) == 0
    sol = read_json(out)
    inst = read_instance(path)
    got = np.array(sol["codes"][0], dtype=float)
    assert np.abs(got - inst.truth[0].values).max() <= 1e-8


def test_bench_and_verify_round_trip(tmp_path):
    suite = {
        "recipes": [
            {"name": "tiny", "shape": [[8, 12]], "lambda": [1], "B": 1.0,
             "ensemble": "low-coherence", "mode": "exact-chain",
             "seed": 7},
        ],
        "solvers": {"methods": ["lista", "bp"], "activations": ["relu"],
                    "iterations": [10]},
        "gamma": 0.05,
        "plots": False,
    }
    spath = tmp_path / "suite.json"
    spath.write_text(json.dumps(suite))
    out_dir = tmp_path / "run"
    assert main(["bench", "--suite", str(spath),
                 "--out", str(out_dir)]) == 0
    assert (out_dir / "summary.csv").exists()
    header, rows = read_csv(out_dir / "summary.csv")
    assert len(rows) == 2
    assert all(r[header.index("status")] == "ok" for r in rows)
    assert main(["verify", "--out", str(out_dir)]) == 0


def test_verify_flags_tampering(tmp_path):
    suite = {
        "recipes": [
            {"name": "tiny", "shape": [[8, 12]], "lambda": [1], "B": 1.0,
             "ensemble": "low-coherence", "mode": "exact-chain",
             "seed": 7},
        ],
        "solvers": {"methods": ["lista"], "activations": ["relu"],
                    "iterations": [10]},
        "plots": False,
    }
    spath = tmp_path / "suite.json"
    spath.write_text(json.dumps(suite))
    out_dir = tmp_path / "run"
    assert main(["bench", "--suite", str(spath),
                 "--out", str(out_dir)]) == 0
    inst_file = out_dir / "instances" / "tiny.json"
    obj = read_json(inst_file)
    obj["matrices"][0][0][0] += 1e-4
    inst_file.write_text(json.dumps(obj))
    assert main(["verify", "--out", str(out_dir)]) == 1


def test_verify_missing_dir(tmp_path):
    assert main(["verify", "--out", str(tmp_path / "nothing")]) == 1


def test_bench_isolates_infeasible_recipe(tmp_path, capsys):
    suite = {
        "recipes": [
            {"name": "ok", "shape": [[8, 12]], "lambda": [1], "B": 1.0,
             "ensemble": "low-coherence", "mode": "exact-chain",
             "seed": 8},
            {"name": "toodense", "shape": [[8, 12]], "lambda": [5],
             "B": 1.0, "ensemble": "gaussian", "mode": "exact-chain",
             "seed": 9},
        ],
        "solvers": {"methods": ["lista"], "activations": ["relu"],
                    "iterations": [5]},
        "plots": False,
    }
    spath = tmp_path / "suite.json"
    spath.write_text(json.dumps(suite))
    out_dir = tmp_path / "run"
    code = main(["bench", "--suite", str(spath), "--out", str(out_dir)])
    assert code == 1
    header, rows = read_csv(out_dir / "summary.csv")
    status = {r[header.index("recipe")]: r[header.index("status")]
              for r in rows}
    assert status["ok"] == "ok"
    assert status["toodense"].startswith("failed(")


def test_empty_suite_yields_header_only_summary(tmp_path):
    spath = tmp_path / "suite.json"
    spath.write_text(json.dumps({"recipes": [], "solvers": {
        "methods": [], "activations": [], "iterations": []}}))
    out_dir = tmp_path / "run"
    assert main(["bench", "--suite", str(spath),
                 "--out", str(out_dir)]) == 0
    header, rows = read_csv(out_dir / "summary.csv")
    assert rows == []
    assert header[0] == "recipe"


def test_bench_reruns_are_identical(tmp_path):
    suite = {
        "recipes": [
            {"name": "tiny", "shape": [[8, 12]], "lambda": [1], "B": 1.0,
             "ensemble": "low-coherence", "mode": "exact-chain",
             "seed": 7},
        ],
        "solvers": {"methods": ["lista"], "activations": ["relu"],
                    "iterations": [5]},
        "plots": False,
    }
    spath = tmp_path / "suite.json"
    spath.write_text(json.dumps(suite))
    run1 = tmp_path / "r1"
    run2 = tmp_path / "r2"
    assert main(["bench", "--suite", str(spath), "--out", str(run1)]) == 0
    assert main(["bench", "--suite", str(spath), "--out", str(run2)]) == 0
    for root, _, files in os.walk(run1):
        rel = os.path.relpath(root, run1)
        for f in files:
            a = os.path.join(root, f)
            b = os.path.join(run2, rel, f)
            assert open(a, "rb").read() == open(b, "rb").read(), f


def test_unknown_arguments_exit_nonzero(tmp_path):
    with pytest.raises(SystemExit):
        main(["gen", "--dims", "8,12"])
    assert main(["solve", "--method", "bp",
                 "--instance", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path / "o.json")]) == 1
