import json
import subprocess
import sys

import numpy as np
import pytest

from circjl.cli import main
from circjl.pointset import read_points, write_points


def records(text):
    return [json.loads(line) for line in text.strip().splitlines()]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_embed_identical_points(tmp_path, capsys):
    src = tmp_path / "in.bin"
    write_points(src, np.ones((2, 16)), "binary")
    code, out, _ = run(capsys, ["embed", "--input", str(src), "--output", str(tmp_path / "o.bin"),
                                "--k", "4", "--seed", "3"])
    assert code == 0
    emb = read_points(tmp_path / "o.bin")
    assert emb.shape == (2, 4)
    assert np.array_equal(emb[0], emb[1])
    assert records(out)[0]["result"]["k"] == 4


def test_embed_clamps_k(tmp_path, capsys, caplog):
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((100, 512))
    src = tmp_path / "in.csv"
    write_points(src, pts, "csv")
    code, out, _ = run(capsys, ["embed", "--input", str(src), "--output", str(tmp_path / "o.csv"),
                                "--epsilon", "0.25", "--delta", "1", "--budget", "1/3"])
    assert code == 0
    res = records(out)[0]["result"]
    assert res["k_chosen"] == 12142 and res["k"] == 512 and res["clamped"]
    assert "clamping" in caplog.text
    assert read_points(tmp_path / "o.csv").shape == (100, 512)


def test_embed_errors(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    code, _, err = run(capsys, ["embed", "--input", str(bad), "--output", str(tmp_path / "o.csv")])
    assert code == 2 and "line 2" in err
    good = tmp_path / "g.csv"
    write_points(good, np.ones((3, 4)), "csv")
    code, _, _ = run(capsys, ["embed", "--input", str(good), "--output", str(tmp_path / "o.csv"), "--k", "5"])
    assert code == 1


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectral", "--t-grid", "abc"])
    assert exc.value.code == 1


def test_spectral_records(capsys):
    code, out, _ = run(capsys, ["spectral", "--d", "256", "--k", "64", "--t-grid", "1,2,3,4",
                                "--trials", "1000", "--seed", "5", "--summary"])
    recs = records(out)
    assert code == 0
    assert len(recs) == 5
    assert all(r["result"]["dominated"] for r in recs[:4])
    assert recs[-1]["summary"] and recs[-1]["all_passed"]
    assert all(r["seed"] == 5 and "t" in r["params"] for r in recs[:4])


def test_mgf_rademacher(capsys):
    code, out, _ = run(capsys, ["mgf", "--dist", "rademacher", "--lambda", "0.3", "--centered", "raw",
                                "--trials", "20000"])
    (rec,) = records(out)
    r = rec["result"]
    assert code == 0
    assert r["sample_mean"] <= 1.58114 + 3 * r["sample_std_error"]


def test_mgf_regime_exit_code(capsys):
    code, _, err = run(capsys, ["mgf", "--dist", "uniform", "--eta", "0.3", "--lambda", "0.3",
                                "--centered", "lower_centered", "--trials", "10000"])
    assert code == 3 and "regime" in err


def test_tail_reproducible(capsys, monkeypatch):
    monkeypatch.setenv("CJL_SEED", "77")
    argv = ["tail", "--d", "64", "--k", "16", "--epsilon", "0.3", "--trials", "1000"]
    _, out1, _ = run(capsys, argv)
    _, out2, _ = run(capsys, argv + ["--threads", "3"])
    strip = lambda recs: [{k: v for k, v in r.items() if k != "wall_time_seconds"} for r in recs]
    r1, r2 = strip(records(out1)), strip(records(out2))
    assert r1 == r2
    assert r1[0]["seed"] == 77 and len(r1) == 2


def test_distort_small(capsys, tmp_path):
    report = tmp_path / "r.jsonl"
    code, _, _ = run(capsys, ["distort", "--n", "10", "--d", "64", "--k", "64", "--epsilon", "0.45",
                              "--repeats", "5", "--report", str(report)])
    (rec,) = records(report.read_text())
    assert len(rec["result"]["failures_per_embedder"]) == 5
    assert code == (0 if rec["passed"] else 4)


def test_bench_small(capsys):
    code, out, _ = run(capsys, ["bench", "--d-grid", "8,64", "--k", "8", "--trials", "3"])
    recs = records(out)
    assert code == 0 and len(recs) == 2
    for r in recs:
        assert set(r["result"]["timing"]) == {"naive", "fft"}
        assert r["result"]["max_rel_diff"] <= 1e-9


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "circjl", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "spectral" in out.stdout
