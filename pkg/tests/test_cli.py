import csv
import io
import json
from pathlib import Path

import pytest

from neqr_pprm.bitplane import format_pgm, random_image
from neqr_pprm.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cost_random(capsys):
    code, out, _ = run(capsys, "cost", "--random", "3", "8", "42", "--model", "both")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["model"] for r in rows] == ["plain", "reset"]
    for r in rows:
        nonopt, opt = int(r["qc_nonopt"]), int(r["qc_opt"])
        assert float(r["ratio_percent"]) == pytest.approx((1 - opt / nonopt) * 100, abs=1e-3)
    assert run(capsys, "cost", "--random", "3", "8", "42", "--model", "both")[1] == out


def test_cost_pgm_and_json(tmp_path, capsys):
    path = tmp_path / "img.pgm"
    path.write_bytes(format_pgm(random_image(2, 8, 1)))
    code, out, _ = run(capsys, "cost", str(path), "--format", "json", "--polarity-x")
    assert code == 0
    (row,) = json.loads(out)
    _, plain, _ = run(capsys, "cost", str(path), "--format", "json")
    assert row["qc_nonopt"] > json.loads(plain)[0]["qc_nonopt"]


def test_cost_errors(tmp_path, capsys):
    code, out, err = run(capsys, "cost", str(tmp_path / "missing.pgm"))
    assert code == 2 and out == "" and "error" in err
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n3 3\n255\n" + bytes(9))
    code, out, err = run(capsys, "cost", str(bad))
    assert code == 2 and out == "" and "width" in err
    code, out, _ = run(capsys, "cost")
    assert code == 2 and out == ""


def test_verify(capsys):
    assert run(capsys, "verify", "--random", "4", "8", "1") == (0, "EQUIVALENT\n", "")
    code, out, _ = run(capsys, "verify", "--random", "4", "8", "1", "--flip", "3", "9", "14")
    assert code == 1
    assert out == "NOT EQUIVALENT plane=3 Y=9 X=14\n"
    code, out, err = run(capsys, "verify", "--random", "9", "8", "1")
    assert code == 2 and out == "" and "n <= 8" in err


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--n-range", "1..3", "--seeds", "2")
    assert code == 0
    assert len(out.strip().split("\n")) == 1 + 6
    code, out, _ = run(capsys, "sweep", "--n-range", "1..2", "--seeds", "2", "--format", "json")
    assert len(json.loads(out)) == 4
    code, out, _ = run(capsys, "sweep", "--n-range", "1..3", "--seeds", "3", "--summary")
    assert out.startswith("model,m,samples,rate_mean")
    for bad in ("3..1", "0..2", "x", "1..17"):
        code, out, _ = run(capsys, "sweep", "--n-range", bad)
        assert code == 2 and out == ""


def test_fit_from_sweep(tmp_path, capsys):
    _, out, _ = run(capsys, "sweep", "--n-range", "3..6", "--seeds", "3", "--model", "both")
    path = tmp_path / "sweep.csv"
    path.write_text(out)
    code, res, _ = run(capsys, "fit", str(path), "--model", "plain", "--format", "json")
    assert code == 0
    obj = json.loads(res)
    assert obj["family"] == "growth" and 1.2 < obj["params"][0] < 1.5
    code, res, _ = run(capsys, "fit", str(path), "--model", "reset", "--family", "decay")
    assert code == 0 and res.startswith("family,sign,params")
    code, _, err = run(capsys, "fit", str(path), "--model", "plain", "--m-min", "13")
    assert code == 2 and "points" in err


def test_export(tmp_path, capsys):
    src = tmp_path / "fig3.pgm"
    src.write_bytes(b"P2\n2 2\n255\n0 64\n64 65\n")
    out_path = tmp_path / "fig3.qasm"
    code, out, _ = run(capsys, "export", str(src), "--form", "pprm", "--out", str(out_path))
    assert code == 0 and out == ""
    assert out_path.read_text() == (DATA / "fig3_pprm.qasm").read_text()
    code, out, _ = run(capsys, "export", str(src), "--form", "esop")
    assert out == (DATA / "fig3_esop.qasm").read_text()
    code, out, err = run(capsys, "export", str(src), "--out", str(tmp_path / "no" / "dir.qasm"))
    assert code == 2 and "cannot write" in err


def test_export_reimport_verifies(tmp_path, capsys):
    a, b = tmp_path / "esop.qasm", tmp_path / "pprm.qasm"
    run(capsys, "export", "--random", "3", "8", "5", "--form", "esop", "--out", str(a))
    run(capsys, "export", "--random", "3", "8", "5", "--form", "pprm", "--out", str(b))
    assert run(capsys, "verify", "--qasm", str(a), str(b))[:2] == (0, "EQUIVALENT\n")
    run(capsys, "export", "--random", "3", "8", "6", "--form", "pprm", "--out", str(b))
    code, out, _ = run(capsys, "verify", "--qasm", str(a), str(b))
    assert code == 1 and out.startswith("NOT EQUIVALENT")


def test_info(capsys):
    code, out, _ = run(capsys, "info", "--random", "2", "4", "0")
    assert code == 0
    assert out.splitlines()[0] == "# n=2 q=4 m=4 side=4"
    assert len(out.splitlines()) == 2 + 4


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


def test_sweep_piped_into_growth_fit(capsys, monkeypatch):
    _, out, _ = run(capsys, "sweep", "--n-range", "1..8", "--seeds", "10")
    monkeypatch.setattr("sys.stdin", io.StringIO(out))
    code, res, _ = run(capsys, "fit", "--family", "growth", "--format", "json")
    assert code == 0
    b = json.loads(res)["params"][0]
    assert 1.28 <= b <= 1.38
