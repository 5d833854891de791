import csv
import io
import json
import math
import subprocess
import sys

import jsonschema
import numpy as np
import pytest
from scipy import integrate

from lup import __version__
from lup.cli import COLUMNS, JSON_SCHEMA, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    lines = text.splitlines()
    meta = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    return meta, rows[0], rows[1:]


def test_simulate_csv_rows_and_header(capsys):
    code, out, _ = run(["simulate", "--n", "2", "--t-max", "3", "--trajectories", "100", "--seed", "5"], capsys)
    assert code == 0
    meta, header, rows = parse_csv(out)
    assert meta[0] == f"# lup {__version__}"
    config = json.loads(meta[1][len("# config ") :])
    assert config["seed"] == 5 and config["n"] == 2 and config["command"] == "simulate"
    assert header == COLUMNS["simulate"]
    assert len(rows) == 100 * 3 * 2
    vals = np.array([float(r[3]) for r in rows])
    assert np.all(vals > 0)


def test_simulate_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["simulate", "--n", "3", "--t-max", "2", "--trajectories", "50", "--seed", "9", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    main(["simulate", "--n", "3", "--t-max", "2", "--trajectories", "50", "--seed", "9", "--workers", "4", "--out", str(c)])
    body = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("#")]  # noqa: E731
    assert body(a) == body(c)


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--n", "2", "--t-max", "2", "--trajectories", "3", "--format", "json"],
        ["kernel", "--family", "sine_extended", "--grid=-1,1,5", "--x", "0", "--format", "json"],
        ["verify", "--suite", "determinant", "--format", "json"],
        ["limit-scan", "--gamma", "100,1000", "--format", "json"],
    ],
)
def test_json_validates_against_schema(argv, capsys):
    code, out, _ = run(argv, capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, JSON_SCHEMA[argv[0]])
    assert doc["version"] == __version__


def test_kernel_sine_curve(capsys):
    code, out, _ = run(["kernel", "--family", "sine_extended", "--times", "1", "--grid=-3,3,61", "--x", "0"], capsys)
    assert code == 0
    _, header, rows = parse_csv(out)
    assert header == COLUMNS["kernel"]
    for r in rows:
        d = float(r[0])
        expected = 1.0 if d == 0 else math.sin(math.pi * d) / (math.pi * d)
        assert float(r[4]) == pytest.approx(expected, abs=1e-10)


def test_kernel_laguerre_diagonal_trace(capsys):
    code, out, _ = run(["kernel", "--n", "2", "--times", "1", "--grid", "0,40,40001"], capsys)
    assert code == 0
    _, _, rows = parse_csv(out)
    y = np.array([float(r[0]) for r in rows])
    k = np.array([float(r[4]) for r in rows])
    # the weight is zero at x = 0 by convention, so the trapezoid misses h/2 * K(0+) = 1e-3
    assert integrate.trapezoid(k, y) == pytest.approx(2.0, abs=2e-3)


def test_kernel_hermite_gaussian(capsys):
    code, out, _ = run(["kernel", "--family", "hermite_extended", "--times", "1", "--grid=-4,4,17"], capsys)
    assert code == 0
    _, _, rows = parse_csv(out)
    for r in rows:
        x = float(r[0])
        assert float(r[4]) == pytest.approx(math.exp(-x * x / 2) / math.sqrt(2 * math.pi), rel=1e-13)


def test_kernel_rejects_noninteger_laguerre_time(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["kernel", "--times", "1.5"])
    assert exc.value.code == 2
    assert "--times" in capsys.readouterr().err


def test_verify_exit_codes(capsys):
    code, out, err = run(["verify", "--suite", "determinant,convolution", "--quick"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert len(doc["results"]) == 10
    assert "[PASS]" in err
    code, out, err = run(["verify", "--suite", "convolution", "--tol", "1e-30"], capsys)
    assert code == 1
    assert "[FAIL]" in err
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "bogus"])
    assert exc.value.code == 2


def test_limit_scan_rows_and_slope(capsys):
    code, out, _ = run(["limit-scan", "--n", "1", "--gamma", "100,1000,10000"], capsys)
    assert code == 0
    _, header, rows = parse_csv(out)
    assert header == COLUMNS["limit-scan"]
    by_point = {}
    for r in rows:
        by_point.setdefault(tuple(r[1:5]), []).append((float(r[0]), float(r[5])))
    assert all(len(v) == 3 for v in by_point.values())
    for v in by_point.values():
        g, e = np.array(v).T
        assert np.all(np.diff(e) < 0)
        assert np.polyfit(np.log(g), np.log(e), 1)[0] == pytest.approx(-0.5, abs=0.2)


@pytest.mark.parametrize("gamma", ["", "1000,100", "1e8"])
def test_limit_scan_usage_errors(gamma, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["limit-scan", f"--gamma={gamma}"])
    assert exc.value.code == 2
    assert "--gamma" in capsys.readouterr().err


def test_unwritable_output(tmp_path, capsys):
    code = main(["simulate", "--n", "1", "--t-max", "1", "--trajectories", "2", "--out", str(tmp_path / "no" / "x.csv")])
    assert code == 2
    assert "cannot write --out" in capsys.readouterr().err


def test_invalid_parameter_names_field(capsys):
    with pytest.raises(SystemExit):
        main(["simulate", "--n", "0", "--t-max", "2"])
    assert "--n" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["simulate", "--n", "2", "--t-max", "2", "--times", "3"])
    assert "--times" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lup.cli", "kernel", "--grid", "1,2,2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[2] == ",".join(COLUMNS["kernel"])
