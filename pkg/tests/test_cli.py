import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from circsep import __version__
from circsep.cli import main
from circsep.density import DensityMatrix, isotropic, to_class_blocks

DATA = Path(__file__).parent / "data"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}


def test_build_isotropic(tmp_path, capsys):
    out = tmp_path / "iso.json"
    code, _, _ = run(["build", "--family", "isotropic", "--d", "3", "--lambda", "0.25", "--out", str(out)], capsys)
    assert code == 0
    rho = DensityMatrix.from_json(json.loads(out.read_text()))
    assert rho.entries.shape == (9, 9)
    np.testing.assert_allclose(rho.entries, isotropic(3, 0.25).entries)


def test_build_horodecki_to_stdout(capsys):
    code, out, _ = run(["build", "--family", "horodecki", "--alpha", "3"], capsys)
    assert code == 0
    assert json.loads(out)["d"] == 3


def test_build_from_blocks_passes_through(tmp_path, capsys):
    blocks = tmp_path / "blocks.json"
    blocks.write_text(json.dumps(to_class_blocks(isotropic(3, 0.4)).to_json()))
    code, out, _ = run(["build", "--blocks", str(blocks)], capsys)
    assert code == 0
    np.testing.assert_allclose(DensityMatrix.from_json(json.loads(out)).entries, isotropic(3, 0.4).entries)


@pytest.mark.parametrize("argv", [
    ["build", "--family", "werner", "--p", "2"],
    ["build", "--family", "nope"],
    ["build"],
    ["analyze", "/nonexistent.json"],
    ["build", "--family", "random", "--d", "3", "--permutation", "1,0,2"],
])
def test_validation_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "invalid input" in err


def test_pattern_violation_reports_positions(tmp_path, capsys):
    m = np.eye(9, dtype=complex) / 9
    m[0, 1] = m[1, 0] = 0.01
    data = {"d": 3, "permutation": [0, 1, 2], "entries": [[z.real, z.imag] for z in m.reshape(-1)]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, _, err = run(["analyze", str(path)], capsys)
    assert code == 2
    assert "(0, 1)" in err


@pytest.mark.parametrize("args,verdict,ppt", [
    (["--family", "isotropic", "--d", "3", "--lambda", "0.2"], "separable", "PPT"),
    (["--family", "horodecki", "--alpha", "3.5"], "inconclusive", "PPT"),
    (["--family", "horodecki", "--alpha", "4.5"], "entangled", "violated"),
])
def test_analyze_verdicts(args, verdict, ppt, capsys):
    code, out, _ = run(["analyze", *args], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["version"] == __version__
    res = report["result"]
    assert res["verdict"]["verdict"] == verdict
    assert res["ppt"]["block"]["verdict"] == ppt and res["ppt"]["oracle_verdict"] == ppt
    assert all(c["pass"] for c in report["checks"])
    if verdict == "entangled":
        assert res["verdict"]["witness"]["class"] in range(3)


def test_analyze_is_deterministic(capsys):
    argv = ["analyze", "--family", "random", "--d", "5", "--seed", "3", "--permutation", "0,2,4,1,3"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert strip_timing(json.loads(first)) == strip_timing(json.loads(second))
    assert first.split('"timing"')[0] == second.split('"timing"')[0]


def test_analyze_tolerance_validation(capsys):
    code, _, _ = run(["analyze", "--family", "isotropic", "--lambda", "0.2", "--tol-eig", "0"], capsys)
    assert code == 2


def test_sweep_isotropic(capsys):
    code, out, _ = run(["sweep", "--family", "isotropic", "--d", "3"], capsys)
    assert code == 0
    res = json.loads(out)["result"]
    assert res["separable"]["upper"] == pytest.approx(0.25, abs=1e-6)
    assert res["ppt"]["upper"] == pytest.approx(0.25, abs=1e-6)
    assert res["expected"]["separable"] == [0.0, 0.25]


def test_sweep_werner_text(capsys):
    code, out, _ = run(["sweep", "--family", "werner", "--d", "3", "--format", "text"], capsys)
    assert code == 0
    assert "separable: [0.0000000000, 0.50000000" in out
    assert "check separable_matches_expected: pass" in out


def test_sweep_horodecki_upper_edges(capsys):
    code, out, _ = run(["sweep", "--family", "horodecki"], capsys)
    res = json.loads(out)["result"]
    assert res["separable"]["upper"] == pytest.approx(3.0, abs=1e-6)
    assert res["ppt"]["upper"] == pytest.approx(4.0, abs=1e-6)


def test_sweep_rejects_fine_precision(capsys):
    code, _, _ = run(["sweep", "--family", "isotropic", "--precision", "1e-12"], capsys)
    assert code == 2


def test_render_golden(capsys):
    code, out, _ = run(["render", "--d", "3"], capsys)
    assert code == 0
    assert out == (DATA / "m3_identity.txt").read_text()


def test_render_gf4_and_svg(tmp_path, capsys):
    _, out, _ = run(["render", "--gf", "4"], capsys)
    assert len(out.splitlines()) == 16
    svg = tmp_path / "m.svg"
    assert main(["render", "--d", "2", "--svg", "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")


def _subprocess(args, env_extra=None):
    env = dict(os.environ)
    env.pop("CIRCSEP_NO_COLOR", None)
    env.update(env_extra or {})
    return subprocess.run([sys.executable, "-m", "circsep", *args], capture_output=True, text=True, env=env)


def test_color_and_no_color_env():
    args = ["analyze", "--family", "isotropic", "--lambda", "0.2", "--format", "text"]
    colored = _subprocess(args)
    plain = _subprocess(args, {"CIRCSEP_NO_COLOR": "1"})
    assert colored.returncode == plain.returncode == 0
    assert "\x1b[" in colored.stdout
    assert "\x1b[" not in plain.stdout
    assert "verdict: separable" in plain.stdout


def test_numerical_failure_exit_3(monkeypatch, capsys):
    import circsep.cli as cli

    def boom(*a, **k):
        raise ArithmeticError("Jacobi iteration did not converge")

    monkeypatch.setattr(cli, "analyze", boom)
    code, _, err = run(["analyze", "--family", "isotropic", "--lambda", "0.2"], capsys)
    assert code == 3 and "numerical failure" in err
