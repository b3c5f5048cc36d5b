import json
import re
import shutil
import subprocess

import numpy as np
import pytest

from symrad import fileio
from symrad.cli import main


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gaussian_example(work, capsys):
    code, out, _ = run(capsys, "gaussian", "--V", "1", "--W", "0", "--hbar", "1", "--axis", "-8:8:256", "-o", "psi.wf1")
    assert code == 0 and out.strip() == "norm=1.000000"
    psi = fileio.read_wf1(work / "psi.wf1")
    assert psi.values.shape == (256,)


def test_sinogram_invert_pipeline(work, capsys):
    run(capsys, "gaussian", "--V", "1", "--W", "0", "--axis", "-8:8:256", "-o", "psi.wf1")
    code, out, _ = run(capsys, "sinogram", "-i", "psi.wf1", "--angles", "180", "--X", "-8:8:256", "-o", "s.csv")
    assert code == 0 and "angles=180" in out
    code, out, _ = run(capsys, "invert", "-i", "s.csv", "-o", "w.wg1", "--oracle", "gaussian:1:0")
    assert code == 0
    err = float(re.search(r"rel_l2_error=(\S+)", out).group(1))
    assert err <= 1e-2
    Wf = fileio.read_wg1(work / "w.wg1")
    assert Wf.values.shape == (128, 128)


def test_wigner_radon_pauli(work, capsys):
    run(capsys, "gaussian", "--V", "0.5", "--W", "-0.5", "--axis", "-8:8:256", "-o", "psi.wf1")
    code, out, _ = run(capsys, "wigner", "-i", "psi.wf1", "-o", "w.wg1")
    assert code == 0 and abs(float(re.search(r"integral=(\S+)", out).group(1)) - 1) < 1e-6
    code, out, _ = run(capsys, "radon", "-i", "psi.wf1", "--A", "0.6", "--B", "0.8", "-o", "r.csv")
    assert code == 0 and abs(float(re.search(r"integral=(\S+)", out).group(1)) - 1) < 1e-4
    assert (work / "r.csv").read_text().splitlines()[0] == "X1,value"
    code, out, _ = run(capsys, "pauli", "--sxx", "1", "--sxp", "0.5")
    assert code == 0 and abs(float(re.search(r"sigma_xp=(\S+)", out).group(1)) - 0.5) < 1e-4
    code, out, _ = run(capsys, "pauli", "-i", "psi.wf1")
    assert code == 0 and abs(float(re.search(r"sigma_xp=(\S+)", out).group(1)) - 0.5) < 1e-3


def test_frame_json_and_config(work, capsys):
    run(capsys, "gaussian", "--axis", "-8:8:256", "-o", "psi.wf1")
    (work / "frame.json").write_text(json.dumps({"n": 1, "A": [[0.0]], "B": [[1.0]]}))
    code, _, _ = run(capsys, "radon", "-i", "psi.wf1", "--frame", "frame.json", "-o", "r.csv")
    assert code == 0
    (work / "job.json").write_text(json.dumps({"command": "gaussian", "V": "2", "axis": ["-8:8:256"], "output": "g.wf1"}))
    code, out, _ = run(capsys, "--config", "job.json")
    assert code == 0 and out.strip() == "norm=1.000000"
    psi = fileio.read_wf1(work / "g.wf1")
    x = psi.axes[0].points
    assert np.allclose(psi.density(), np.sqrt(2 / np.pi) * np.exp(-2 * x * x))
    # flags override config values
    code, _, _ = run(capsys, "--config", "job.json", "gaussian", "-o", "h.wf1")
    assert code == 0 and (work / "h.wf1").exists()
    (work / "bad.json").write_text(json.dumps({"command": "gaussian", "colour": 1}))
    code, _, err = run(capsys, "--config", "bad.json")
    assert code == 2 and "ValidationError" in err


def test_exit_codes(work, capsys):
    code, _, err = run(capsys, "gaussian", "--V", "1,2,3", "--axis", "-8:8:256", "-o", "x.wf1")
    assert code == 2 and err.startswith("error: ValidationError")
    code, _, err = run(capsys, "gaussian", "--V", "-1", "--axis", "-8:8:256", "-o", "x.wf1")
    assert code == 2 and "InvalidState" in err
    (work / "junk.wf1").write_bytes(b"JUNKJUNKJUNK")
    code, _, err = run(capsys, "wigner", "-i", "junk.wf1", "-o", "w.wg1")
    assert code == 2 and "BadMagic" in err
    code, _, err = run(capsys, "export", "-i", "junk.wf1", "-o", "j.csv")
    assert code == 2 and "BadMagic" in err
    code, _, err = run(capsys, "wigner", "-i", "missing.wf1", "-o", "w.wg1")
    assert code == 2
    run(capsys, "gaussian", "--V", "1", "--W", "40", "--axis", "-8:8:256", "-o", "chirp.wf1")
    code, _, err = run(capsys, "wigner", "-i", "chirp.wf1", "-o", "w.wg1")
    assert code == 3 and "GridTooCoarse" in err
    run(capsys, "gaussian", "--axis", "-8:8:256", "-o", "psi.wf1")
    run(capsys, "sinogram", "-i", "psi.wf1", "--angles", "20", "-o", "s.csv")
    code, _, err = run(capsys, "invert", "-i", "s.csv", "-o", "w.wg1")
    assert code == 2 and "TooFewAngles" in err


def test_coverage_warning_goes_to_stderr(work, capsys):
    code, _, err = run(capsys, "gaussian", "--V", "0.05", "--axis", "-8:8:256", "-o", "wide.wf1")
    assert code == 0 and err.startswith("warning: BadCoverage")


def test_export(work, capsys):
    run(capsys, "gaussian", "--axis", "-8:8:256", "-o", "psi.wf1")
    code, out, _ = run(capsys, "export", "-i", "psi.wf1", "-o", "psi.csv")
    assert code == 0 and out.strip() == "rows=256"
    assert len((work / "psi.csv").read_text().splitlines()) == 257
    run(capsys, "wigner", "-i", "psi.wf1", "--p", "-8:8:128", "-o", "w.wg1")
    code, out, _ = run(capsys, "export", "-i", "w.wg1", "-o", "w.csv")
    assert code == 0 and len((work / "w.csv").read_text().splitlines()) == 256 * 128 + 1


def _pipeline(capsys, tag):
    run(capsys, "gaussian", "--V", "1.5", "--W", "0.3", "--axis", "-8:8:256", "-o", f"psi{tag}.wf1")
    run(capsys, "wigner", "-i", f"psi{tag}.wf1", "-o", f"w{tag}.wg1")
    run(capsys, "sinogram", "-i", f"psi{tag}.wf1", "--angles", "64", "-o", f"s{tag}.csv")
    run(capsys, "invert", "-i", f"s{tag}.csv", "-o", f"r{tag}.wg1")
    return [f"psi{tag}.wf1", f"w{tag}.wg1", f"s{tag}.csv", f"r{tag}.wg1"]


def test_byte_identical_across_runs_and_threads(work, capsys, monkeypatch):
    monkeypatch.setenv("SYMRAD_THREADS", "1")
    a = _pipeline(capsys, "a")
    b = _pipeline(capsys, "b")
    monkeypatch.setenv("SYMRAD_THREADS", "3")
    c = _pipeline(capsys, "c")
    for x, y, z in zip(a, b, c):
        assert (work / x).read_bytes() == (work / y).read_bytes() == (work / z).read_bytes()


def test_validate(work, capsys):
    code, out, _ = run(capsys, "validate")
    lines = out.strip().splitlines()
    assert code == 0
    assert sum(line.startswith("PASS") for line in lines) == 8
    assert lines[-1] == "passed=8/8"


def test_validate_failure_exit_code(work, capsys, monkeypatch):
    from symrad import validation

    monkeypatch.setattr(validation, "CHECKS", [lambda: validation.CheckResult("broken", 1.0, 0.1)])
    code, out, _ = run(capsys, "validate")
    assert code == 3 and out.startswith("FAIL broken")


@pytest.mark.skipif(shutil.which("symrad") is None, reason="console script not installed")
def test_console_script(work):
    res = subprocess.run(["symrad", "gaussian", "--axis", "-8:8:256", "-o", "psi.wf1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.strip() == "norm=1.000000"
