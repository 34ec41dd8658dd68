import json
import subprocess
import sys

import pytest

from selab import cli
from selab.core import ProblemSpec, RadialProfile
from selab.radial import ShootingConfig, shoot_radial


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_int_range_and_float_list():
    assert cli.int_range("2..5") == [2, 3, 4, 5]
    assert cli.int_range("0,2,5") == [0, 2, 5]
    assert cli.float_list("0.5, 1,2") == [0.5, 1.0, 2.0]


def test_radial_shot_csv(tmp_path, capsys):
    out = tmp_path / "p.csv"
    assert run("radial", "--n", 2, "--tau", 0, "--a", 1, "--rmax", 10, "--out", out) == 0
    prof = RadialProfile.from_csv(str(out), 2, 0.0)
    assert prof.u[-1] == pytest.approx(26.0, rel=1e-10)
    man = json.loads((tmp_path / "p.csv.manifest.json").read_text())
    assert man["exit_code"] == 0 and man["command"] == "radial" and str(out) in man["outputs"]


def test_radial_stdout_and_quiet(capsys):
    assert run("radial", "--n", 3, "--tau", -1, "--a", 1, "--rmax", 1, "--points", 5) == 0
    assert capsys.readouterr().out.startswith("r,u,du\n")
    assert run("--quiet", "radial", "--n", 3, "--tau", -1, "--a", 1, "--rmax", 1, "--points", 5) == 0
    assert capsys.readouterr().out == ""


def test_radial_bvp_failure_exit_two(tmp_path):
    out = tmp_path / "p.csv"
    assert run("radial", "--n", 3, "--tau", -1, "--bvp", 1, 1e-6, "--out", out) == 2
    diag = json.loads((tmp_path / "p.csv.diagnostic.json").read_text())
    assert diag["error"] == "NoSolutionInBracket"
    man = json.loads((tmp_path / "p.csv.manifest.json").read_text())
    assert man["exit_code"] == 2 and "NoSolutionInBracket" in man["message"]


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        run("radial", "--tau", "abc")
    assert exc.value.code == 1
    assert run("radial", "--tau", -1, "--a", 1) == 1  # missing --n
    assert run("radial", "--n", 2, "--tau", 0.5, "--a", 1, "--rmax", 1) == 1  # positive tau
    assert run("thresholds", "--tau", 0.5) == 1
    with pytest.raises(SystemExit) as exc:
        run()
    assert exc.value.code == 1


def test_dirichlet_with_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 2\ntau = -1\nboundary = 2\ngrid_points = 11\nmethod = monotone\n")
    out = tmp_path / "u.json"
    assert run("--config", cfg, "dirichlet", "--method", "newton", "--out", out) == 0
    d = json.loads(out.read_text())
    assert d["config"]["method"] == "newton"
    assert d["max_residual"] < 1e-8 and 0 < d["min_u"] < 2


def test_audit_exit_codes(tmp_path):
    prof = shoot_radial(ProblemSpec(2, -1.0), ShootingConfig(a=2.0, r_max=100.0, num_points=2001))
    src = tmp_path / "p.csv"
    prof.to_csv(src)
    rep = tmp_path / "audit.json"
    assert run("audit", "--input", src, "--n", 2, "--tau", -1, "--report", rep) == 0
    records = json.loads(rep.read_text())["reports"]
    assert [r["check"] for r in records] == ["gradient", "l1", "growth"]
    assert all(r["pass"] for r in records)
    assert run("audit", "--input", src, "--n", 2, "--tau", -1, "--checks", "bogus") == 1
    # tau = -1 makes the Pohozaev integrals undefined: recorded as a failed check
    assert run("audit", "--input", src, "--n", 2, "--tau", -1, "--checks", "pohozaev", "--report", rep) == 2
    assert json.loads(rep.read_text())["reports"][0]["pass"] is False


def test_spectrum(tmp_path):
    out = tmp_path / "s.json"
    assert run("spectrum", "--n", 2, "--tau", -1, "--R", 54.6, "--r0", 1, "--out", out) == 0
    d = json.loads(out.read_text())
    assert d["morse_index"] == 1  # log 54.6 ~ 4 lies between pi and 2 pi


def test_integral_success_and_failure(tmp_path):
    out = tmp_path / "i.json"
    assert run("integral", "--n", 2, "--mu", 1, "--tau", -1, "--h", "gauss:10,2",
               "--points", 21, "--tol", 1e-9, "--out", out) == 0
    d = json.loads(out.read_text())
    assert d["residual"] < 1e-9 and d["min_u"] > 0 and d["max_u_minus_h"] < 0
    assert run("integral", "--n", 2, "--mu", 1, "--tau", -1, "--h", "const:1e-6",
               "--points", 11, "--out", out) == 2
    assert json.loads(out.read_text())["error"] == "NoPositiveSolution"
    assert run("integral", "--n", 2, "--mu", 1, "--tau", -1, "--h", "wave:1") == 1


def test_thresholds_table(capsys):
    assert run("thresholds", "--tau", -1, "--n", "2..8") == 0
    text = capsys.readouterr().out
    rows = cli.thresholds_table(-1.0, range(2, 9), 1.0)["rows"]
    stable = {r["n"]: r["stable"] for r in rows}
    assert stable[7] is True and stable[6] is False
    assert "6.828427" in text


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "selab.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "selab" in proc.stdout
