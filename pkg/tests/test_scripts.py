import runpy
import sys
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def _run(name, args, monkeypatch):
    monkeypatch.setattr(sys, "argv", [name] + args)
    runpy.run_path(str(SCRIPTS / name), run_name="__main__")


def test_thresholds_script(monkeypatch, capsys):
    _run("thresholds_table.py", ["--taus=-1", "--n-max", "8"], monkeypatch)
    assert "n* = 6.828427" in capsys.readouterr().out


def test_morse_growth_script(monkeypatch, capsys):
    _run("morse_growth.py", ["--samples", "3", "--log-max", "7", "--N", "400"], monkeypatch)
    lines = capsys.readouterr().out.strip().splitlines()[1:]
    for line in lines:
        _, idx, expected = line.split()
        assert idx == expected


def test_touchdown_script(monkeypatch, capsys):
    _run("touchdown_sweep.py", ["--points", "11", "--b-hi", "2", "--b-lo", "1.5", "--steps", "4"], monkeypatch)
    cap = capsys.readouterr()
    assert cap.out.count(",ok") == 4
    assert "grid b* = 1.5" in cap.err
