import os

import pytest

os.environ.setdefault("SELAB_SEED", "12345")

CRITERIA = {
    1: "singular-solution oracle and printed-constant golden report",
    2: "quadratic family under the discrete Laplacian",
    3: "Dirichlet solver convergence",
    4: "gradient estimate audit",
    5: "L1 lower bound",
    6: "growth bound",
    7: "Pohozaev / Liouville",
    8: "spectral thresholds against the Hardy oracle",
    9: "Morse-index growth in two dimensions",
    10: "touchdown continuation",
    11: "integral equation and symmetry",
    12: "scale invariance of audit constants",
}

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    k = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _outcomes.setdefault(k, []).append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(CRITERIA):
        runs = _outcomes.get(k)
        if not runs:
            tr.write_line(f"criterion {k:2d}  NOT RUN  {CRITERIA[k]}")
            continue
        ok = all(o == "passed" for _, o in runs)
        failed = [name for name, o in runs if o != "passed"]
        line = f"criterion {k:2d}  {'PASS' if ok else 'FAIL'}  {CRITERIA[k]}"
        if failed:
            line += "  (failing: " + ", ".join(failed) + ")"
        tr.write_line(line)
