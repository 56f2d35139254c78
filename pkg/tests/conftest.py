import math

import numpy as np
import pytest


def hexagon_slack_matrix():
    """Facet-by-vertex slack matrix of the regular hexagon, built from its geometry.

    Vertex j sits at angle j*pi/3; facet i joins vertices i and i+1, with
    outward normal at angle (i + 1/2)*pi/3 and offset cos(pi/6). Entries are
    offset - normal . vertex, rescaled so the smallest positive slack is 1.
    """
    verts = [(math.cos(j * math.pi / 3), math.sin(j * math.pi / 3)) for j in range(6)]
    b = math.cos(math.pi / 6)
    S = np.zeros((6, 6))
    for i in range(6):
        ang = (i + 0.5) * math.pi / 3
        n = (math.cos(ang), math.sin(ang))
        for j, v in enumerate(verts):
            S[i, j] = b - (n[0] * v[0] + n[1] * v[1])
    S[np.abs(S) < 1e-12] = 0.0
    return S / S[S > 0].min()


@pytest.fixture
def hexagon():
    S = np.round(hexagon_slack_matrix(), 12)
    return S


def write_jester(path, rows):
    """Rows are lists of ratings; the leading rated-count column is filled in."""
    lines = []
    for r in rows:
        n_rated = sum(1 for x in r if x != 99)
        lines.append(",".join([str(n_rated)] + [repr(float(x)) for x in r]))
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def jester_file(tmp_path):
    rng = np.random.default_rng(7)
    rows = []
    for u in range(40):
        r = list(np.round(rng.uniform(-10, 10, 24), 2))
        if u % 5 == 0:
            r[3] = 99
        rows.append(r)
    rows[1][:3] = [-10, 0, 10]
    return write_jester(tmp_path / "jester.csv", rows)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _report(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        assert ok, line

    return _report


def _criterion_key(line):
    tag = line.split()[1].rstrip(":")
    digits = tag.rstrip("abcdefghijklmnopqrstuvwxyz")
    return int(digits), tag[len(digits):]


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=_criterion_key):
            terminalreporter.write_line(line)
