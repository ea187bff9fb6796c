import itertools

import pytest


def generate_group(generators, window):
    """Brute-force the subgroup spanned by ``generators`` inside [-window, window]^2.

    Independent of the normal form: it only adds integer combinations.
    """
    pts = {(0, 0)}
    gens = [g for g in generators if tuple(g) != (0, 0)]
    if not gens:
        return pts
    # breadth-first closure restricted to a padded box
    pad = window + sum(abs(x) + abs(y) for x, y in gens)
    frontier = [(0, 0)]
    while frontier:
        nxt = []
        for k, l in frontier:
            for x, y in gens:
                for s in (1, -1):
                    p = (k + s * x, l + s * y)
                    if abs(p[0]) <= pad and abs(p[1]) <= pad and p not in pts:
                        pts.add(p)
                        nxt.append(p)
        frontier = nxt
    return {p for p in pts if abs(p[0]) <= window and abs(p[1]) <= window}


def box(lo, hi):
    return itertools.product(range(lo, hi), repeat=2)


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "SUMMARY", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
