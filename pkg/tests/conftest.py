from __future__ import annotations

import math

import numpy as np
import pytest

from chordwalk.geometry import BodyMetadata, Polytope


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def triangle(adapted: bool = False) -> Polytope:
    """Triangle with corners A=(0,0), B=(2,1), C=(1,2).

    The axis basis cannot leave corner A; the basis along (1,1) and (1,-1)
    can.
    """
    A = [[1.0, -2.0], [-2.0, 1.0], [1.0, 1.0]]
    b = [0.0, 0.0, 3.0]
    s = 1 / math.sqrt(2)
    basis = np.array([[s, s], [s, -s]]) if adapted else np.eye(2)
    meta = BodyMetadata(d=2, x_star=np.array([1.0, 1.0]), r=1 / math.sqrt(5), R=math.sqrt(2), k=None, basis=basis)
    return Polytope(A, b, meta)


CORNER_A = np.array([0.0, 0.0])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        checks = results[k]
        ok = all(c[1] for c in checks)
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}")
        for label, passed, detail in checks:
            terminalreporter.write_line(f"    {'ok  ' if passed else 'FAIL'} {label}: {detail}")
