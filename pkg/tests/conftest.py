from __future__ import annotations

import numpy as np
import pytest

from infconv import _backend
from infconv.grid import GridFunction, make_grid

BACKEND_NAMES = sorted(_backend.BACKENDS)


@pytest.fixture(params=BACKEND_NAMES)
def backend(request):
    return request.param


def random_grid_function(rng, spec, kind="mixed"):
    """Seeded random grid function: a bowl plus noise, sometimes with +inf holes."""
    x = spec.points()
    vals = 0.5 * rng.uniform(0.0, 2.0) * np.sum(x * x, axis=-1)
    vals = vals + rng.normal(0.0, 1.0, spec.shape)
    if kind == "mixed" and rng.random() < 0.3:
        holes = rng.random(spec.shape) < 0.1
        holes.flat[rng.integers(spec.size)] = False
        vals = np.where(holes, np.inf, vals)
    return GridFunction(spec, vals)


@pytest.fixture
def grid1():
    return make_grid(1, 6.0, 241)


@pytest.fixture
def grid2():
    return make_grid(2, 4.0, 81)


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
