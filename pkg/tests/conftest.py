import numpy as np
import pytest

from gravwave.discretization import Field, GridSpec, MollifierSpec
from gravwave.model import Parameters


def bisect(fn, lo, hi, iters=200):
    """Plain bisection; used as an oracle independent of the library root finders."""
    flo = fn(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def random_field(grid, params, rng, lo=-0.2, hi=1.2):
    v = rng.uniform(lo, hi, grid.shape)
    v[0] = 1.0
    return Field(grid, params, v)


@pytest.fixture
def p62():
    return Parameters(6, 2)


@pytest.fixture
def grid_small():
    return GridSpec(32, 64, 4.0)


@pytest.fixture
def ms05():
    return MollifierSpec(0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# -- expensive runs, computed once per session and shared with the acceptance suite

import time

from gravwave.minmax.pipeline import MinmaxConfig, continuation, find_saddle, refine_flat

RUN_PARAMS = Parameters(6, 2)
RUN_GRID = GridSpec(64, 128, 4.0)
RUN_SEED = 7
CONTINUATION_EPS = [0.1, 0.05, 0.025, 0.0125]


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


@pytest.fixture(scope="session")
def minmax_run():
    return _timed(lambda: find_saddle(RUN_PARAMS, RUN_GRID, MollifierSpec(0.05), MinmaxConfig(seed=RUN_SEED)))


@pytest.fixture(scope="session")
def symmetric_run():
    cfg = MinmaxConfig(seed=RUN_SEED, symmetrize=True)
    return _timed(lambda: find_saddle(RUN_PARAMS, RUN_GRID, MollifierSpec(0.05), cfg))


@pytest.fixture(scope="session")
def continuation_run():
    cfg = MinmaxConfig(seed=RUN_SEED, symmetrize=True)
    return _timed(lambda: continuation(CONTINUATION_EPS, RUN_PARAMS, RUN_GRID, cfg))


@pytest.fixture(scope="session")
def flat_plus_run():
    ms = MollifierSpec(0.05)
    return _timed(lambda: refine_flat(RUN_PARAMS, RUN_GRID, ms))


# -- one summary line per acceptance criterion

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
