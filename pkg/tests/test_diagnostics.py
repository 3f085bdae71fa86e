import numpy as np
import pytest

from gravwave import flatwaves as fw
from gravwave.diagnostics import (bernoulli_residual, bernstein_check, bernstein_trend, bounds_check, diagnose,
                                  extract_free_boundary, vacuum_check)
from gravwave.discretization import Field, GridSpec, embed_flat
from gravwave.model import Parameters

P62 = Parameters(6, 2)


def _minus(ny, nx=16):
    g = GridSpec(nx, ny, 4.0)
    return embed_flat(fw.branch(P62, "Minus"), g, P62)


def test_bounds():
    assert bounds_check(_minus(64)) == (0.0, 1.0)
    g = GridSpec(16, 32, 4.0)
    assert bounds_check(Field(g, P62, np.ones(g.shape))) == (1.0, 1.0)


def test_bernstein():
    assert bernstein_check(_minus(128)) <= 0.0
    g = GridSpec(16, 32, 4.0)
    steep = np.repeat((1 - 10 * g.y)[:, None], g.nx, axis=1)
    assert bernstein_check(Field(g, P62, steep)) > 0


def test_vacuum():
    assert vacuum_check(_minus(64)) == 0.0
    g = GridSpec(16, 32, 4.0)
    assert vacuum_check(Field(g, P62, np.ones(g.shape))) > 0


def test_flat_free_boundary_is_horizontal():
    f = _minus(128)
    fb = extract_free_boundary(f, 1e-12)
    ys = {round(y, 12) for y, _ in fb.samples}
    assert len(ys) == 1 and fb.graphViolations == 0
    assert abs(ys.pop() - fw.minus_root(P62)) < f.grid.hy


def test_theta_above_max_gives_empty_curve():
    fb = extract_free_boundary(_minus(64), 2.0)
    assert fb.samples == []
    assert np.isnan(diagnose(_minus(64), 2.0).bernoulliResidualMedian)


def test_bernoulli_residual_first_order():
    res = [bernoulli_residual(f, extract_free_boundary(f, 1e-12))[0] for f in map(_minus, (64, 128, 256, 512))]
    assert all(b < a for a, b in zip(res, res[1:]))
    assert res[-1] < 0.01


def test_free_boundary_csv():
    text = extract_free_boundary(_minus(64), 1e-12).to_csv()
    assert text.startswith("y,x\n") and len(text.splitlines()) > 1


def test_bernstein_trend():
    t = bernstein_trend([0.1, 0.05, 0.025], 0.03, [0.04, 0.02, 0.01])
    assert t.decreasing and t.slope > 0
    assert t.C == pytest.approx(max(0.04 / 0.13, 0.02 / 0.08, 0.01 / 0.055))
    assert not bernstein_trend([0.1, 0.05], 0.03, [0.01, 0.02]).decreasing
