"""Checks of the structural properties of computed solutions: bounds, the
gradient bound |grad u|^2 <= (A - B y)_+, the empty region above A/B, the
free-boundary curve and the Bernoulli residual on it.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .discretization import Field, field_weight


@dataclass
class FreeBoundaryCurve:
    samples: list[tuple[float, float]]   # (y, x), x in [0, 1/2]
    thetaLevel: float
    method: str = "LevelCrossing"
    graphViolations: int = 0
    rowSamples: int = 0                  # samples found along rows (the graph x = f(y))
    # wet node and one-sided direction behind each sample, for the residual
    anchors: list[tuple[int, int, int, int]] = field(default_factory=list, repr=False)

    def to_csv(self) -> str:
        lines = ["y,x"] + [f"{y:.17g},{x:.17g}" for y, x in self.samples]
        return "\n".join(lines) + "\n"


@dataclass
class DiagnosticsReport:
    minValue: float
    maxValue: float
    bernsteinExcess: float
    vacuumMass: float
    bernoulliResidualMedian: float
    bernoulliResidualMax: float
    lipschitzNorm: float
    graphViolations: int
    theta: float
    samples: int
    amplitude: float
    cuspSlope: float
    thetaSensitivity: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


def bounds_check(f: Field) -> tuple[float, float]:
    v = f.values
    return float(v.min()), float(v.max())


def _centered_grad_sq(f: Field) -> np.ndarray:
    """|grad u|^2 by centred differences on rows 1..ny-1."""
    u, g = f.values, f.grid
    ux = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1))[1:-1] / (2 * g.hx)
    uy = (u[2:] - u[:-2]) / (2 * g.hy)
    return ux * ux + uy * uy


def bernstein_check(f: Field) -> float:
    """max over interior nodes of |grad u|^2 - (A - B y)_+."""
    w = field_weight(f.grid, f.params)[1:-1]
    return float(np.max(_centered_grad_sq(f) - w))


def lipschitz_norm(f: Field) -> float:
    return float(np.sqrt(np.max(_centered_grad_sq(f))))


def vacuum_check(f: Field) -> float:
    """W-weighted sum of u^2 over the rows with y >= A/B."""
    g = f.grid
    rows = g.y >= f.params.height - 1e-12 * g.Ly
    W = g.weights()
    return float(np.sum((W * f.values * f.values)[rows]))


def extract_free_boundary(f: Field, theta: float | None = None) -> FreeBoundaryCurve:
    """Level-theta crossings on the half period 0 <= x <= 1/2.

    Along each row the first wet-to-dry crossing gives a sample of the graph
    x = f(y); rows with more than one crossing count as graph violations.
    Along each column the wet-to-dry crossings in y are added too, so that
    nearly horizontal stretches of the surface (and flat waves) are sampled.
    """
    g = f.grid
    u = f.values
    theta = _default_theta(f) if theta is None else float(theta)
    cols = (g.center + np.arange(g.nx // 2 + 1)) % g.nx
    xs = np.arange(g.nx // 2 + 1) * g.hx
    ytop = f.params.height
    samples, anchors = [], []
    violations = 0
    rows = 0
    half = u[:, cols]
    for j in range(1, g.ny + 1):
        if g.y[j] > ytop + g.hy:
            break
        row = half[j] - theta
        wet = row >= 0
        flips = np.nonzero(wet[:-1] != wet[1:])[0]
        if len(flips) == 0:
            continue
        if len(flips) > 1:
            violations += 1
        i = flips[0]
        a, b = row[i], row[i + 1]
        x = xs[i] + g.hx * a / (a - b)
        samples.append((float(g.y[j]), float(x)))
        # wet node next to the crossing and its neighbour further inside the wet part
        gi = int(cols[i] if wet[i] else cols[i + 1])
        inner = (gi - 1) % g.nx if wet[i] else (gi + 1) % g.nx
        anchors.append((j, gi, 0, inner))
        rows += 1
    for c_local, i in enumerate(cols):
        col = u[:, i] - theta
        for j in range(g.ny):
            if g.y[j] > ytop + g.hy:
                break
            if col[j] >= 0 > col[j + 1]:
                y = g.y[j] + g.hy * col[j] / (col[j] - col[j + 1])
                samples.append((float(y), float(xs[c_local])))
                anchors.append((j, int(i), 1, -1))
    return FreeBoundaryCurve(samples, theta, "LevelCrossing", violations, rows, anchors)


def _default_theta(f: Field) -> float:
    if f.eps is not None:
        return float(f.eps)
    return 1e-12


def bernoulli_residual(f: Field, fb: FreeBoundaryCurve) -> tuple[float, float]:
    """(median, max) of | |grad u|^2 - (A - B y) | at the samples, with
    one-sided differences taken inside the wet region."""
    if not fb.samples:
        raise ValueError("free-boundary curve is empty")
    g, p, u = f.grid, f.params, f.values
    res = []
    for (y, _x), (j, i, kind, other) in zip(fb.samples, fb.anchors):
        if kind == 0:
            # row sample: x-difference towards the wet interior, y-difference downwards
            ux = (u[j, i] - u[j, other]) / g.hx
            uy = (u[j, i] - u[j - 1, i]) / g.hy
        else:
            # column sample at wet node (j, i): y-difference downwards, x centred
            uy = (u[j, i] - u[j - 1, i]) / g.hy if j > 0 else (u[1, i] - u[0, i]) / g.hy
            ux = (u[j, (i + 1) % g.nx] - u[j, (i - 1) % g.nx]) / (2 * g.hx)
        res.append(abs(ux * ux + uy * uy - (p.A - p.B * y)))
    res = np.array(res)
    return float(np.median(res)), float(np.max(res))


def _curve_stats(fb: FreeBoundaryCurve) -> tuple[float, float]:
    if not fb.samples:
        return float("nan"), float("nan")
    ys = np.array([s[0] for s in fb.samples])
    amplitude = float(ys.max() - ys.min())
    rows = sorted(fb.samples[: fb.rowSamples], key=lambda s: s[1])
    if len(rows) >= 2:
        (y1, x1), (y2, x2) = rows[-2], rows[-1]
        slope = (x2 - x1) / (y2 - y1) if y2 != y1 else float("inf")
    else:
        slope = float("nan")
    return amplitude, float(slope)


def diagnose(f: Field, theta: float | None = None) -> DiagnosticsReport:
    theta = _default_theta(f) if theta is None else float(theta)
    lo, hi = bounds_check(f)
    fb = extract_free_boundary(f, theta)
    if fb.samples:
        med, mx = bernoulli_residual(f, fb)
    else:
        med = mx = float("nan")
    sens = {}
    for t in (0.5 * theta, 2.0 * theta):
        c = extract_free_boundary(f, t)
        sens[f"{t:.6g}"] = bernoulli_residual(f, c)[0] if c.samples else None
    amplitude, slope = _curve_stats(fb)
    return DiagnosticsReport(
        minValue=lo, maxValue=hi,
        bernsteinExcess=bernstein_check(f),
        vacuumMass=vacuum_check(f),
        bernoulliResidualMedian=med, bernoulliResidualMax=mx,
        lipschitzNorm=lipschitz_norm(f),
        graphViolations=fb.graphViolations,
        theta=theta, samples=len(fb.samples),
        amplitude=amplitude, cuspSlope=slope,
        thetaSensitivity=sens,
    )


@dataclass
class BernsteinTrend:
    C: float            # smallest C with excess <= C (eps + h) at every sample
    slope: float        # least-squares slope of excess against eps
    decreasing: bool

    def to_dict(self) -> dict:
        return asdict(self)


def bernstein_trend(eps, h, excess) -> BernsteinTrend:
    """Trend of bernsteinExcess along an eps sequence on a grid of spacing h.

    The trend counts as decreasing when the excess at the smallest eps is
    below the one at the largest and the fitted slope in eps is positive.
    """
    eps = np.asarray(eps, dtype=float)
    excess = np.asarray(excess, dtype=float)
    if eps.size < 2:
        raise ValueError("need at least two eps values")
    pos = np.maximum(excess, 0.0)
    C = float(np.max(pos / (eps + h)))
    slope = float(np.polyfit(eps, excess, 1)[0])
    lo, hi = int(np.argmin(eps)), int(np.argmax(eps))
    return BernsteinTrend(C, slope, bool(excess[lo] < excess[hi] and slope > 0))
