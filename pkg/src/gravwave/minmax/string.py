"""String method with a climbing image for the mountain pass of E_eps.

Each sweep takes one preconditioned descent step per interior node (M_u
metric, energy backtracking per node), then redistributes the nodes along
the polyline by monotone cubic interpolation.  Arclength is measured in the
Dirichlet metric and weighted by node energy so that the high part of the
path stays resolved.  After ``climb_after`` sweeps the highest node climbs:
its step component along the path tangent is reversed and the two halves
of the path are redistributed separately so the climbing node stays put.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..discretization import Field, MollifierSpec, y_profile
from ..energy import Problem
from ..errors import InvariantViolationError
from .operators import AbsPreconditioner, flat, unflat, weighted_gradient
from .types import PathState

log = logging.getLogger(__name__)


@dataclass
class StringConfig:
    max_iter: int = 300
    tol: float = 1e-3            # residual of the climbing node
    tau: float = 0.5
    climb_after: int = 50
    energy_weight: float = 10.0
    max_climb_step: float = 0.05  # cap on the climbing step, Dirichlet norm
    endpoint_tol: float = 1e-12


def _field_mode(grid, t: float, kick: float) -> np.ndarray:
    bump = np.sin(np.pi * grid.y / grid.Ly)[:, None] * np.cos(2.0 * np.pi * grid.x)[None, :]
    return kick * np.sin(np.pi * t) * bump


def _path(nodes: list[Field], P: Problem, it: int = 0) -> PathState:
    E = np.array([P.energy(f.values) for f in nodes])
    k = 1 + int(np.argmax(E[1:-1]))
    return PathState(nodes, E, k, iterations=it)


def init_path(a: Field, b: Field, n: int = 17, kickAmp: float = 1e-2, mode: str = "linear",
              ms: MollifierSpec | None = None) -> PathState:
    """Nodes joining a (near U-) to b (near U-infinity), interior nodes kicked
    by kickAmp cos(2 pi x) sin(pi y/Ly) sin(pi t).

    mode "linear" interpolates a and b.  mode "flat" walks the flat family
    (1 - s y)_+ with s from 1/Y(a) down to 0, which already crosses the
    ridge near U+ (a straight segment cannot: all its interior nodes are
    positive where the weight is, so they sit in the U-infinity valley).
    """
    if n < 8:
        raise ValueError(f"a path needs at least 8 nodes, got {n}")
    grid = a.grid
    ts = np.linspace(0.0, 1.0, n)
    nodes = [a.copy()]
    if mode == "linear":
        for t in ts[1:-1]:
            nodes.append(a.with_values((1 - t) * a.values + t * b.values + _field_mode(grid, t, kickAmp)))
    elif mode == "flat":
        # depth of a from its bottom slope: (1 - y/Y)' = -1/Y
        drop = 1.0 - float(np.mean(a.values[1]))
        Y = grid.hy / drop if drop > grid.hy / grid.Ly else grid.Ly
        for t in ts[1:-1]:
            s = (1.0 - t) / Y
            prof = y_profile(grid, 1.0 / s) if s > 0 else np.ones(grid.ny + 1)
            nodes.append(a.with_values(np.repeat(prof[:, None], grid.nx, axis=1) + _field_mode(grid, t, kickAmp)))
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    nodes.append(b.copy())
    P = Problem(grid, a.params, ms) if ms is not None else None
    if P is None:
        return PathState(nodes, np.full(n, np.nan), n // 2)
    return _path(nodes, P)


def _redistribute(P: Problem, arrs: list[np.ndarray], E: np.ndarray, weight: float) -> list[np.ndarray]:
    if len(arrs) <= 2:
        return arrs
    span = max(E.max() - E.min(), 1e-300)
    e = (E - E.min()) / span
    seg = []
    for k in range(len(arrs) - 1):
        d = arrs[k + 1] - arrs[k]
        seg.append(np.sqrt(max(P.metric(d, d), 0.0)) * (1.0 + weight * 0.5 * (e[k] + e[k + 1])))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] <= 0:
        return arrs
    keep = np.concatenate([[True], np.diff(s) > 1e-14 * s[-1]])
    s = s[keep] / s[-1]
    stack = np.array(arrs)[keep]
    if len(s) < 2:
        return arrs
    new = PchipInterpolator(s, stack, axis=0)(np.linspace(0.0, 1.0, len(arrs)))
    new[0], new[-1] = arrs[0], arrs[-1]
    new[:, 0, :] = arrs[0][0]
    return list(new)


def relax_path(ps: PathState, ms: MollifierSpec, cfg: StringConfig | None = None,
               rearrange=None) -> PathState:
    """Relax ps toward a minimal energy path; see module docstring.

    ``rearrange`` (array -> array) is applied to every interior node after
    each sweep; the symmetric pipeline passes the Steiner rearrangement.
    """
    cfg = cfg or StringConfig()
    first = ps.nodes[0]
    grid = first.grid
    P = Problem(grid, first.params, ms)
    u = [np.array(f.values, dtype=float) for f in ps.nodes]
    a0, b0 = u[0].copy(), u[-1].copy()
    n = len(u)
    taus = np.full(n, cfg.tau)
    E = np.array([P.energy(x) for x in u])
    history = []
    descent_history = []
    rearrange_history = []
    climbing = False
    k = 1 + int(np.argmax(E[1:-1]))
    it = 0
    for it in range(1, cfg.max_iter + 1):
        k = 1 + int(np.argmax(E[1:-1]))
        climbing = it > cfg.climb_after
        before = float(E[1:-1].max())
        for j in range(1, n - 1):
            prec = AbsPreconditioner(P, u[j])
            g = weighted_gradient(P, u[j])
            d = prec.solve(g)
            if climbing and j == k:
                t = flat(u[j + 1] - u[j - 1])
                tt = prec.inner(t, t)
                if tt > 0:
                    d = d - 2.0 * float(g @ t) / tt * t
                step = cfg.tau * d
                size = np.sqrt(max(prec.inner(step, step), 0.0))
                if size > cfg.max_climb_step:
                    step *= cfg.max_climb_step / size
                u[j] = u[j] - unflat(step, grid)
                E[j] = P.energy(u[j])
                continue
            D = unflat(d, grid)
            tau = min(cfg.tau, 2.0 * taus[j])
            while True:
                trial = u[j] - tau * D
                Et = P.energy(trial)
                if Et <= E[j] or tau < 1e-6:
                    break
                tau *= 0.5
            taus[j] = tau
            if Et <= E[j]:
                u[j], E[j] = trial, Et
        if not climbing:
            descent_history.append((before, float(E[1:-1].max())))
        if climbing and 1 < k < n - 2:
            left = _redistribute(P, u[: k + 1], E[: k + 1], cfg.energy_weight)
            right = _redistribute(P, u[k:], E[k:], cfg.energy_weight)
            u = left[:-1] + [u[k]] + right[1:]
        elif not climbing:
            u = _redistribute(P, u, E, cfg.energy_weight)
        E = np.array([P.energy(x) for x in u])
        if rearrange is not None:
            for j in range(1, n - 1):
                v = rearrange(u[j])
                Ev = P.energy(v)
                rearrange_history.append((float(E[j]), Ev))
                u[j], E[j] = v, Ev
        history.append(float(E[1:-1].max()))
        if (np.max(np.abs(u[0] - a0)) > cfg.endpoint_tol
                or np.max(np.abs(u[-1] - b0)) > cfg.endpoint_tol):
            raise InvariantViolationError("path endpoints drifted during relaxation")
        if climbing:
            kk = 1 + int(np.argmax(E[1:-1]))
            r = P.residual_norm(u[kk])
            if it % 10 == 0:
                log.debug("string %d: climbing node %d E %.8f residual %.3e", it, kk, E[kk], r)
            if r <= cfg.tol:
                break
    nodes = [ps.nodes[0]] + [first.with_values(x, eps=ms.eps) for x in u[1:-1]] + [ps.nodes[-1]]
    out = PathState(nodes, E, 1 + int(np.argmax(E[1:-1])), iterations=it, history=history)
    out.climbing = climbing
    out.descent_history = descent_history
    out.rearrange_history = rearrange_history
    return out
