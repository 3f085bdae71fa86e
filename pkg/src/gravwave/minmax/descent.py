"""Minimizers and min-mode following.

local_minimize: nonlinear conjugate gradients (Polak-Ribiere+) preconditioned
by the Dirichlet stiffness, finished by a few Newton steps once the iterate
sits in the quadratic basin.

minmode_descent: gradient flow with the component along the lowest Hessian
mode reversed.  It climbs along one direction and descends along the rest,
so it is attracted by index-1 saddles.
"""
from __future__ import annotations

import logging

import numpy as np

from ..discretization import Field, MollifierSpec
from ..energy import Problem
from ..errors import NonConvergenceError
from .morse import lanczos
from .newton import newton_solve
from .operators import AbsPreconditioner, flat, jacobian, unflat, weighted_gradient

log = logging.getLogger(__name__)


def _line_search(phi, dphi, phi0: float, d0: float, a0: float = 1.0,
                 c1: float = 1e-4, c2: float = 0.1, max_eval: int = 40) -> float | None:
    """Strong-Wolfe step by bracketing and safeguarded secant on phi'.

    Near roundoff the Armijo test loses meaning, so energy differences below
    1e-14 |phi0| count as no increase.
    """
    lo, dlo = 0.0, d0
    hi = dhi = None
    a = a0
    slack = 1e-14 * max(1.0, abs(phi0))
    for _ in range(max_eval):
        da = dphi(a)
        armijo = phi(a) <= phi0 + c1 * a * d0 + slack
        if armijo and abs(da) <= c2 * abs(d0):
            return a
        if armijo and da < 0:
            lo, dlo = a, da
        else:
            hi, dhi = a, (da if armijo else None)
        if hi is None:
            a *= 2.0
            continue
        if dhi is None:
            a = 0.5 * (lo + hi)
        else:
            a = lo - dlo * (hi - lo) / (dhi - dlo)
            width = hi - lo
            a = min(max(a, lo + 0.1 * width), hi - 0.1 * width)
    return lo if lo > 0 else None


def ncg_minimize(P: Problem, u: np.ndarray, tol: float, max_iter: int = 2000,
                 newton_switch: float = 1e-5) -> tuple[np.ndarray, float, int]:
    grid = P.grid
    op = P.dirichlet_op
    u = np.array(u, dtype=float)
    g = weighted_gradient(P, u)
    z = op.solve_flat(g)
    r = P.residual_norm(u)
    d = -z
    gz = g @ z
    it = 0
    while r > tol:
        if r <= newton_switch:
            break
        if it >= max_iter:
            raise NonConvergenceError(f"NCG hit {max_iter} iterations at residual {r:.3e}", last=u)
        if g @ d >= 0:
            d = -z
        D = unflat(d, grid)
        e0 = P.energy(u)
        a = _line_search(lambda t: P.energy(u + t * D),
                         lambda t: float(weighted_gradient(P, u + t * D) @ d),
                         e0, float(g @ d))
        if a is None:
            if np.array_equal(d, -z):
                break  # no progress even along the preconditioned gradient
            d = -z
            continue
        u = u + a * D
        g_new = weighted_gradient(P, u)
        z_new = op.solve_flat(g_new)
        beta = max(0.0, float(g_new @ (z_new - z)) / gz) if gz > 0 else 0.0
        g, z = g_new, z_new
        gz = g @ z
        d = -z + beta * d
        r = P.residual_norm(u)
        it += 1
    if r > tol:
        e_before = P.energy(u)
        u_new, r, k = newton_solve(P, u, tol=tol)
        if P.energy(u_new) > e_before + 1e-10 * max(1.0, abs(e_before)):
            raise NonConvergenceError("Newton polish left the basin of the minimizer", last=u)
        u, it = u_new, it + k
    return u, r, it


def local_minimize(f0: Field, ms: MollifierSpec, tol: float = 1e-8, max_iter: int = 2000):
    """Descend from f0 to a local minimizer of E_eps.

    Returns a SaddleResult with morseIndex 0 (not certified here; call
    morse_index for that).
    """
    from .types import SaddleResult

    P = Problem.of(f0, ms)
    u, r, it = ncg_minimize(P, f0.values, tol, max_iter)
    f = f0.with_values(u, eps=ms.eps)
    return SaddleResult(f, P.energy(u), r, 0, [], ms.eps, P.x_variation(u), iterations=it)


def lowest_mode(P: Problem, u: np.ndarray, prec: AbsPreconditioner, start: np.ndarray | None,
                steps: int = 30, project=None, seed: int = 0) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of the pencil (W H, M_u), warm-started."""
    J = jacobian(P, u)
    grid = P.grid

    if project is None:
        apply_op = J.__matmul__
    else:
        def apply_op(x):
            return flat(project(unflat(J @ flat(project(unflat(x, grid))), grid)))
        if start is not None:
            start = flat(project(unflat(start, grid)))
    n = J.shape[0]
    r = lanczos(apply_op, prec, n, min(steps, n), start=start, seed=seed)
    v = r.vectors[:, 0]
    if project is not None:
        v = flat(project(unflat(v, grid)))
    return float(r.values[0]), v / np.sqrt(prec.inner(v, v))


def minmode_descent(f: Field, ms: MollifierSpec, mode: np.ndarray | None = None,
                    tol: float = 1e-4, max_iter: int = 2000, tau: float = 0.5,
                    max_step: float | None = None, project=None, seed: int = 0):
    """Follow the reflected gradient until the residual drops below tol.

    ``mode`` seeds the lowest-mode estimate (full-grid array).  Returns
    (field, residual, iterations, lowest eigenvalue in the M_u metric).
    """
    P = Problem.of(f, ms)
    grid = f.grid
    u = np.array(f.values, dtype=float)
    v = None if mode is None else flat(mode)
    mu = np.nan
    r = P.residual_norm(u)
    for it in range(max_iter):
        if r <= tol:
            return f.with_values(u, eps=ms.eps), r, it, mu
        prec = AbsPreconditioner(P, u)
        mu, v = lowest_mode(P, u, prec, v, project=project, seed=seed)
        g = weighted_gradient(P, u)
        d = prec.solve(g)
        d = d - 2.0 * float(v @ g) * v
        step = tau * d
        if max_step is not None:
            size = np.sqrt(max(prec.inner(step, step), 0.0))
            if size > max_step:
                step *= max_step / size
        D = unflat(step, grid)
        if project is not None:
            D = project(D)
        u = u - D
        r = P.residual_norm(u)
        if not np.isfinite(r):
            raise NonConvergenceError("min-mode descent diverged", last=u)
        if it % 20 == 0:
            log.debug("minmode %d: E %.8f residual %.3e mu %.3f", it, P.energy(u), r, mu)
    if r <= tol:
        return f.with_values(u, eps=ms.eps), r, max_iter, mu
    raise NonConvergenceError(f"min-mode descent hit {max_iter} iterations at residual {r:.3e}",
                              last=u)
