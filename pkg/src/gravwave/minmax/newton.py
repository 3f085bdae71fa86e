"""Newton-Krylov on the discrete Euler-Lagrange equation.

The Newton system W H d = -W G is symmetric and indefinite at saddles, so
the inner solver is MINRES preconditioned with M_u = K + |diag| (SPD).  The
step is backtracked on the residual norm.
"""
from __future__ import annotations

import logging

import numpy as np
from scipy.sparse.linalg import LinearOperator, minres

from ..discretization import Field, MollifierSpec
from ..energy import Problem
from ..errors import NonConvergenceError
from .operators import AbsPreconditioner, jacobian, unflat, weighted_gradient

log = logging.getLogger(__name__)


def newton_step(P: Problem, u: np.ndarray, forcing: float = 1e-3, maxiter: int = 500,
                project=None) -> tuple[np.ndarray, int]:
    """Inexact Newton direction from MINRES; ``project`` optionally maps
    directions into an invariant subspace (e.g. even fields)."""
    J = jacobian(P, u)
    prec = AbsPreconditioner(P, u)
    M = LinearOperator(J.shape, matvec=prec.solve, dtype=float)
    count = [0]

    def cb(_):
        count[0] += 1

    x, _ = minres(J, -weighted_gradient(P, u), M=M, rtol=forcing, maxiter=maxiter, callback=cb)
    d = unflat(x, P.grid)
    if project is not None:
        d = project(d)
    return d, count[0]


def newton_solve(P: Problem, u: np.ndarray, tol: float = 1e-8, max_iter: int = 50,
                 project=None, min_step: float = 1e-6) -> tuple[np.ndarray, float, int]:
    u = np.array(u, dtype=float)
    r = P.residual_norm(u)
    history = [r]
    for it in range(max_iter):
        if r <= tol:
            return u, r, it
        # Eisenstat-Walker style forcing: loose far away, tight near the root
        forcing = min(1e-2, max(1e-10, 0.1 * r))
        d, inner = newton_step(P, u, forcing=forcing, project=project)
        t = 1.0
        while True:
            trial = u + t * d
            rt = P.residual_norm(trial)
            if rt <= (1.0 - 1e-4 * t) * r:
                break
            t *= 0.5
            if t < min_step:
                raise NonConvergenceError(
                    f"Newton backtracking failed at residual {r:.3e}", last=u, history=history)
        u, r = trial, rt
        history.append(r)
        log.debug("newton %d: residual %.3e step %.3g inner %d", it, r, t, inner)
    if r <= tol:
        return u, r, max_iter
    raise NonConvergenceError(f"Newton hit {max_iter} iterations at residual {r:.3e}",
                              last=u, history=history)


def refine_saddle(f: Field, ms: MollifierSpec, tol: float = 1e-8, max_iter: int = 50,
                  entry: float | None = None, project=None) -> tuple[Field, float, int]:
    """Newton-Krylov from f to a critical point of E_eps.

    Returns (field, residual, iterations).  ``entry``, if given, rejects
    starting points whose residual exceeds it.
    """
    P = Problem.of(f, ms)
    r0 = P.residual_norm(f.values)
    if entry is not None and r0 > entry:
        raise NonConvergenceError(
            f"starting residual {r0:.3e} above entry threshold {entry:.3e}", last=f.values)
    u, r, it = newton_solve(P, f.values, tol=tol, max_iter=max_iter, project=project)
    return f.with_values(u, eps=ms.eps), r, it
