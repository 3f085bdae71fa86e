"""Morse index by Lanczos on the pencil (W H, M).

For any SPD metric M the pencil has the same inertia as H (Sylvester), so
counting negative Ritz values of M^-1 W H counts negative directions of the
Hessian.  The default metric is the Dirichlet stiffness K: its eigenvalues
are Rayleigh quotients <v, H v> / <v, -2 Lap v>, which do not depend on the
mesh size, and the extreme ones converge in a few dozen steps.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..discretization import Field, MollifierSpec
from ..energy import Problem
from ..errors import EigenSolverError
from .operators import DirichletMetric, flat, unflat, x_derivative

log = logging.getLogger(__name__)


@dataclass
class LanczosResult:
    values: np.ndarray
    vectors: np.ndarray     # columns, M-orthonormal
    residuals: np.ndarray   # |beta_m s_m|, in units of the eigenvalue
    steps: int
    scale: float            # max |Ritz value|: crude spectral radius


def lanczos(apply_op, metric, n: int, steps: int, start: np.ndarray | None = None,
            deflate: np.ndarray | None = None, seed: int = 0) -> LanczosResult:
    """Lanczos for M^-1 A with full reorthogonalization in the M inner product.

    ``apply_op`` applies the symmetric A; ``metric`` provides ``solve``/``apply``
    for the SPD M.  Columns of ``deflate`` (M-orthonormal) are projected out.
    """
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(n) if start is None else np.array(start, dtype=float)
    basis = np.zeros((n, steps + 1))
    mbasis = np.zeros((n, steps + 1))
    if deflate is not None and deflate.size:
        mdefl = np.column_stack([metric.apply(c) for c in deflate.T])
    else:
        deflate = mdefl = None

    def orth(w, j):
        for _ in range(2):
            if deflate is not None:
                w = w - deflate @ (mdefl.T @ w)
            w = w - basis[:, :j] @ (mbasis[:, :j].T @ w)
        return w

    q = orth(q, 0)
    nq = np.sqrt(max(q @ metric.apply(q), 0.0))
    if nq == 0.0:
        raise EigenSolverError("Lanczos start vector vanished after deflation")
    basis[:, 0] = q / nq
    mbasis[:, 0] = metric.apply(basis[:, 0])
    alpha, beta = [], []
    for j in range(steps):
        w = metric.solve(apply_op(basis[:, j]))
        a = float(mbasis[:, j] @ w)
        alpha.append(a)
        w = orth(w, j + 1)
        b = np.sqrt(max(w @ metric.apply(w), 0.0))
        beta.append(b)
        if b <= 1e-13 * max(1.0, abs(a)) or j + 1 == n:
            break
        basis[:, j + 1] = w / b
        mbasis[:, j + 1] = metric.apply(basis[:, j + 1])
    k = len(alpha)
    T = np.diag(alpha) + np.diag(beta[: k - 1], 1) + np.diag(beta[: k - 1], -1)
    theta, S = np.linalg.eigh(T)
    res = np.abs(beta[k - 1] * S[-1, :])
    return LanczosResult(theta, basis[:, :k] @ S, res, k, float(np.max(np.abs(theta))))


def _settled(r: LanczosResult, k: int, tol: float) -> bool:
    # the index only needs the negative Ritz values and the first one above zero
    kk = min(k, len(r.values))
    need = [i for i in range(kk) if r.values[i] < 0]
    if len(need) < kk:
        need.append(len(need))
    return all(r.residuals[i] <= tol * max(r.scale, 1.0) for i in need)


def smallest_eigenpairs(P: Problem, u: np.ndarray, k: int, metric=None, tol: float = 1e-6,
                        max_steps: int = 400, seed: int = 0) -> LanczosResult:
    """k smallest eigenpairs of the pencil (W H(u), metric), with a deflated
    restart to pick up further copies of repeated eigenvalues.

    Convergence is demanded of the negative Ritz values and the first
    nonnegative one; the remaining values are returned as they stand.
    """
    metric = metric or DirichletMetric(P)
    grid = P.grid
    n = grid.ny * grid.nx
    Wf = flat(np.broadcast_to(P.W, grid.shape))

    def apply_op(x):
        return Wf * flat(P.hessian_apply(u, unflat(x, grid)))

    steps = min(n, max(4 * k, 60))
    while True:
        r = lanczos(apply_op, metric, n, steps, seed=seed)
        kk = min(k, len(r.values))
        ok = _settled(r, k, tol)
        if ok or steps >= min(n, max_steps):
            break
        steps = min(n, 2 * steps, max_steps)
    if not ok:
        raise EigenSolverError(
            f"Lanczos did not converge in {steps} steps", partial=r)
    vals, vecs = list(r.values[:kk]), [r.vectors[:, i] for i in range(kk)]

    # deflated restart: anything below the k-th value that the first sweep missed
    if kk < n:
        found = np.column_stack(vecs)
        r2 = lanczos(apply_op, metric, n, steps, deflate=found, seed=seed + 1)
        cut = vals[-1]
        for th, rs, i in zip(r2.values, r2.residuals, range(len(r2.values))):
            if th < cut and rs <= tol * max(r2.scale, 1.0):
                vals.append(th)
                vecs.append(r2.vectors[:, i])
    order = np.argsort(vals)[:k]
    return LanczosResult(np.array(vals)[order], np.column_stack([vecs[i] for i in order]),
                         np.zeros(len(order)), r.steps, r.scale)


@dataclass
class MorseReport:
    index: int
    negative: list[float]
    zero_modes: list[float]
    values: np.ndarray
    vectors: np.ndarray   # full-grid arrays, shape (k, ny+1, nx)
    negTol: float


def morse_index(f: Field, ms: MollifierSpec, k: int = 6, negTol: float | None = None,
                zero_mode_cos: float = 0.9, seed: int = 0) -> MorseReport:
    """Count negative Hessian directions at f, excluding the x-shift mode.

    negTol defaults to 1e-6 times the spectral scale seen by Lanczos.  An
    eigenvector whose Dirichlet-metric cosine with du/dx exceeds
    ``zero_mode_cos`` is the translation mode and never counts.
    """
    P = Problem.of(f, ms)
    u = f.values
    metric = DirichletMetric(P)
    r = smallest_eigenpairs(P, u, k, metric=metric, seed=seed)
    tol = 1e-6 * r.scale if negTol is None else negTol
    ux = flat(x_derivative(u, f.grid))
    nux = np.sqrt(max(metric.inner(ux, ux), 0.0))
    negative, zero = [], []
    for lam, v in zip(r.values, r.vectors.T):
        cos = abs(metric.inner(v, ux)) / (nux * np.sqrt(metric.inner(v, v))) if nux > 0 else 0.0
        if cos > zero_mode_cos:
            zero.append(float(lam))
        elif lam < -tol:
            negative.append(float(lam))
    vectors = np.stack([unflat(v, f.grid) for v in r.vectors.T])
    log.debug("Morse index %d, negatives %s, zero modes %s", len(negative), negative, zero)
    return MorseReport(len(negative), negative, zero, r.values, vectors, tol)

