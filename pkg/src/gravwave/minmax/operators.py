"""Sparse helpers on the unknown rows 1..ny, flattened row-major.

The W-weighted Hessian W H is symmetric; it equals the Dirichlet stiffness
K plus a diagonal.  Replacing that diagonal by its absolute value gives an
SPD matrix M_u with spec(M_u^-1 W H) inside [-1, 1], which is what every
iterative solver here uses as preconditioner.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..energy import Problem


def flat(a: np.ndarray) -> np.ndarray:
    return a[1:].ravel()


def unflat(x: np.ndarray, grid, bottom: float = 0.0) -> np.ndarray:
    out = np.empty(grid.shape)
    out[0] = bottom
    out[1:] = x.reshape(grid.ny, grid.nx)
    return out


def weighted_gradient(P: Problem, u: np.ndarray) -> np.ndarray:
    """W G on the unknowns: the Euclidean gradient of the discrete energy."""
    return flat(P.W * P.gradient(u))


def _diag(P: Problem, u: np.ndarray) -> np.ndarray:
    return P.dirichlet_op.wflat * flat(np.broadcast_to(P.hessian_diag_term(u), P.grid.shape))


def jacobian(P: Problem, u: np.ndarray) -> sp.csr_matrix:
    """W H(u) as a sparse symmetric matrix."""
    return (P.dirichlet_op.K + sp.diags(_diag(P, u))).tocsr()


class AbsPreconditioner:
    """Factorization of M_u = K + |diag(W H(u) - K)|."""

    def __init__(self, P: Problem, u: np.ndarray):
        self.M = (P.dirichlet_op.K + sp.diags(np.abs(_diag(P, u)))).tocsc()
        self._lu = splu(self.M, permc_spec="MMD_AT_PLUS_A")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self._lu.solve(rhs)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.M @ x

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(a @ (self.M @ b))


class DirichletMetric:
    """Same interface as AbsPreconditioner for the fixed stiffness K."""

    def __init__(self, P: Problem):
        op = P.dirichlet_op
        self.M = op.K
        self._op = op

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self._op.solve_flat(rhs)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.M @ x

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(a @ (self.M @ b))


def reflect(u: np.ndarray, grid) -> np.ndarray:
    """x -> -x about the centre column."""
    idx = (2 * grid.center - np.arange(grid.nx)) % grid.nx
    return u[:, idx]


def even_part(u: np.ndarray, grid) -> np.ndarray:
    return 0.5 * (u + reflect(u, grid))


def x_derivative(u: np.ndarray, grid) -> np.ndarray:
    """Centred x-difference with zero bottom row: the discrete translation mode."""
    d = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2.0 * grid.hx)
    d[0] = 0.0
    return d
