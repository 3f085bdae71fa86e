"""Discrete E and E_eps with their first and second variations.

Dirichlet energy: sum of squared forward differences, x-edges weighted like
the nodes they start from, y-edges by hx*hy.  Bulk: trapezoidal node rule.
With these weights the W-weighted gradient is exactly -2 Lap_h u + 2 beta(u) w.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .discretization import (
    DirichletOperator,
    Field,
    GridSpec,
    MollifierSpec,
    beta,
    beta_prime,
    check_direction,
    field_weight,
    laplacian,
    mollifier_B,
)
from .model import Parameters


@dataclass(frozen=True)
class EnergyBreakdown:
    dirichlet: float
    bulk: float
    total: float


class Problem:
    """E_eps on a fixed grid, acting on raw value arrays."""

    def __init__(self, grid: GridSpec, params: Parameters, ms: MollifierSpec | None = None):
        grid.check_for(params)
        self.grid = grid
        self.params = params
        self.ms = ms
        self.W = grid.weights()
        self.w = field_weight(grid, params)
        self._Ww = self.W * self.w

    @classmethod
    def of(cls, f: Field, ms: MollifierSpec | None = None) -> "Problem":
        return cls(f.grid, f.params, ms)

    @cached_property
    def dirichlet_op(self) -> DirichletOperator:
        return DirichletOperator(self.grid)

    def field(self, values: np.ndarray) -> Field:
        return Field(self.grid, self.params, values, self.ms.eps if self.ms else None)

    # -- quadrature -------------------------------------------------------

    def dirichlet_parts(self, u: np.ndarray) -> tuple[float, float]:
        g = self.grid
        dx = (np.roll(u, -1, axis=1) - u) / g.hx
        dy = (u[1:] - u[:-1]) / g.hy
        ex = float(np.sum(self.W * dx * dx))
        ey = float(np.sum(dy * dy)) * g.hx * g.hy
        return ex, ey

    def dirichlet(self, u: np.ndarray) -> float:
        ex, ey = self.dirichlet_parts(u)
        return ex + ey

    def x_variation(self, u: np.ndarray) -> float:
        return self.dirichlet_parts(u)[0]

    def bulk_eps(self, u: np.ndarray) -> float:
        # fsum makes the value independent of summation order (exact under row permutations)
        return math.fsum((2.0 * mollifier_B(self.ms, u) * self._Ww).ravel())

    def bulk_sharp(self, u: np.ndarray) -> float:
        return math.fsum(((u > 0) * self._Ww).ravel())

    def energy(self, u: np.ndarray) -> float:
        return self.dirichlet(u) + self.bulk_eps(u)

    def breakdown(self, u: np.ndarray, sharp: bool = False) -> EnergyBreakdown:
        d = self.dirichlet(u)
        b = self.bulk_sharp(u) if sharp else self.bulk_eps(u)
        return EnergyBreakdown(d, b, d + b)

    # -- variations ---------------------------------------------------------

    def gradient(self, u: np.ndarray) -> np.ndarray:
        """L2(W) gradient; zero on the bottom row."""
        G = -2.0 * laplacian(u, self.grid) + 2.0 * beta(self.ms, u) * self.w
        G[0] = 0.0
        return G

    def hessian_apply(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        Hv = -2.0 * laplacian(v, self.grid) + 2.0 * beta_prime(self.ms, u) * self.w * v
        Hv[0] = 0.0
        return Hv

    def hessian_diag_term(self, u: np.ndarray) -> np.ndarray:
        return 2.0 * beta_prime(self.ms, u) * self.w

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.sum(self.W[1:] * a[1:] * b[1:]))

    def norm(self, a: np.ndarray) -> float:
        return math.sqrt(max(self.inner(a, a), 0.0))

    def residual_norm(self, u: np.ndarray) -> float:
        return self.norm(self.gradient(u))

    def precondition(self, g: np.ndarray) -> np.ndarray:
        return self.dirichlet_op.precondition(g)

    def metric(self, a: np.ndarray, b: np.ndarray) -> float:
        """Dirichlet inner product <a, -2 Lap b>_W for zero-trace directions."""
        return self.dirichlet_op.metric(a, b)


def energy_sharp(f: Field) -> EnergyBreakdown:
    return Problem.of(f).breakdown(f.values, sharp=True)


def energy_eps(f: Field, ms: MollifierSpec) -> EnergyBreakdown:
    return Problem.of(f, ms).breakdown(f.values)


def gradient_eps(f: Field, ms: MollifierSpec) -> np.ndarray:
    return Problem.of(f, ms).gradient(f.values)


def hessian_apply(f: Field, v: np.ndarray, ms: MollifierSpec) -> np.ndarray:
    check_direction(v, f.grid)
    return Problem.of(f, ms).hessian_apply(f.values, v)


def x_variation(f: Field) -> float:
    """Discrete integral of u_x^2."""
    return Problem.of(f).x_variation(f.values)
