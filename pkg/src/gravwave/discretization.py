"""Finite differences on the truncated periodic strip T x [0, Ly].

Arrays are stored as ``values[j, i]`` with x_i = -1/2 + i/nx (periodic) and
y_j = j Ly/ny.  Row j = 0 is the Dirichlet bottom (u = 1 for fields, 0 for
directions); row j = ny carries a homogeneous Neumann condition through a
reflected ghost row.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .errors import ContractViolationError, InvalidParameterError, TruncationError
from .flatwaves import FlatWave, Kind
from .model import Parameters


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    Ly: float

    def __post_init__(self):
        if int(self.nx) != self.nx or self.nx < 8 or self.nx % 2:
            raise InvalidParameterError(f"nx must be an even integer >= 8, got {self.nx}")
        if int(self.ny) != self.ny or self.ny < 8:
            raise InvalidParameterError(f"ny must be an integer >= 8, got {self.ny}")
        if not (math.isfinite(self.Ly) and self.Ly > 0):
            raise InvalidParameterError(f"Ly must be positive, got {self.Ly}")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))
        object.__setattr__(self, "Ly", float(self.Ly))

    @classmethod
    def default(cls, params: Parameters, nx: int = 64, ny: int = 128) -> "GridSpec":
        return cls(nx, ny, params.height + 1.0)

    @property
    def hx(self) -> float:
        return 1.0 / self.nx

    @property
    def hy(self) -> float:
        return self.Ly / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny + 1, self.nx)

    @property
    def center(self) -> int:
        """Column index of x = 0."""
        return self.nx // 2

    @property
    def x(self) -> np.ndarray:
        return -0.5 + np.arange(self.nx) * self.hx

    @property
    def y(self) -> np.ndarray:
        return np.arange(self.ny + 1) * self.hy

    def weights(self) -> np.ndarray:
        """Trapezoidal node weights in y, uniform in x; shape (ny+1, 1)."""
        w = np.full((self.ny + 1, 1), self.hx * self.hy)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def check_for(self, params: Parameters) -> None:
        if not self.Ly > params.height:
            raise InvalidParameterError(f"Ly = {self.Ly} must exceed A/B = {params.height}")
        k = params.height / self.hy
        if abs(k - round(k)) > 1e-9:
            warnings.warn(
                f"A/B = {params.height} is not a grid line (hy = {self.hy}); "
                "bulk quadrature of the kink is O(h^2)",
                stacklevel=3,
            )


@dataclass
class Field:
    """Discrete function on the strip with bottom trace 1."""

    grid: GridSpec
    params: Parameters
    values: np.ndarray
    eps: float | None = None

    def __post_init__(self):
        self.values = np.array(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise InvalidParameterError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise InvalidParameterError("field values must be finite")
        if not np.all(self.values[0] == 1.0):
            raise ContractViolationError("bottom row of a Field must equal 1")
        if not self.grid.Ly > self.params.height:
            raise InvalidParameterError(f"Ly = {self.grid.Ly} must exceed A/B = {self.params.height}")

    def with_values(self, values: np.ndarray, eps: float | None = None) -> "Field":
        return Field(self.grid, self.params, values, self.eps if eps is None else eps)

    def copy(self) -> "Field":
        return Field(self.grid, self.params, self.values.copy(), self.eps)


class MollifierKind(str, enum.Enum):
    QUINTIC = "quintic"
    EXPSTEP = "expstep"


@dataclass(frozen=True)
class MollifierSpec:
    eps: float
    kind: MollifierKind = MollifierKind.QUINTIC

    def __post_init__(self):
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise InvalidParameterError(f"eps must be positive, got {self.eps}")
        object.__setattr__(self, "kind", MollifierKind(self.kind))


# Profiles on s = t/eps.  B rises from 0 to 1/2 on [0, 1].

def _quintic(s):
    s = np.clip(s, 0.0, 1.0)
    return 0.5 * s**3 * (10.0 - 15.0 * s + 6.0 * s * s)


def _quintic_d1(s):
    inside = (s > 0) & (s < 1)
    s = np.where(inside, s, 0.0)
    return np.where(inside, 15.0 * s * s * (1.0 - s) ** 2, 0.0)


def _quintic_d2(s):
    inside = (s > 0) & (s < 1)
    s = np.where(inside, s, 0.0)
    return np.where(inside, 30.0 * s * (1.0 - s) * (1.0 - 2.0 * s), 0.0)


# exp-step: B = 1/2 sigma(-z), z = 1/s - 1/(1-s).  Outside [1e-3, 1 - 1e-3] all
# derivatives are below 1e-200 and are set to zero to avoid inf * 0.
_EXP_CUT = 1e-3


def _exp_parts(s):
    inside = (s > _EXP_CUT) & (s < 1.0 - _EXP_CUT)
    si = np.where(inside, s, 0.5)
    z = 1.0 / si - 1.0 / (1.0 - si)
    q = -1.0 / si**2 - 1.0 / (1.0 - si) ** 2
    dq = 2.0 / si**3 - 2.0 / (1.0 - si) ** 3
    return inside, z, q, dq


def _expstep(s):
    s = np.asarray(s, dtype=float)
    out = np.where(s >= 1.0, 0.5, 0.0)
    mid = (s > 0) & (s < 1)
    sm = np.where(mid, s, 0.5)
    z = 1.0 / sm - 1.0 / (1.0 - sm)
    return np.where(mid, 0.5 * expit(-z), out)


def _expstep_d1(s):
    inside, z, q, _ = _exp_parts(np.asarray(s, dtype=float))
    return np.where(inside, -0.5 * q * expit(z) * expit(-z), 0.0)


def _expstep_d2(s):
    inside, z, q, dq = _exp_parts(np.asarray(s, dtype=float))
    sz, smz = expit(z), expit(-z)
    val = -(q * q + dq) * sz * smz + 2.0 * q * q * sz * sz * smz
    return np.where(inside, 0.5 * val, 0.0)


_PROFILES = {
    MollifierKind.QUINTIC: (_quintic, _quintic_d1, _quintic_d2),
    MollifierKind.EXPSTEP: (_expstep, _expstep_d1, _expstep_d2),
}


def _scalar_or_array(result, t):
    return float(result) if np.ndim(t) == 0 else result


def mollifier_B(ms: MollifierSpec, t):
    """B_eps(t) = B(t/eps), nondecreasing from 0 to 1/2."""
    f = _PROFILES[ms.kind][0]
    return _scalar_or_array(f(np.asarray(t, dtype=float) / ms.eps), t)


def beta(ms: MollifierSpec, t):
    """beta_eps = B_eps'."""
    f = _PROFILES[ms.kind][1]
    return _scalar_or_array(f(np.asarray(t, dtype=float) / ms.eps) / ms.eps, t)


def beta_prime(ms: MollifierSpec, t):
    f = _PROFILES[ms.kind][2]
    return _scalar_or_array(f(np.asarray(t, dtype=float) / ms.eps) / ms.eps**2, t)


def laplacian(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    """5-point Laplacian; bottom row is read from ``values`` and the output row 0 is zero."""
    u = np.asarray(values, dtype=float)
    out = np.zeros_like(u)
    uxx = (np.roll(u, -1, axis=1) - 2.0 * u + np.roll(u, 1, axis=1)) / grid.hx**2
    uyy = np.empty_like(u)
    uyy[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / grid.hy**2
    uyy[-1] = 2.0 * (u[-2] - u[-1]) / grid.hy**2
    out[1:] = uxx[1:] + uyy[1:]
    return out


def laplacian_apply(f: Field) -> np.ndarray:
    return laplacian(f.values, f.grid)


def y_profile(grid: GridSpec, Y: float) -> np.ndarray:
    return np.clip(1.0 - grid.y / Y, 0.0, None)


def embed_flat(w: FlatWave, g: GridSpec, params: Parameters) -> Field:
    """Sample (1 - y/Y)_+ (or the constant 1 for U-infinity) on the grid."""
    if Kind(w.kind) is Kind.INFINITY:
        values = np.ones(g.shape)
    else:
        if not 0 < w.Y < g.Ly:
            raise TruncationError(f"Y = {w.Y} does not fit in (0, Ly = {g.Ly})")
        values = np.repeat(y_profile(g, w.Y)[:, None], g.nx, axis=1)
    return Field(g, params, values)


def perturb(f: Field, mode: int, amp: float, seed: int = 0, noise: float = 0.0,
            odd: bool = False) -> Field:
    """Add amp cos(2 pi m x) sin(pi y/Ly) (sin in x if ``odd``) plus seeded noise.

    Both additions vanish on the bottom row.
    """
    g = f.grid
    trig = np.sin if odd else np.cos
    shape_x = trig(2.0 * np.pi * mode * g.x)
    shape_y = np.sin(np.pi * g.y / g.Ly)
    values = f.values + amp * shape_y[:, None] * shape_x[None, :]
    if noise:
        rng = np.random.default_rng(seed)
        bump = noise * rng.standard_normal(g.shape)
        bump[0] = 0.0
        values = values + bump
    return f.with_values(values)


class DirichletOperator:
    """Sparse stiffness matrix of the discrete Dirichlet energy on unknown rows 1..ny.

    ``K`` is W (-2 Laplacian) as a symmetric matrix, so that for directions
    a, b with zero bottom trace  a . K b = <a, -2 Lap b>_W.  Used only as a
    preconditioner and metric; never exposed as the Hessian.
    """

    def __init__(self, grid: GridSpec):
        from scipy.sparse.linalg import splu

        self.grid = grid
        nx, ny, hx, hy = grid.nx, grid.ny, grid.hx, grid.hy
        ex = np.ones(nx)
        Tx = sp.diags([-ex[:-1], 2 * ex, -ex[:-1]], [-1, 0, 1], format="lil")
        Tx[0, nx - 1] = -1.0
        Tx[nx - 1, 0] = -1.0
        Tx = Tx.tocsr() / hx**2
        ey = np.ones(ny)
        Ty = sp.diags([-ey[:-1], 2 * ey, -ey[:-1]], [-1, 0, 1], format="lil")
        Ty[ny - 1, ny - 2] = -2.0
        Ty = Ty.tocsr() / hy**2
        neg_lap = sp.kron(Ty, sp.identity(nx)) + sp.kron(sp.identity(ny), Tx)
        self.wflat = np.repeat(grid.weights()[1:, 0], nx)
        K = sp.diags(self.wflat) @ (2.0 * neg_lap)
        self.K = ((K + K.T) * 0.5).tocsc()
        self._lu = splu(self.K)

    def solve_flat(self, rhs: np.ndarray) -> np.ndarray:
        return self._lu.solve(rhs)

    def precondition(self, g: np.ndarray) -> np.ndarray:
        """Solve -2 Lap d = g on rows 1..ny, d = 0 on the bottom row."""
        out = np.zeros(self.grid.shape)
        out[1:] = self._lu.solve((self.grid.weights()[1:] * g[1:]).ravel()).reshape(self.grid.ny, self.grid.nx)
        return out

    def metric(self, a: np.ndarray, b: np.ndarray) -> float:
        av = a[1:].ravel()
        return float(av @ (self.K @ b[1:].ravel()))


def field_weight(grid: GridSpec, params: Parameters) -> np.ndarray:
    """(A - B y)_+ at the nodes, shape (ny+1, 1)."""
    return np.clip(params.A - params.B * grid.y, 0.0, None)[:, None]


def check_direction(v: np.ndarray, grid: GridSpec) -> None:
    if np.shape(v) != grid.shape:
        raise ContractViolationError(f"direction shape {np.shape(v)} != {grid.shape}")
    if np.any(v[0] != 0.0):
        raise ContractViolationError("direction must have zero bottom trace")
