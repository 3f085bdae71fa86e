"""x-independent critical points of E: the cubic p(Y), its roots, branch
energies and the second inner variation at U+ diagonalised in Fourier modes.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import DomainError, InvariantViolationError, NoPlusRootError
from .model import Parameters, Regime, _as_parameters, classify_regime


class Kind(str, enum.Enum):
    MINUS = "Minus"
    PLUS = "Plus"
    ZERO = "Zero"
    INFINITY = "Infinity"


@dataclass(frozen=True)
class FlatWave:
    kind: Kind
    Y: float
    energy: float


@dataclass(frozen=True)
class SpectrumEntry:
    m: int
    lam: float


def coth(t: float) -> float:
    # 1 + 2/(e^{2t} - 1) does not overflow; beyond t = 20 the correction is below 1e-17
    if t > 20.0:
        return 1.0
    return 1.0 + 2.0 / math.expm1(2.0 * t)


def cubic_p(p: Parameters, Y: float) -> float:
    p = _as_parameters(p)
    return p.A * Y * Y - p.B * Y**3 - 1.0


def flat_energy(p: Parameters, Y: float) -> float:
    """Energy e(Y) of u_Y = (1 - y/Y)_+ ."""
    p = _as_parameters(p)
    if not Y > 0:
        raise DomainError(f"flat energy needs Y > 0, got {Y}")
    return 1.0 / Y + p.A * Y - 0.5 * p.B * Y * Y


def uinfinity_energy(p: Parameters) -> float:
    p = _as_parameters(p)
    return p.A**2 / (2.0 * p.B)


def _residual_scale(p: Parameters, Y: float) -> float:
    return 1.0 + p.A * Y * Y + p.B * Y**3


def _polish(p: Parameters, Y: float, steps: int = 4) -> float:
    for _ in range(steps):
        f = cubic_p(p, Y)
        if abs(f) <= 1e-15 * _residual_scale(p, Y):
            break
        df = 2.0 * p.A * Y - 3.0 * p.B * Y * Y
        if df == 0.0:
            break
        Y_new = Y - f / df
        if abs(cubic_p(p, Y_new)) >= abs(f):
            break
        Y = Y_new
    return Y


def plus_root_closed_form(p: Parameters) -> float:
    p = _as_parameters(p)
    if classify_regime(p).regime is Regime.SUPERCRITICAL:
        raise NoPlusRootError(f"no positive root of p for {p}")
    arg = max(-1.0, 1.0 - 27.0 * p.B**2 / (2.0 * p.A**3))
    return p.height / 3.0 * (1.0 + 2.0 * math.cos(math.acos(arg) / 3.0))


def plus_root(p: Parameters) -> float:
    """Y+ from the trigonometric closed form, Newton-polished."""
    p = _as_parameters(p)
    if classify_regime(p).regime is not Regime.SUBCRITICAL:
        raise NoPlusRootError(f"Y+ exists only in the subcritical regime, got {p}")
    return _polish(p, plus_root_closed_form(p))


def minus_root(p: Parameters) -> float:
    """Y- by bracketed root finding on (0, 2A/(3B)), Newton-polished."""
    p = _as_parameters(p)
    if classify_regime(p).regime is not Regime.SUBCRITICAL:
        raise NoPlusRootError(f"Y- exists only in the subcritical regime, got {p}")
    top = 2.0 * p.height / 3.0
    Y = brentq(lambda y: cubic_p(p, y), 0.0, top, xtol=1e-15, rtol=1e-15, maxiter=200)
    return _polish(p, Y)


def roots(p: Parameters) -> list[FlatWave]:
    """All flat critical points, ordered by depth (U-infinity last)."""
    p = _as_parameters(p)
    regime = classify_regime(p).regime
    waves = []
    if regime is Regime.SUBCRITICAL:
        for kind, Y in ((Kind.MINUS, minus_root(p)), (Kind.PLUS, plus_root(p))):
            if abs(cubic_p(p, Y)) > 1e-12 * _residual_scale(p, Y):
                raise InvariantViolationError(f"root polish failed for {kind}: p(Y) = {cubic_p(p, Y)}")
            waves.append(FlatWave(kind, Y, flat_energy(p, Y)))
    elif regime is Regime.CRITICAL:
        Y0 = 2.0 * p.height / 3.0
        waves.append(FlatWave(Kind.ZERO, Y0, flat_energy(p, Y0)))
    waves.append(FlatWave(Kind.INFINITY, math.inf, uinfinity_energy(p)))
    return waves


def branch(p: Parameters, kind: Kind | str) -> FlatWave:
    kind = Kind(kind)
    for w in roots(p):
        if w.kind is kind:
            return w
    raise NoPlusRootError(f"no {kind.value} branch for {p}")


def second_variation_spectrum(p: Parameters, mmax: int) -> list[SpectrumEntry]:
    """Eigenvalues of the second inner variation at U+ on even modes m = 0..mmax."""
    p = _as_parameters(p)
    if mmax < 1:
        raise DomainError(f"mmax must be >= 1, got {mmax}")
    Yp = plus_root(p)
    lam0 = 2.0 / Yp**3 - p.B
    alt = 2.0 * p.A / Yp - 3.0 * p.B
    if abs(lam0 - alt) > 1e-10 * max(1.0, abs(lam0)):
        raise InvariantViolationError(f"B[1,1] forms disagree: {lam0} vs {alt}")
    entries = [SpectrumEntry(0, lam0)]
    for m in range(1, mmax + 1):
        t = 2.0 * math.pi * m * Yp
        entries.append(SpectrumEntry(m, 4.0 * math.pi * m / Yp**2 * coth(t) - p.B))
    return entries
