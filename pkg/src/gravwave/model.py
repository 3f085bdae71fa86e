"""Problem parameters, regime classification and the admissibility condition."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NoPlusRootError

CRITICAL_RTOL = 1e-12


@dataclass(frozen=True)
class Parameters:
    """Bernoulli coefficients: |grad u|^2 = A - B y on the free boundary."""

    A: float
    B: float

    def __post_init__(self):
        for name in ("A", "B"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value)):
                raise InvalidParameterError(f"{name} must be a finite real, got {value!r}")
            if value <= 0:
                raise InvalidParameterError(f"{name} must be positive, got {value!r}")
        object.__setattr__(self, "A", float(self.A))
        object.__setattr__(self, "B", float(self.B))

    @property
    def height(self) -> float:
        """A/B, above which the weight (A - B y)_+ vanishes."""
        return self.A / self.B


class Regime(str, enum.Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    criticalB: float
    admissible: bool = False
    conditionValue: float = math.nan


def critical_B(A: float) -> float:
    return 2.0 * (A / 3.0) ** 1.5


def _as_parameters(p) -> Parameters:
    if isinstance(p, Parameters):
        return p
    A, B = p
    return Parameters(A, B)


def classify_regime(p: Parameters) -> RegimeReport:
    """Regime part of the report; ``admissible`` is left False."""
    p = _as_parameters(p)
    bc = critical_B(p.A)
    if abs(p.B - bc) <= CRITICAL_RTOL * bc:
        regime = Regime.CRITICAL
    elif p.B < bc:
        regime = Regime.SUBCRITICAL
    else:
        regime = Regime.SUPERCRITICAL
    return RegimeReport(regime=regime, criticalB=bc)


def admissibility_condition(p: Parameters) -> float:
    """2 (A/B - Y+) 2 pi coth(2 pi Y+); the parameters are admissible iff this is < 1."""
    from .flatwaves import coth, plus_root

    p = _as_parameters(p)
    Yp = plus_root(p)
    return 2.0 * (p.height - Yp) * 2.0 * math.pi * coth(2.0 * math.pi * Yp)


def admissibility_condition_arccos(p: Parameters) -> float:
    """Same quantity written directly in A and B through the trigonometric root."""
    p = _as_parameters(p)
    if classify_regime(p).regime is not Regime.SUBCRITICAL:
        raise NoPlusRootError(f"no Y+ for {p}")
    from .flatwaves import coth

    r = p.A / p.B
    trig = 1.0 + 2.0 * math.cos(math.acos(1.0 - 27.0 * p.B**2 / (2.0 * p.A**3)) / 3.0)
    return 2.0 * r * 2.0 * math.pi * (1.0 - trig / 3.0) * coth(2.0 * math.pi * r * trig / 3.0)


def assess(p: Parameters) -> RegimeReport:
    """Full report: regime, critical B, condition value and admissibility."""
    p = _as_parameters(p)
    report = classify_regime(p)
    if report.regime is not Regime.SUBCRITICAL:
        return report
    value = admissibility_condition(p)
    return RegimeReport(report.regime, report.criticalB, bool(value < 1.0), value)


@dataclass(frozen=True)
class RegionCell:
    A: float
    B: float
    regime: Regime
    admissible: bool
    condition_value: float


def sample_region(Amin: float, Amax: float, Bmin: float, Bmax: float, n: int) -> list[RegionCell]:
    """n x n sample of the (A, B) plane, row-major with A as the row index."""
    if int(n) != n or n < 2:
        raise InvalidParameterError(f"n must be an integer >= 2, got {n!r}")
    for lo, hi, name in ((Amin, Amax, "A"), (Bmin, Bmax, "B")):
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo <= 0 or hi <= lo:
            raise InvalidParameterError(f"degenerate {name} range [{lo}, {hi}]")
    cells = []
    for A in np.linspace(Amin, Amax, int(n)):
        for B in np.linspace(Bmin, Bmax, int(n)):
            r = assess(Parameters(A, B))
            cells.append(RegionCell(float(A), float(B), r.regime, r.admissible, r.conditionValue))
    return cells
