from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..discretization import Field


@dataclass
class SaddleResult:
    """A converged critical point of E_eps with its Morse data.

    ``negativeEigenvalues`` are generalized eigenvalues of the Hessian in the
    Dirichlet metric; they share signs (and hence the index) with the Hessian.
    """

    field: Field
    energy: float
    residualNorm: float
    morseIndex: int
    negativeEigenvalues: list[float]
    epsilon: float
    xVariation: float
    iterations: int = 0
    converged: bool = True
    flags: list[str] = field(default_factory=list)
    zeroModes: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        g, p = self.field.grid, self.field.params
        return {
            "energy": self.energy,
            "residual": self.residualNorm,
            "morse_index": self.morseIndex,
            "negative_eigenvalues": list(self.negativeEigenvalues),
            "excluded_zero_modes": list(self.zeroModes),
            "x_variation": self.xVariation,
            "eps": self.epsilon,
            "parameters": {"A": p.A, "B": p.B},
            "grid": {"nx": g.nx, "ny": g.ny, "Ly": g.Ly},
            "iterations": self.iterations,
            "converged": self.converged,
            "flags": list(self.flags),
        }


@dataclass
class PathState:
    """Chain of fields; node 0 near U-, last node near U-infinity."""

    nodes: list[Field]
    energies: np.ndarray
    maxIndex: int
    iterations: int = 0
    history: list[float] = field(default_factory=list)
    climbing: bool = False
    # (sup before, sup after) of each non-climbing descent substep
    descent_history: list[tuple[float, float]] = field(default_factory=list)
    # (energy before, energy after) of each node rearrangement
    rearrange_history: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        if len(self.nodes) < 8:
            raise ValueError(f"a path needs at least 8 nodes, got {len(self.nodes)}")
        self.energies = np.asarray(self.energies, dtype=float)

    @property
    def max_node(self) -> Field:
        return self.nodes[self.maxIndex]

    @property
    def max_energy(self) -> float:
        return float(self.energies[self.maxIndex])
