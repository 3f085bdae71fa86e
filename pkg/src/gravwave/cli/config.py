"""Run configuration: defaults, then a JSON config file, then flags.

Config files are JSON objects whose keys are the long flag names with
dashes replaced by underscores, e.g.::

    {"A": 6, "B": 2, "eps": 0.05, "nx": 64, "ny": 128, "Ly": 4,
     "nodes": 17, "kick_amp": 0.01, "symmetrize": false, "seed": 0}
"""
from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from ..discretization import GridSpec, MollifierSpec
from ..errors import InvalidParameterError
from ..minmax.pipeline import MinmaxConfig
from ..minmax.string import StringConfig
from ..model import Parameters


@dataclass
class RunConfig:
    A: float = 6.0
    B: float = 2.0
    nx: int = 64
    ny: int = 128
    Ly: float | None = None           # default A/B + 1
    eps: float = 0.05
    eps_list: list[float] | None = None
    mollifier: str = "quintic"
    nodes: int = 17
    kick_amp: float = 1e-2
    tol: float = 1e-8
    max_iter: int = 300               # string sweeps
    symmetrize: bool = False
    seed: int = 0
    theta: float | None = None
    out: str | None = None

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParameterError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidParameterError("config must be a JSON object")
        return cls().updated(data)

    def updated(self, values: dict) -> "RunConfig":
        known = {f.name for f in fields(self)}
        unknown = set(values) - known
        if unknown:
            raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
        return replace(self, **{k: v for k, v in values.items() if v is not None})

    # re-validate through the owning types
    def parameters(self) -> Parameters:
        return Parameters(self.A, self.B)

    def grid(self) -> GridSpec:
        p = self.parameters()
        g = GridSpec(self.nx, self.ny, p.height + 1.0 if self.Ly is None else self.Ly)
        g.check_for(p)
        return g

    def mollifiers(self) -> list[MollifierSpec]:
        eps = self.eps_list if self.eps_list else [self.eps]
        specs = [MollifierSpec(float(e), self.mollifier) for e in eps]
        if any(b.eps >= a.eps for a, b in zip(specs, specs[1:])):
            raise InvalidParameterError("eps list must be strictly decreasing")
        return specs

    def minmax(self) -> MinmaxConfig:
        if int(self.nodes) != self.nodes or self.nodes < 8:
            raise InvalidParameterError(f"nodes must be an integer >= 8, got {self.nodes}")
        if not self.tol > 0 or int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidParameterError("tol must be positive and max_iter a positive integer")
        return MinmaxConfig(nodes=int(self.nodes), kickAmp=float(self.kick_amp), tol=float(self.tol),
                            string=StringConfig(max_iter=int(self.max_iter)),
                            symmetrize=bool(self.symmetrize), seed=int(self.seed))

    def validate(self) -> None:
        self.grid()
        self.mollifiers()
        self.minmax()
