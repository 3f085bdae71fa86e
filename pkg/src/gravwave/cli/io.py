"""Field files, JSON reports and CSV tables."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from ..discretization import Field, GridSpec
from ..errors import InvalidParameterError
from ..model import Parameters

HEADER = "# gravwave-field v1"


def _g(x: float) -> str:
    return "%.17g" % x


def format_field(f: Field) -> str:
    g, p = f.grid, f.params
    eps = math.nan if f.eps is None else f.eps
    lines = [HEADER, " ".join([str(g.nx), str(g.ny), _g(g.Ly), _g(p.A), _g(p.B), _g(eps)])]
    lines.extend(_g(v) for v in f.values.ravel())  # row-major: j outer, i inner
    return "\n".join(lines) + "\n"


def write_field(path, f: Field) -> None:
    Path(path).write_text(format_field(f))


def parse_field(text: str) -> Field:
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise InvalidParameterError("not a gravwave field file (bad header)")
    try:
        nx, ny, Ly, A, B, eps = lines[1].split()
        nx, ny = int(nx), int(ny)
        values = np.array([float(s) for s in lines[2:] if s.strip()])
    except (IndexError, ValueError) as exc:
        raise InvalidParameterError(f"malformed field file: {exc}") from None
    grid = GridSpec(nx, ny, float(Ly))
    if values.size != grid.nx * (grid.ny + 1):
        raise InvalidParameterError(f"expected {grid.nx * (grid.ny + 1)} values, found {values.size}")
    eps = float(eps)
    return Field(grid, Parameters(float(A), float(B)), values.reshape(grid.shape),
                 None if math.isnan(eps) else eps)


def read_field(path) -> Field:
    return parse_field(Path(path).read_text())


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def region_csv(cells) -> str:
    out = ["A,B,regime,admissible,condition_value"]
    for c in cells:
        out.append(f"{_g(c.A)},{_g(c.B)},{c.regime.value},{str(c.admissible).lower()},{_g(c.condition_value)}")
    return "\n".join(out) + "\n"
