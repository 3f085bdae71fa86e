"""Mountain-pass solver for the regularized energy."""
from .descent import local_minimize, minmode_descent
from .morse import MorseReport, morse_index
from .newton import refine_saddle
from .pipeline import (MinmaxConfig, RunResult, Wells, certify, compute_wells, continuation,
                       find_saddle, index_kick, refine_flat)
from .string import StringConfig, init_path, relax_path
from .types import PathState, SaddleResult

__all__ = [
    "MinmaxConfig", "MorseReport", "PathState", "RunResult", "SaddleResult", "StringConfig", "Wells",
    "certify", "compute_wells", "continuation", "find_saddle", "index_kick", "init_path",
    "local_minimize", "minmode_descent", "morse_index", "refine_flat", "refine_saddle", "relax_path",
]
