"""The full min-max run: wells, string, saddle refinement, index control and
eps-continuation.

    wells -> init_path -> relax_path (climbing) -> refine_saddle -> morse_index
          -> index_kick while the index is >= 2

A climbing node that Newton cannot take to a critical point is handed to
min-mode descent first (seeded with the path tangent), which pulls it onto
an index-1 saddle before Newton polishes it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .. import flatwaves as fw
from ..discretization import Field, GridSpec, MollifierSpec, embed_flat, perturb
from ..energy import Problem
from ..errors import NonConvergenceError
from ..model import Parameters
from .descent import local_minimize, minmode_descent
from .morse import MorseReport, morse_index
from .newton import refine_saddle
from .operators import even_part
from .string import StringConfig, init_path, relax_path
from .types import PathState, SaddleResult

log = logging.getLogger(__name__)


@dataclass
class MinmaxConfig:
    nodes: int = 17
    kickAmp: float = 1e-2
    init_mode: str = "flat"
    string: StringConfig = field(default_factory=StringConfig)
    tol: float = 1e-8
    newton_max_iter: int = 60
    minmode_tol: float = 1e-4
    minmode_max_iter: int = 2000
    kick_delta: float = 0.05
    kick_cap: int = 3
    local_nodes: int = 9
    morse_k: int = 6
    zero_mode_cos: float = 0.9
    symmetrize: bool = False
    seed: int = 0
    well_noise: float = 1e-3
    well_tol: float = 1e-8


@dataclass
class Wells:
    minus: SaddleResult
    infinity: SaddleResult


@dataclass
class RunResult:
    saddle: SaddleResult
    path: PathState | None
    wells: Wells
    stages: list[str] = field(default_factory=list)


def _projector(cfg: MinmaxConfig, grid: GridSpec):
    if not cfg.symmetrize:
        return None
    return lambda u: even_part(u, grid)


def compute_wells(params: Parameters, grid: GridSpec, ms: MollifierSpec, cfg: MinmaxConfig) -> Wells:
    start = embed_flat(fw.branch(params, fw.Kind.MINUS), grid, params)
    start = perturb(start, 1, 0.0, seed=cfg.seed, noise=cfg.well_noise)
    start = start.with_values(np.clip(start.values, 0.0, 1.0))
    minus = local_minimize(start, ms, tol=cfg.well_tol)
    inf = local_minimize(embed_flat(fw.branch(params, fw.Kind.INFINITY), grid, params), ms, tol=cfg.well_tol)
    return Wells(minus, inf)


def certify(f: Field, ms: MollifierSpec, cfg: MinmaxConfig, residual: float, iterations: int = 0,
            flags=None) -> tuple[SaddleResult, MorseReport]:
    m = morse_index(f, ms, k=cfg.morse_k, zero_mode_cos=cfg.zero_mode_cos, seed=cfg.seed)
    P = Problem.of(f, ms)
    sr = SaddleResult(
        field=f, energy=P.energy(f.values), residualNorm=residual, morseIndex=m.index,
        negativeEigenvalues=m.negative, epsilon=ms.eps, xVariation=P.x_variation(f.values),
        iterations=iterations, converged=residual <= cfg.tol, flags=list(flags or []),
        zeroModes=m.zero_modes)
    return sr, m


def _negative_modes(m: MorseReport) -> list[np.ndarray]:
    """Eigenvectors of the counted negative eigenvalues, most negative first."""
    out = []
    for lam, v in zip(m.values, m.vectors):
        if lam in m.negative:
            out.append(v)
    return out


def _crest_at_centre(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    # the crest of an even wave sits at x = 0 or x = 1/2; move it to x = 0
    c, a = grid.center, 0
    if np.sum(u[:, a]) > np.sum(u[:, c]):
        u = np.roll(u, grid.nx // 2, axis=1)
    return u


def saddle_from_point(f: Field, ms: MollifierSpec, cfg: MinmaxConfig, mode: np.ndarray | None = None,
                      stages: list[str] | None = None) -> tuple[Field, float, int]:
    """Newton from f; if that fails, min-mode descent first, then Newton."""
    stages = stages if stages is not None else []
    project = _projector(cfg, f.grid)
    try:
        out = refine_saddle(f, ms, tol=cfg.tol, max_iter=cfg.newton_max_iter, project=project)
        stages.append("newton")
        return out
    except NonConvergenceError as exc:
        log.info("Newton from the climbing node failed (%s); min-mode descent", exc)
    g, r, it, _ = minmode_descent(f, ms, mode=mode, tol=cfg.minmode_tol, max_iter=cfg.minmode_max_iter,
                                  project=project, seed=cfg.seed)
    stages.append(f"minmode({it})")
    h, r, k = refine_saddle(g, ms, tol=cfg.tol, max_iter=cfg.newton_max_iter, project=project)
    stages.append("newton")
    return h, r, it + k


def _local_path(sr: SaddleResult, mode: np.ndarray, ms: MollifierSpec, cfg: MinmaxConfig) -> PathState:
    """Short path through sr along its unstable mode, relaxed with a climbing image."""
    f = sr.field
    P = Problem.of(f, ms)
    v = mode / np.sqrt(max(P.metric(mode, mode), 1e-300))
    ts = np.linspace(-1.0, 1.0, cfg.local_nodes)
    nodes = [f.with_values(f.values + cfg.kick_delta * t * v) for t in ts]
    E = np.array([P.energy(n.values) for n in nodes])
    ps = PathState(nodes, E, int(np.argmax(E)))
    scfg = StringConfig(max_iter=50, tol=cfg.tol, climb_after=0, tau=cfg.string.tau,
                        energy_weight=cfg.string.energy_weight,
                        max_climb_step=cfg.string.max_climb_step)
    return relax_path(ps, ms, scfg)


def index_kick(sr: SaddleResult, ms: MollifierSpec, cfg: MinmaxConfig,
               stages: list[str] | None = None) -> tuple[SaddleResult, PathState | None]:
    """Push a saddle of index >= 2 down to index <= 1.

    Each round perturbs along the second negative eigenvector with both
    signs, re-descends each branch by min-mode descent (ascending along the
    first eigenvector only), refines with Newton, relaxes a short path
    through the new point and keeps the best branch with index <= 1.
    """
    stages = stages if stages is not None else []
    grid = sr.field.grid
    project = _projector(cfg, grid)
    current, local = sr, None
    for attempt in range(cfg.kick_cap):
        if current.morseIndex <= 1:
            return current, local
        _, m = certify(current.field, ms, cfg, current.residualNorm)
        modes = _negative_modes(m)
        first, second = modes[0], modes[1]
        if project is not None:
            second = project(second)
            if not np.any(np.abs(second) > 1e-12) and len(modes) > 2:
                second = project(modes[2])
        P = Problem.of(current.field, ms)
        second = second / np.sqrt(max(P.metric(second, second), 1e-300))
        found = []
        for sign in (1.0, -1.0):
            start = current.field.with_values(current.field.values + sign * cfg.kick_delta * second)
            try:
                g, r, it, _ = minmode_descent(start, ms, mode=first, tol=cfg.minmode_tol,
                                              max_iter=cfg.minmode_max_iter, project=project, seed=cfg.seed)
                h, r, k = refine_saddle(g, ms, tol=cfg.tol, max_iter=cfg.newton_max_iter, project=project)
            except NonConvergenceError as exc:
                log.info("index kick branch %+d failed: %s", int(sign), exc)
                continue
            if project is not None:
                h = h.with_values(_crest_at_centre(h.values, grid))
            cand, cm = certify(h, ms, cfg, r, it + k, flags=current.flags + [f"kick{attempt}{'+' if sign > 0 else '-'}"])
            found.append((cand, cm))
        stages.append(f"index_kick({attempt})")
        good = [c for c in found if c[0].morseIndex <= 1]
        if not good:
            if found:
                current = min(found, key=lambda c: c[0].morseIndex)[0]
            continue
        best, bm = min(good, key=lambda c: c[0].energy)
        modes = _negative_modes(bm)
        if modes:
            local = _local_path(best, modes[0], ms, cfg)
            node = local.max_node
            try:
                h, r, k = refine_saddle(node, ms, tol=cfg.tol, max_iter=cfg.newton_max_iter, project=project)
                if project is not None:
                    h = h.with_values(_crest_at_centre(h.values, grid))
                refined, _ = certify(h, ms, cfg, r, best.iterations + k, flags=best.flags)
                if refined.morseIndex <= 1:
                    best = refined
            except NonConvergenceError:
                pass
        current = best
    if current.morseIndex > 1:
        current.flags.append("index_kick_cap")
    return current, local


def refine_flat(params: Parameters, grid: GridSpec, ms: MollifierSpec, kind=fw.Kind.PLUS,
                tol: float = 1e-8, _depth: int = 0) -> tuple[Field, float, int]:
    """Newton inside the x-independent subspace from the embedded flat branch.

    For small eps the sharp embedding can sit outside Newton's basin; then
    the branch is first refined at 1.5 eps and used as the warm start.
    """
    def xmean(d):
        return np.repeat(d.mean(axis=1, keepdims=True), grid.nx, axis=1)

    f = embed_flat(fw.branch(params, kind), grid, params)
    try:
        return refine_saddle(f, ms, tol=tol, project=xmean)
    except NonConvergenceError:
        if _depth >= 6:
            raise
    coarse, _, k0 = refine_flat(params, grid, MollifierSpec(1.5 * ms.eps, ms.kind), kind, tol, _depth + 1)
    f, r, k = refine_saddle(coarse, ms, tol=tol, project=xmean)
    return f, r, k0 + k


def _check_not_well(sr: SaddleResult, wells: Wells, margin: float = 1e-6) -> None:
    top = max(wells.minus.energy, wells.infinity.energy)
    if sr.morseIndex == 0 or sr.energy <= top + margin:
        raise NonConvergenceError(
            f"run ended at a well (energy {sr.energy:.8f}, index {sr.morseIndex}), not a mountain-pass point",
            last=sr.field.values)


def find_saddle(params: Parameters, grid: GridSpec, ms: MollifierSpec,
                cfg: MinmaxConfig | None = None, wells: Wells | None = None) -> RunResult:
    cfg = cfg or MinmaxConfig()
    stages: list[str] = []
    wells = wells or compute_wells(params, grid, ms, cfg)
    ps = init_path(wells.minus.field, wells.infinity.field, cfg.nodes, cfg.kickAmp, cfg.init_mode, ms)
    if cfg.symmetrize:
        from ..symmetry import symmetrized_relax_path
        ps = symmetrized_relax_path(ps, ms, cfg.string)
        stages.append(f"symmetric_string({ps.iterations})")
    else:
        ps = relax_path(ps, ms, cfg.string)
        stages.append(f"string({ps.iterations})")
    k = ps.maxIndex
    node = ps.nodes[k]
    if cfg.symmetrize:
        node = node.with_values(even_part(node.values, grid))
    tangent = ps.nodes[k + 1].values - ps.nodes[k - 1].values
    try:
        f, r, it = saddle_from_point(node, ms, cfg, mode=tangent, stages=stages)
    except NonConvergenceError as exc:
        raise NonConvergenceError(f"no critical point near the climbing node: {exc}",
                                  last=exc.last, history=ps.history) from exc
    if cfg.symmetrize:
        f = f.with_values(_crest_at_centre(f.values, grid))
    sr, m = certify(f, ms, cfg, r, ps.iterations + it)
    if sr.morseIndex >= 2:
        sr, _ = index_kick(sr, ms, cfg, stages)
    _check_not_well(sr, wells)
    return RunResult(sr, ps, wells, stages)


def track_eps(f: Field, eps_to: float, cfg: MinmaxConfig, kind="quintic",
              min_ratio: float = 1e-3, substep_iter: int = 40,
              max_jump: float = 0.1) -> tuple[Field, float, int, int]:
    """Follow a critical point from f.eps down to eps_to by Newton on an
    adaptive sequence of intermediate eps (step halved on failure, doubled
    after a success).  A substep that moves any value by more than max_jump
    has left the branch and counts as a failure.
    Returns (field, residual, newton iterations, substeps).
    """
    project = _projector(cfg, f.grid)
    eps = float(f.eps)
    step = eps - eps_to
    total = substeps = 0
    r = float("nan")
    while eps > eps_to:
        target = max(eps - step, eps_to)
        try:
            g, r, it = refine_saddle(f, MollifierSpec(target, kind), tol=cfg.tol, max_iter=substep_iter,
                                     project=project)
            jump = float(np.max(np.abs(g.values - f.values)))
            if jump > max_jump:
                raise NonConvergenceError(f"substep to eps {target:.4g} jumped by {jump:.3g}")
        except NonConvergenceError:
            step *= 0.5
            if step < min_ratio * eps_to:
                raise
            continue
        f, eps = g, target
        total += it
        substeps += 1
        step *= 2.0
    return f, r, total, substeps


def continuation(epsList, params: Parameters, grid: GridSpec, cfg: MinmaxConfig | None = None,
                 kind="quintic") -> list[SaddleResult]:
    """Saddles along a decreasing eps sequence.

    The first one comes from the full min-max run; each later one is tracked
    from its predecessor by track_eps, with min-mode descent as the fallback
    when the tracking step collapses.
    """
    cfg = cfg or MinmaxConfig()
    results: list[SaddleResult] = []
    prev = None
    for eps in epsList:
        ms = MollifierSpec(eps, kind)
        if prev is None:
            sr = find_saddle(params, grid, ms, cfg).saddle
        else:
            start = prev.field.with_values(prev.field.values, eps=prev.epsilon)
            flags = ["tracked"]
            try:
                f, r, it, n = track_eps(start, eps, cfg, kind)
                flags.append(f"substeps={n}")
            except NonConvergenceError as exc:
                log.info("eps tracking to %.4g failed (%s); min-mode descent", eps, exc)
                _, m = certify(prev.field, MollifierSpec(prev.epsilon, kind), cfg, prev.residualNorm)
                modes = _negative_modes(m)
                f, r, it = saddle_from_point(start.with_values(start.values, eps=eps), ms, cfg,
                                             mode=modes[0] if modes else None)
                flags = ["warm_start"]
            if cfg.symmetrize:
                f = f.with_values(_crest_at_centre(f.values, grid))
            sr, _ = certify(f, ms, cfg, r, it, flags=flags)
            if sr.morseIndex >= 2:
                sr, _ = index_kick(sr, ms, cfg)
            _check_not_well(sr, compute_wells(params, grid, ms, cfg))
        log.info("eps %.4g: E %.8f residual %.2e index %d", eps, sr.energy, sr.residualNorm, sr.morseIndex)
        results.append(sr)
        prev = sr
    return results


__all__ = ["MinmaxConfig", "Wells", "RunResult", "compute_wells", "certify", "index_kick",
           "refine_flat", "find_saddle", "continuation", "saddle_from_point", "track_eps"]
