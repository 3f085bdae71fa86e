"""gravwave command line.

Exit codes: 0 success, 2 non-convergence, 3 invalid input.  Errors are also
printed to stdout as a JSON object ``{"error": {"type": ..., "message": ...}}``.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .. import flatwaves as fw
from ..diagnostics import bernstein_trend, diagnose, extract_free_boundary
from ..discretization import MollifierSpec
from ..errors import (ContractViolationError, DomainError, EigenSolverError, GravwaveError,
                      InvalidParameterError, NoPlusRootError, NonConvergenceError)
from ..minmax.morse import morse_index
from ..minmax.pipeline import continuation, find_saddle
from ..model import Parameters, assess, sample_region
from . import io
from .config import RunConfig

EXIT_OK, EXIT_NONCONVERGENCE, EXIT_INVALID = 0, 2, 3

log = logging.getLogger("gravwave")


def _emit(text: str, out: str | None, name: str) -> None:
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / name).write_text(text)
    sys.stdout.write(text)


def landscape_report(p: Parameters, mmax: int = 20) -> dict:
    r = assess(p)
    doc = {
        "parameters": {"A": p.A, "B": p.B},
        "regime": r.regime.value,
        "critical_B": r.criticalB,
        "admissible": r.admissible,
        "condition_value": r.conditionValue,
        "branches": [{"kind": w.kind.value, "Y": w.Y, "energy": w.energy} for w in fw.roots(p)],
        "spectrum": [],
    }
    try:
        doc["spectrum"] = [{"m": e.m, "lambda": e.lam} for e in fw.second_variation_spectrum(p, mmax)]
    except NoPlusRootError:
        pass
    return doc


def cmd_landscape(cfg: RunConfig, args) -> int:
    _emit(io.dumps(landscape_report(cfg.parameters(), args.mmax)), cfg.out, "landscape.json")
    return EXIT_OK


def cmd_region(cfg: RunConfig, args) -> int:
    cells = sample_region(*args.A_range, *args.B_range, args.n)
    _emit(io.region_csv(cells), cfg.out, "region.csv")
    return EXIT_OK


def _with_metadata(doc: dict, t0: float) -> dict:
    # everything non-deterministic lives here
    return {"result": doc, "metadata": {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
                                        "runtime_s": time.time() - t0}}


def cmd_solve(cfg: RunConfig, args) -> int:
    t0 = time.time()
    p, g, mm = cfg.parameters(), cfg.grid(), cfg.minmax()
    ms = cfg.mollifiers()[0]
    run = find_saddle(p, g, ms, mm)
    sr = run.saddle
    doc = sr.to_dict()
    doc["stages"] = run.stages
    doc["path_energies"] = [float(e) for e in run.path.energies]
    doc["symmetrized"] = cfg.symmetrize
    if cfg.out:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        io.write_field(Path(cfg.out) / "saddle.field", sr.field)
    _emit(io.dumps(_with_metadata(doc, t0)), cfg.out, "saddle.json")
    ok = sr.converged and sr.morseIndex <= 1
    return EXIT_OK if ok else EXIT_NONCONVERGENCE


def cmd_continue(cfg: RunConfig, args) -> int:
    t0 = time.time()
    p, g, mm = cfg.parameters(), cfg.grid(), cfg.minmax()
    specs = cfg.mollifiers()
    results = continuation([s.eps for s in specs], p, g, mm, specs[0].kind)
    entries = []
    for sr in results:
        d = sr.to_dict()
        d["diagnostics"] = diagnose(sr.field, cfg.theta).to_dict()
        entries.append(d)
        if cfg.out:
            Path(cfg.out).mkdir(parents=True, exist_ok=True)
            io.write_field(Path(cfg.out) / f"saddle_eps{sr.epsilon:g}.field", sr.field)
    doc = {"steps": entries}
    if len(results) >= 2:
        h = max(g.hx, g.hy)
        doc["bernstein_trend"] = bernstein_trend(
            [r.epsilon for r in results], h, [e["diagnostics"]["bernsteinExcess"] for e in entries]).to_dict()
    _emit(io.dumps(_with_metadata(doc, t0)), cfg.out, "continuation.json")
    ok = all(r.converged and r.morseIndex <= 1 for r in results)
    return EXIT_OK if ok else EXIT_NONCONVERGENCE


def cmd_verify(cfg: RunConfig, args) -> int:
    f = io.read_field(args.field)
    theta = cfg.theta
    report = diagnose(f, theta)
    if cfg.out:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        (Path(cfg.out) / "free_boundary.csv").write_text(extract_free_boundary(f, report.theta).to_csv())
    _emit(io.dumps(report.to_dict()), cfg.out, "diagnostics.json")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, args) -> int:
    f = io.read_field(args.field)
    eps = f.eps if f.eps is not None else cfg.eps
    m = morse_index(f, MollifierSpec(eps, cfg.mollifier), k=args.k, seed=cfg.seed)
    doc = {"eps": eps, "eigenvalues": [float(v) for v in m.values], "morse_index": m.index,
           "negative": m.negative, "excluded_zero_modes": m.zero_modes, "negative_tolerance": m.negTol}
    _emit(io.dumps(doc), cfg.out, "spectrum.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override it")
    common.add_argument("--A", type=float)
    common.add_argument("--B", type=float)
    common.add_argument("--eps", type=float)
    common.add_argument("--eps-list", type=lambda s: [float(x) for x in s.split(",")],
                        help="comma-separated, decreasing")
    common.add_argument("--nx", type=int)
    common.add_argument("--ny", type=int)
    common.add_argument("--Ly", type=float)
    common.add_argument("--nodes", type=int)
    common.add_argument("--kick-amp", type=float)
    common.add_argument("--symmetrize", action="store_true", default=None)
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--max-iter", type=int)
    common.add_argument("--out")
    common.add_argument("--theta", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="gravwave", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("landscape", parents=[common], help="flat branches, condition and spectrum")
    s.add_argument("--mmax", type=int, default=20)
    s.set_defaults(func=cmd_landscape)
    s = sub.add_parser("region", parents=[common], help="admissibility over an (A, B) box as CSV")
    s.add_argument("--A-range", type=float, nargs=2, default=[0.5, 10.0], metavar=("LO", "HI"))
    s.add_argument("--B-range", type=float, nargs=2, default=[0.1, 10.0], metavar=("LO", "HI"))
    s.add_argument("--n", type=int, default=200)
    s.set_defaults(func=cmd_region)
    s = sub.add_parser("solve", parents=[common], help="mountain-pass saddle at one eps")
    s.set_defaults(func=cmd_solve)
    s = sub.add_parser("continue", parents=[common], help="saddles along --eps-list")
    s.set_defaults(func=cmd_continue)
    s = sub.add_parser("verify", parents=[common], help="diagnostics of a field file")
    s.add_argument("field")
    s.set_defaults(func=cmd_verify)
    s = sub.add_parser("spectrum", parents=[common], help="lowest Hessian eigenvalues of a field file")
    s.add_argument("field")
    s.add_argument("--k", type=int, default=6)
    s.set_defaults(func=cmd_spectrum)
    return ap


def _config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    keys = ("A", "B", "eps", "eps_list", "nx", "ny", "Ly", "nodes", "kick_amp", "symmetrize",
            "seed", "tol", "max_iter", "out", "theta")
    cfg = cfg.updated({k: getattr(args, k) for k in keys})
    if args.command in ("solve", "continue"):
        cfg.validate()
    elif args.command == "landscape":
        cfg.parameters()
    return cfg


def _error(exc: Exception, code: int) -> int:
    sys.stdout.write(io.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}))
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return args.func(cfg, args)
    except (InvalidParameterError, NoPlusRootError, DomainError, ContractViolationError) as exc:
        return _error(exc, EXIT_INVALID)
    except (NonConvergenceError, EigenSolverError) as exc:
        return _error(exc, EXIT_NONCONVERGENCE)
    except GravwaveError as exc:
        return _error(exc, EXIT_NONCONVERGENCE)
    except OSError as exc:
        return _error(exc, EXIT_INVALID)


if __name__ == "__main__":
    sys.exit(main())
