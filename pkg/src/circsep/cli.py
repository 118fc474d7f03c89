"""Command-line front end: ``circsep build | analyze | sweep | render``.

Exit codes: 0 when the command ran to completion (whatever the verdict),
2 for invalid input, 3 for an internal numerical failure.  Set
``CIRCSEP_NO_COLOR`` to suppress ANSI colour in text output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .algebra import PermutationZd, gf_add_table
from .analysis import EIG_TOL, RECON_TOL, analyze, sweep_threshold
from .analysis.sweep import MIN_PRECISION
from .density import (ClassBlocks, DensityMatrix, build_family, from_class_blocks,
                      random_circulant)
from .geometry import gf_support_pattern, render_svg, render_text, support_pattern

__all__ = ["main", "build_parser", "RunConfig", "SWEEPS"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3

FAMILY_PARAMS = ("lambda", "alpha", "beta", "p", "b", "c", "s", "t", "vertical", "mix")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    source: dict
    tol_eig: float = EIG_TOL
    tol_recon: float = RECON_TOL
    n_scan: int = 41
    precision: float = 1e-10
    out: Optional[str] = None
    fmt: str = "json"
    sweep: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tol_eig <= 0 or self.tol_recon <= 0:
            raise UsageError("tolerances must be positive")
        if self.precision < MIN_PRECISION:
            raise UsageError(f"bisection precision must be at least {MIN_PRECISION}")


# -- sweep presets ----------------------------------------------------------------

@dataclass(frozen=True)
class SweepPreset:
    parameter: str
    lo: float
    hi: float
    expected: Callable[[dict], dict]


def _iso_expected(fixed: dict) -> dict:
    d = fixed.get("d", 3)
    return {"separable": [0.0, 1 / (1 + d)], "ppt": [0.0, 1 / (1 + d)]}


SWEEPS: dict[str, SweepPreset] = {
    "isotropic": SweepPreset("lambda", 0.0, 1.0, _iso_expected),
    "werner": SweepPreset("p", 0.0, 1.0, lambda f: {"separable": [0.0, 0.5], "ppt": [0.0, 0.5]}),
    "horodecki": SweepPreset("alpha", 0.0, 5.0, lambda f: {"separable": [2.0, 3.0], "ppt": [1.0, 4.0]}),
    # lower edge of the certified mixing range is 0; the lower bound 1/(1+d) on the upper edge
    "bhn-line": SweepPreset("mix", 0.0, 1.0, lambda f: {"separable_upper_at_least": 1 / (1 + f.get("d", 3))}),
    # along beta = kappa alpha, parameterised by alpha + beta
    "bhn-two": SweepPreset("sum", 0.0, 1.0, lambda f: {"separable": [0.0, 0.25]}),
    "divincenzo": SweepPreset("c", 0.0, 0.5, lambda f: {}),
}


def _sweep_builder(family: str, parameter: str, fixed: dict) -> Callable[[float], DensityMatrix]:
    if family == "bhn-two" and parameter == "sum":
        kappa = fixed.get("kappa", 1.0)
        return lambda s: build_family("bhn-two", alpha=s / (1 + kappa), beta=kappa * s / (1 + kappa))
    return lambda v: build_family(family, **{**fixed, parameter: v})


# -- input handling ---------------------------------------------------------------

def _parse_permutation(text: Optional[str]) -> Optional[PermutationZd]:
    if text is None:
        return None
    try:
        return PermutationZd(tuple(int(v) for v in text.split(",")))
    except ValueError as exc:
        raise UsageError(f"bad --permutation {text!r}: {exc}") from exc


def _family_params(args) -> dict:
    params = {}
    for name in FAMILY_PARAMS:
        val = getattr(args, name, None)
        if val is not None:
            params[name] = val
    if args.d is not None:
        params["d"] = args.d
    return params


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _density_from_args(args) -> tuple[DensityMatrix, dict]:
    """Resolve the input density and an echo of where it came from."""
    perm = _parse_permutation(getattr(args, "permutation", None))
    if getattr(args, "input", None):
        rho = DensityMatrix.from_json(_load_json(args.input))
        return rho, {"file": args.input}
    if getattr(args, "blocks", None):
        data = _load_json(args.blocks)
        if perm is not None:
            data = {**data, "permutation": perm.to_json()}
        return from_class_blocks(ClassBlocks.from_json(data)), {"blocks": args.blocks}
    if not args.family:
        raise UsageError("give an input file, --blocks or --family")
    if args.family == "random":
        d = args.d or 3
        rng = np.random.default_rng(args.seed)
        p = perm if perm is not None else PermutationZd.identity(d)
        return random_circulant(d, rng, p), {"family": "random", "d": d, "seed": args.seed,
                                            "permutation": p.to_json()}
    params = _family_params(args)
    return build_family(args.family, **params), {"family": args.family, **params}


def _color(text: str, code: str, enabled: bool) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if enabled else text


def _use_color(args) -> bool:
    return args.format == "text" and not args.out and "CIRCSEP_NO_COLOR" not in os.environ


def _emit(args, payload: dict, text: Optional[str] = None) -> None:
    body = text if (args.format == "text" and text is not None) else json.dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(body)
    else:
        sys.stdout.write(body)


def _report(command: str, source: dict, result: dict, checks: list[dict], started: float) -> dict:
    return {
        "tool": "circsep",
        "version": __version__,
        "command": command,
        "input": source,
        "result": result,
        "checks": checks,
        "timing": {"seconds": round(time.perf_counter() - started, 6)},
    }


# -- commands -----------------------------------------------------------------------

def cmd_build(args) -> int:
    rho, _ = _density_from_args(args)
    payload = rho.to_json()
    _emit(args, payload)
    return EXIT_OK


_VERDICT_COLOR = {"separable": "32", "inconclusive": "33", "entangled": "31"}


def cmd_analyze(args) -> int:
    cfg = RunConfig("analyze", {}, tol_eig=args.tol_eig, tol_recon=args.tol_recon)
    started = time.perf_counter()
    rho, source = _density_from_args(args)
    result = analyze(rho, cfg.tol_eig, cfg.tol_recon)
    verdict = result["verdict"]
    checks = [
        {"name": "block_ppt_matches_oracle", "pass": result["ppt"]["agree"]},
        {"name": "structural_reconstruction", "pass": result["structure"]["reconstruction_residual"] <= cfg.tol_recon},
        {"name": "state_psd", "pass": result["positivity"]["verdict"] == "PSD"},
    ]
    if verdict is not None and verdict["certificate"] is not None:
        checks.append({"name": "certificate_reconstruction",
                       "pass": verdict["certificate"]["residual"] <= cfg.tol_recon})
    report = _report("analyze", source, result, checks, started)

    kind = "invalid (not PSD)" if verdict is None else verdict["verdict"]
    color = _use_color(args)
    lines = [
        f"verdict: {_color(kind, _VERDICT_COLOR.get(kind, '35'), color)}",
        f"ppt (blocks): {result['ppt']['block']['verdict']}  min eigs "
        + " ".join(f"{e:.3e}" for e in result["ppt"]["block"]["min_eigs"]),
        f"ppt (oracle): {result['ppt']['oracle_verdict']}  min eig {result['ppt']['oracle_min_eig']:.3e}",
        f"spin l1 sum: {result['l1']['sum']:.6g} (bound {result['l1']['bound']:g})",
    ]
    if verdict is not None:
        lines.append(f"mu sum: {verdict['mu_sum']:.6g}  min diag: {verdict['min_diag']:.6g}")
        if verdict["witness"] is not None:
            lines.append(f"ppt witness class: {verdict['witness']['class']}")
    lines += [f"check {c['name']}: {'pass' if c['pass'] else 'FAIL'}" for c in checks]
    _emit(args, report, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    family = args.family
    if family not in SWEEPS:
        raise UsageError(f"no sweep preset for family {family!r}; known: {sorted(SWEEPS)}")
    preset = SWEEPS[family]
    parameter = args.param or preset.parameter
    lo = preset.lo if args.lo is None else args.lo
    hi = preset.hi if args.hi is None else args.hi
    fixed = _family_params(args)
    fixed.pop(parameter, None)
    if args.kappa is not None:
        fixed["kappa"] = args.kappa
    cfg = RunConfig("sweep", fixed, n_scan=args.n_scan, precision=args.precision,
                    sweep={"parameter": parameter, "range": [lo, hi]})
    build = _sweep_builder(family, parameter, fixed)
    results = {}
    for pred in ("separable", "ppt"):
        results[pred] = sweep_threshold(build, lo, hi, pred, n_scan=cfg.n_scan,
                                        precision=cfg.precision, workers=args.workers).to_json()
    expected = preset.expected(fixed) if parameter == preset.parameter else {}
    checks = []
    for pred, want in expected.items():
        if pred in results:
            got = results[pred]
            ok = got["interval_ok"] and abs(got["lower"] - want[0]) <= 1e-6 and abs(got["upper"] - want[1]) <= 1e-6
            checks.append({"name": f"{pred}_matches_expected", "pass": bool(ok)})
        elif pred == "separable_upper_at_least":
            got = results["separable"]
            checks.append({"name": pred, "pass": bool(got["interval_ok"] and got["upper"] >= want - 1e-6)})
    result = {"family": family, "parameter": parameter, "fixed": fixed, **results, "expected": expected}
    if args.format == "text":
        for pred in ("separable", "ppt"):
            if not results[pred]["interval_ok"]:
                print(f"warning: {pred} region is not one interval on the scan grid; scan table in the report",
                      file=sys.stderr)
    report = _report("sweep", {"family": family, **fixed}, result, checks, started)
    lines = [f"{family} over {parameter} in [{lo}, {hi}]"]
    for pred in ("separable", "ppt"):
        r = results[pred]
        if r["interval_ok"]:
            lines.append(f"{pred}: [{r['lower']:.10f}, {r['upper']:.10f}]")
        else:
            lines.append(f"{pred}: not an interval; scan: "
                         + " ".join(f"{t:.4g}:{'Y' if ok else 'n'}" for t, ok in r["scan"]))
    for pred, want in expected.items():
        lines.append(f"expected {pred}: {want}")
    lines += [f"check {c['name']}: {'pass' if c['pass'] else 'FAIL'}" for c in checks]
    _emit(args, report, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_render(args) -> int:
    if args.gf is not None:
        try:
            pattern = gf_support_pattern(gf_add_table(args.gf))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"unsupported field size {args.gf}: {exc}") from exc
    else:
        d = args.d or 3
        perm = _parse_permutation(args.permutation)
        pattern = support_pattern(d, perm)
    body = render_svg(pattern) if args.svg else render_text(pattern)
    if args.out:
        Path(args.out).write_text(body)
    else:
        sys.stdout.write(body)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def _add_family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", help="named family (isotropic, werner, divincenzo, horodecki, "
                                    "bhn-line, bhn-two, random)")
    p.add_argument("--d", type=int)
    p.add_argument("--lambda", dest="lambda", type=float)
    for name in ("alpha", "beta", "p", "b", "c", "mix"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--s", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--vertical", type=int, help="bhn-line: use the vertical line j = VERTICAL")
    p.add_argument("--permutation", help="comma-separated p(0),...,p(d-1) with p(0)=0")
    p.add_argument("--seed", type=int, default=0, help="seed for --family random (default 0)")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="circsep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"circsep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="write a validated density JSON")
    _add_family_args(b)
    b.add_argument("--blocks", help="JSON file with d class blocks")
    _add_output_args(b)
    b.set_defaults(func=cmd_build)

    a = sub.add_parser("analyze", help="PPT, l1 and certificate report for one density")
    a.add_argument("input", nargs="?", help="density JSON (full entries or family shorthand)")
    _add_family_args(a)
    a.add_argument("--blocks")
    a.add_argument("--tol-eig", type=float, default=EIG_TOL)
    a.add_argument("--tol-recon", type=float, default=RECON_TOL)
    _add_output_args(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", help="locate separable and PPT boundaries along one parameter")
    _add_family_args(s)
    s.add_argument("--param", help="parameter to sweep (default depends on the family)")
    s.add_argument("--lo", type=float)
    s.add_argument("--hi", type=float)
    s.add_argument("--kappa", type=float, help="bhn-two: ray beta = kappa * alpha")
    s.add_argument("--n-scan", type=int, default=41)
    s.add_argument("--precision", type=float, default=1e-10)
    s.add_argument("--workers", type=int, default=None)
    _add_output_args(s)
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("render", help="text or SVG picture of a support pattern")
    r.add_argument("--d", type=int)
    r.add_argument("--permutation")
    r.add_argument("--gf", type=int, help="use the GF(q) addition table instead, q in {4, 8, 9}")
    r.add_argument("--svg", action="store_true")
    r.add_argument("--out")
    r.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"circsep: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError) as exc:
        print(f"circsep: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
