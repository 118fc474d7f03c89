"""Threshold location for one-parameter families: grid scan, then bisection of each edge."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .certify import certify, state_reports

__all__ = ["SweepResult", "sweep_threshold", "PREDICATES", "MIN_PRECISION"]

MIN_PRECISION = 1e-10


def _separable(rho) -> bool:
    return certify(rho).kind == "separable"


def _ppt(rho) -> bool:
    try:
        pos, ppt = state_reports(rho)
    except ValueError:
        return False
    return pos.ok and ppt.ok


PREDICATES: dict[str, Callable] = {"separable": _separable, "ppt": _ppt}


@dataclass(frozen=True)
class SweepResult:
    """Where ``predicate(build(t))`` holds on ``[lo, hi]``.

    When the true set on the scan grid is one contiguous run, ``lower`` and
    ``upper`` are its bisected edges (``interval_ok`` is True).  Otherwise
    both are None and ``scan`` is the only output worth reading.
    """

    predicate: str
    lo: float
    hi: float
    lower: Optional[float]
    upper: Optional[float]
    interval_ok: bool
    scan: tuple[tuple[float, bool], ...]
    precision: float

    def to_json(self) -> dict:
        return {
            "predicate": self.predicate,
            "range": [self.lo, self.hi],
            "lower": self.lower,
            "upper": self.upper,
            "interval_ok": self.interval_ok,
            "precision": self.precision,
            "scan": [[t, ok] for t, ok in self.scan],
        }


def _safe(pred: Callable, build: Callable) -> Callable[[float], bool]:
    def f(t: float) -> bool:
        try:
            return bool(pred(build(t)))
        except ValueError:
            # parameters outside the family's domain count as "predicate fails"
            return False
    return f


def _bisect(f: Callable[[float], bool], inside: float, outside: float, precision: float) -> float:
    """Edge between a point where ``f`` holds and one where it fails; returns the inside end."""
    while abs(outside - inside) > precision:
        mid = 0.5 * (inside + outside)
        if f(mid):
            inside = mid
        else:
            outside = mid
    return inside


def sweep_threshold(build: Callable[[float], object], lo: float, hi: float,
                    predicate: Union[str, Callable] = "separable", n_scan: int = 41,
                    precision: float = 1e-10, workers: Optional[int] = None) -> SweepResult:
    """Scan ``n_scan`` evenly spaced points, then bisect the edges of the true run.

    Edges that coincide with ``lo`` or ``hi`` are reported as such without
    bisection.  ``workers > 1`` evaluates the scan in a thread pool; results
    are collected in parameter order, so the output does not depend on it.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if precision < MIN_PRECISION:
        raise ValueError(f"precision {precision} below {MIN_PRECISION}")
    if n_scan < 3:
        raise ValueError("n_scan must be at least 3")
    name = predicate if isinstance(predicate, str) else getattr(predicate, "__name__", "custom")
    pred = PREDICATES[predicate] if isinstance(predicate, str) else predicate
    f = _safe(pred, build)

    grid = [float(t) for t in np.linspace(lo, hi, n_scan)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(f, grid))
    else:
        flags = [f(t) for t in grid]
    scan = tuple(zip(grid, flags))

    idx = [i for i, ok in enumerate(flags) if ok]
    contiguous = bool(idx) and idx[-1] - idx[0] + 1 == len(idx)
    if not contiguous:
        return SweepResult(name, lo, hi, None, None, False, scan, precision)
    first, last = idx[0], idx[-1]
    lower = grid[first] if first == 0 else _bisect(f, grid[first], grid[first - 1], precision)
    upper = grid[last] if last == n_scan - 1 else _bisect(f, grid[last], grid[last + 1], precision)
    return SweepResult(name, lo, hi, lower, upper, True, scan, precision)
