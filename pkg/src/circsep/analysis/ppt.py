"""Positivity and PPT tests that only look at d x d class blocks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..algebra import PermutationZd
from ..geometry import support_pattern
from .linalg import EIG_TOL, as_matrix, is_psd, local_dim, partial_transpose

__all__ = ["BlockReport", "PptReport", "SupportViolation", "ppt_blocks", "positivity_blocks",
           "ppt_block", "full_ppt_min_eig", "check_support"]


class SupportViolation(ValueError):
    def __init__(self, positions):
        self.positions = positions
        super().__init__(f"entries outside support(M_p) at flat positions {positions[:8]}")


@dataclass(frozen=True)
class BlockReport:
    """Per-class minimum eigenvalues and the resulting verdict.

    ``kind`` is ``"ppt"`` (classes of the partial transpose, labelled y) or
    ``"positivity"`` (classes of rho itself, labelled x).
    """

    kind: str
    min_eigs: tuple[float, ...]
    tol: float

    @property
    def ok(self) -> bool:
        return all(e >= -self.tol for e in self.min_eigs)

    @property
    def witness(self) -> Optional[int]:
        """Class with the most negative eigenvalue, if the check fails."""
        if self.ok:
            return None
        return int(np.argmin(self.min_eigs))

    @property
    def verdict(self) -> str:
        if self.kind == "ppt":
            return "PPT" if self.ok else "violated"
        return "PSD" if self.ok else "violated"

    def to_json(self) -> dict:
        return {"kind": self.kind, "verdict": self.verdict, "min_eigs": list(self.min_eigs),
                "witness": self.witness}


PptReport = BlockReport


def _resolve_perm(rho, p: Optional[PermutationZd], d: int) -> PermutationZd:
    if p is not None:
        return p
    return getattr(rho, "permutation", None) or PermutationZd.identity(d)


def check_support(m: np.ndarray, p: PermutationZd, tol: float = 1e-14) -> None:
    d = local_dim(m.shape[0])
    outside = (np.abs(m) > tol) & ~support_pattern(d, p).mask()
    if outside.any():
        raise SupportViolation([tuple(map(int, rc)) for rc in np.argwhere(outside)])


def ppt_block(m: np.ndarray, p: PermutationZd, y: int) -> np.ndarray:
    """d x d block with (j, k) entry ``rho[j (y - p(k)), k (y - p(j))]``."""
    d = p.d
    pv = p.as_array()
    j = np.arange(d)[:, None]
    k = np.arange(d)[None, :]
    rows = d * j + (y - pv[k]) % d
    cols = d * k + (y - pv[j]) % d
    return m[rows, cols]


def ppt_blocks(rho, p: Optional[PermutationZd] = None, tol: float = EIG_TOL) -> BlockReport:
    """PPT test through the d classes of the partial transpose."""
    m = as_matrix(rho)
    d = local_dim(m.shape[0])
    p = _resolve_perm(rho, p, d)
    check_support(m, p)
    mins = tuple(is_psd(ppt_block(m, p, y), tol)[1] for y in range(d))
    return BlockReport("ppt", mins, tol)


def positivity_blocks(rho, p: Optional[PermutationZd] = None, tol: float = EIG_TOL) -> BlockReport:
    m = as_matrix(rho)
    d = local_dim(m.shape[0])
    p = _resolve_perm(rho, p, d)
    check_support(m, p)
    pattern = support_pattern(d, p)
    mins = tuple(is_psd(pattern.restrict(m, x), tol)[1] for x in range(d))
    return BlockReport("positivity", mins, tol)


def full_ppt_min_eig(rho) -> float:
    """Oracle: smallest eigenvalue of the full partial transpose (LAPACK)."""
    return float(np.linalg.eigvalsh(partial_transpose(rho))[0])
