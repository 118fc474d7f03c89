"""Lines in Z_d x Z_d and the circulant support pattern they generate.

Flat indices follow ``r = d * j1 + j2`` throughout the package; the entry at
flat position ``(r, s)`` is entry ``(j2, k2)`` of block ``B(j1, k1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import GfAddTable, PermutationZd, gf_add_table

__all__ = [
    "Line",
    "IndexClass",
    "SupportPattern",
    "slope_one_line",
    "vertical_line",
    "horizontal_line",
    "support_pattern",
    "gf_support_pattern",
    "tensor_to_flat",
    "flat_to_tensor",
    "render_text",
    "render_svg",
]


def tensor_to_flat(d: int, j1: int, j2: int) -> int:
    if not (0 <= j1 < d and 0 <= j2 < d):
        raise IndexError(f"tensor index ({j1}, {j2}) out of range for d={d}")
    return d * j1 + j2


def flat_to_tensor(d: int, r: int) -> tuple[int, int]:
    if not 0 <= r < d * d:
        raise IndexError(f"flat index {r} out of range for d={d}")
    return divmod(r, d)


@dataclass(frozen=True)
class Line:
    d: int
    points: frozenset

    def __post_init__(self):
        if len(self.points) != self.d:
            raise ValueError(f"a line in Z_{self.d}^2 has {self.d} points, got {len(self.points)}")

    def as_matrix(self) -> np.ndarray:
        """0/1 matrix with a one at row y, column x (y-axis pointing down)."""
        m = np.zeros((self.d, self.d), dtype=int)
        for x, y in self.points:
            m[y, x] = 1
        return m


def _check_offset(d: int, offset: int) -> None:
    if not 0 <= offset < d:
        raise ValueError(f"offset {offset} out of range for d={d}")


def slope_one_line(d: int, offset: int) -> Line:
    """{(x, x + offset)}; the d offsets partition Z_d^2."""
    _check_offset(d, offset)
    return Line(d, frozenset((x, (x + offset) % d) for x in range(d)))


def vertical_line(d: int, offset: int) -> Line:
    _check_offset(d, offset)
    return Line(d, frozenset((offset, y) for y in range(d)))


def horizontal_line(d: int, offset: int) -> Line:
    _check_offset(d, offset)
    return Line(d, frozenset((x, offset) for x in range(d)))


@dataclass(frozen=True)
class IndexClass:
    x: int
    positions: tuple  # one (r, s) flat pair per block, ordered by block (j, k)


@dataclass(frozen=True)
class SupportPattern:
    """The 0/1 pattern M_p together with its index classes I_p(x).

    ``class_index[x]`` is an integer array of shape ``(d, d, 2)`` holding the
    flat position of class ``x`` inside block ``(j, k)``.
    """

    d: int
    permutation: Optional[PermutationZd]
    class_index: np.ndarray
    gf: Optional[GfAddTable] = field(default=None, compare=False)

    @property
    def classes(self) -> list[IndexClass]:
        out = []
        for x in range(self.d):
            pos = tuple(tuple(int(v) for v in self.class_index[x, j, k])
                        for j in range(self.d) for k in range(self.d))
            out.append(IndexClass(x, pos))
        return out

    @property
    def support(self) -> frozenset:
        flat = self.class_index.reshape(-1, 2)
        return frozenset(map(tuple, flat.tolist()))

    def mask(self) -> np.ndarray:
        m = np.zeros((self.d**2, self.d**2), dtype=bool)
        flat = self.class_index.reshape(-1, 2)
        m[flat[:, 0], flat[:, 1]] = True
        return m

    def labels(self) -> np.ndarray:
        """d^2 x d^2 integer array: class label at support positions, -1 elsewhere."""
        lab = -np.ones((self.d**2, self.d**2), dtype=int)
        for x in range(self.d):
            idx = self.class_index[x].reshape(-1, 2)
            lab[idx[:, 0], idx[:, 1]] = x
        return lab

    def restrict(self, matrix: np.ndarray, x: int) -> np.ndarray:
        """The d x d matrix of entries of ``matrix`` on class ``x``, indexed by block (j, k)."""
        idx = self.class_index[x]
        return np.asarray(matrix)[idx[..., 0], idx[..., 1]]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "permutation": None if self.permutation is None else self.permutation.to_json(),
            "gf": None if self.gf is None else self.gf.q,
            "classes": [self.class_index[x].reshape(-1, 2).tolist() for x in range(self.d)],
        }


def support_pattern(d: int, p: Optional[PermutationZd] = None) -> SupportPattern:
    """Build M_p: class x occupies ``(d*j + x + p(j), d*k + x + p(k))`` in every block (j, k)."""
    if p is None:
        p = PermutationZd.identity(d)
    if p.d != d:
        raise ValueError(f"permutation has length {p.d}, expected {d}")
    pv = p.as_array()
    x = np.arange(d)[:, None, None]
    j = np.arange(d)[None, :, None]
    k = np.arange(d)[None, None, :]
    rows = d * j + (x + pv[j]) % d
    cols = d * k + (x + pv[k]) % d
    idx = np.stack(np.broadcast_arrays(rows, cols), axis=-1)
    idx.setflags(write=False)
    return SupportPattern(d, p, idx)


def gf_support_pattern(table: GfAddTable | int) -> SupportPattern:
    """Same construction as :func:`support_pattern` with GF(q) addition and identity labels."""
    if not isinstance(table, GfAddTable):
        table = gf_add_table(int(table))
    q = table.q
    add = table.table
    x = np.arange(q)[:, None, None]
    j = np.arange(q)[None, :, None]
    k = np.arange(q)[None, None, :]
    rows = q * j + add[j, x]
    cols = q * k + add[k, x]
    idx = np.stack(np.broadcast_arrays(rows, cols), axis=-1)
    idx.setflags(write=False)
    return SupportPattern(q, None, idx, gf=table)


def render_text(pattern: SupportPattern) -> str:
    """Dot / x_k picture of the pattern, one matrix row per line."""
    lab = pattern.labels()
    rows = []
    for row in lab:
        rows.append(" ".join("." if v < 0 else f"x_{v}" for v in row))
    return "\n".join(rows) + "\n"


def render_svg(pattern: SupportPattern, cell: int = 18) -> str:
    lab = pattern.labels()
    n = lab.shape[0]
    size = n * cell
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    d = pattern.d
    for b in range(1, d):
        pos = b * d * cell
        out.append(f'<line x1="{pos}" y1="0" x2="{pos}" y2="{size}" stroke="#bbb"/>')
        out.append(f'<line x1="0" y1="{pos}" x2="{size}" y2="{pos}" stroke="#bbb"/>')
    for r in range(n):
        for s in range(n):
            v = lab[r, s]
            cx, cy = s * cell + cell // 2, r * cell + cell // 2
            if v < 0:
                out.append(f'<circle cx="{cx}" cy="{cy}" r="1.5" fill="#888"/>')
            else:
                out.append(f'<text x="{cx}" y="{cy + 4}" font-size="{cell // 2}" '
                           f'text-anchor="middle">x{v}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
