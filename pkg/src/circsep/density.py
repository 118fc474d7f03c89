"""Circulant bipartite densities: a generic block builder and the named families.

Entries are addressed in tensor notation ``rho[n1 n2, m1 m2]`` which is the
flat entry ``[d*n1 + n2, d*m1 + m2]``.  For the identity pattern the
circulant entries are ``rho[n (n+r), (n+k) (n+r+k)]``: ``r`` labels the index
class and ``k`` the block diagonal (``k = 0`` is the main diagonal).

The Werner and DiVincenzo builders return the partial-transpose form of the
state (flagged by ``partial_transpose_form``); that matrix lies on the
identity pattern while the state itself does not.  Separability is invariant
under partial transposition so the analysis applies to either.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .algebra import PermutationZd, eta_table, is_prime
from .analysis.linalg import is_psd, local_dim
from .geometry import SupportPattern, support_pattern
from .weyl import spin_basis

__all__ = [
    "DensityMatrix",
    "ClassBlocks",
    "ProductEntrySpec",
    "random_product_entry_spec",
    "NonPsdBlockError",
    "SUPPORT_TOL",
    "from_class_blocks",
    "to_class_blocks",
    "isotropic",
    "werner",
    "werner_x",
    "divincenzo",
    "horodecki_alpha",
    "bhn_projector",
    "bhn_density",
    "bhn_density_from_projectors",
    "bhn_line_weights",
    "bhn_line_state",
    "bhn_two_projector",
    "general_cr_density",
    "product_entry_density",
    "mix_with_identity",
    "random_circulant",
    "circulant_entry",
    "FAMILIES",
    "build_family",
]

SUPPORT_TOL = 1e-14
_CHECK_TOL = 1e-12


class NonPsdBlockError(ValueError):
    """A class block of a would-be density is not positive semidefinite."""

    def __init__(self, x: int, min_eig: float):
        super().__init__(f"class block x={x} is not PSD (min eigenvalue {min_eig:.3e})")
        self.x = x
        self.min_eig = min_eig


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A d^2 x d^2 Hermitian, trace-one matrix, optionally tied to a support pattern M_p.

    Positivity is deliberately not part of the invariant: partial-transpose
    forms of states need not be PSD.  Use ``analysis.positivity_blocks``.
    """

    entries: np.ndarray
    permutation: Optional[PermutationZd] = None
    partial_transpose_form: bool = False
    family: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density must be a square matrix")
        d = local_dim(m.shape[0])
        herm = np.abs(m - m.conj().T).max()
        if herm > _CHECK_TOL:
            raise ValueError(f"matrix is not Hermitian (max deviation {herm:.3e})")
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1.0) > _CHECK_TOL:
            raise ValueError(f"trace is {tr!r}, expected 1")
        if self.permutation is not None:
            if self.permutation.d != d:
                raise ValueError("permutation length does not match the local dimension")
            outside = (np.abs(m) > SUPPORT_TOL) & ~support_pattern(d, self.permutation).mask()
            if outside.any():
                bad = [tuple(map(int, rc)) for rc in np.argwhere(outside)[:8]]
                raise ValueError(f"entries outside support(M_p) at flat positions {bad}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def d(self) -> int:
        return local_dim(self.entries.shape[0])

    @property
    def pattern(self) -> Optional[SupportPattern]:
        if self.permutation is None:
            return None
        return support_pattern(self.d, self.permutation)

    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def with_entries(self, entries: np.ndarray, **changes) -> DensityMatrix:
        kw = dict(permutation=self.permutation, partial_transpose_form=self.partial_transpose_form,
                  family=self.family)
        kw.update(changes)
        return DensityMatrix(entries, **kw)

    def to_json(self) -> dict:
        flat = self.entries.reshape(-1)
        return {
            "d": self.d,
            "permutation": None if self.permutation is None else self.permutation.to_json(),
            "partial_transpose_form": self.partial_transpose_form,
            "family": self.family,
            "entries": [[float(z.real), float(z.imag)] for z in flat],
        }

    @classmethod
    def from_json(cls, data: dict) -> DensityMatrix:
        """Load either the full entry format or a named-family shorthand."""
        if "entries" not in data:
            if "family" not in data:
                raise ValueError("density JSON needs 'entries' or 'family'")
            params = {k: v for k, v in data.items() if k != "family"}
            return build_family(data["family"], **params)
        d = int(data["d"])
        raw = np.asarray(data["entries"], dtype=float)
        if raw.shape != (d**4, 2):
            raise ValueError(f"expected {d**4} [re, im] pairs, got array of shape {raw.shape}")
        entries = (raw[:, 0] + 1j * raw[:, 1]).reshape(d * d, d * d)
        perm = data.get("permutation")
        return cls(entries,
                   permutation=None if perm is None else PermutationZd.from_json(perm),
                   partial_transpose_form=bool(data.get("partial_transpose_form", False)),
                   family=data.get("family"))


def _identity_perm(d: int, p: Optional[PermutationZd]) -> PermutationZd:
    return PermutationZd.identity(d) if p is None else p


# -- class blocks -------------------------------------------------------------

@dataclass(frozen=True)
class ClassBlocks:
    """``blocks[x][j, k]`` is the entry of rho at the unique class-x position of block (j, k)."""

    d: int
    permutation: PermutationZd
    blocks: np.ndarray  # (d, d, d) complex

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "permutation": self.permutation.to_json(),
            "blocks": [[[[float(z.real), float(z.imag)] for z in row] for row in blk]
                       for blk in self.blocks],
        }

    @classmethod
    def from_json(cls, data: dict) -> ClassBlocks:
        d = int(data["d"])
        perm = data.get("permutation")
        raw = np.asarray(data["blocks"], dtype=float)
        if raw.shape == (d, d, d, 2):
            blocks = raw[..., 0] + 1j * raw[..., 1]
        elif raw.shape == (d, d, d):
            blocks = raw.astype(complex)
        else:
            raise ValueError(f"blocks must have shape ({d}, {d}, {d}[, 2]), got {raw.shape}")
        p = PermutationZd.identity(d) if perm is None else PermutationZd.from_json(perm)
        return cls(d, p, blocks)


def from_class_blocks(blocks: ClassBlocks) -> DensityMatrix:
    d = blocks.d
    arr = np.asarray(blocks.blocks, dtype=complex)
    if arr.shape != (d, d, d):
        raise ValueError(f"expected blocks of shape ({d}, {d}, {d}), got {arr.shape}")
    for x in range(d):
        herm = np.abs(arr[x] - arr[x].conj().T).max()
        if herm > _CHECK_TOL:
            raise ValueError(f"class block x={x} is not Hermitian (deviation {herm:.3e})")
    total = sum(np.trace(arr[x]).real for x in range(d))
    if abs(total - 1.0) > _CHECK_TOL:
        raise ValueError(f"class blocks have total trace {total!r}, expected 1")
    for x in range(d):
        ok, lo = is_psd(arr[x])
        if not ok:
            raise NonPsdBlockError(x, lo)
    pattern = support_pattern(d, blocks.permutation)
    m = np.zeros((d * d, d * d), dtype=complex)
    idx = pattern.class_index
    for x in range(d):
        m[idx[x, ..., 0], idx[x, ..., 1]] = arr[x]
    return DensityMatrix(m, permutation=blocks.permutation)


def to_class_blocks(rho, p: Optional[PermutationZd] = None) -> ClassBlocks:
    m = np.asarray(getattr(rho, "entries", rho), dtype=complex)
    d = local_dim(m.shape[0])
    if p is None:
        p = getattr(rho, "permutation", None) or PermutationZd.identity(d)
    pattern = support_pattern(d, p)
    return ClassBlocks(d, p, np.stack([pattern.restrict(m, x) for x in range(d)]))


# -- helpers for identity-pattern entries -------------------------------------

def circulant_entry(d: int, n: int, r: int, k: int) -> tuple[int, int]:
    """Flat position of ``rho[n (n+r), (n+k) (n+r+k)]``."""
    return d * (n % d) + (n + r) % d, d * ((n + k) % d) + (n + r + k) % d


def _class_zero_density(d: int, offdiag: float, diag: np.ndarray, *, pt_form=False,
                        family=None) -> DensityMatrix:
    """Diagonal ``diag`` (d x d array over (n1, n2)) plus a constant on class-0 coherences."""
    m = np.diag(np.asarray(diag, dtype=float).reshape(-1)).astype(complex)
    for n in range(d):
        for k in range(1, d):
            r, s = circulant_entry(d, n, 0, k)
            m[r, s] = offdiag
    return DensityMatrix(m, permutation=PermutationZd.identity(d), partial_transpose_form=pt_form,
                         family=family)


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name}={value} outside [0, 1]")


# -- named families -----------------------------------------------------------

def isotropic(d: int, lam: float) -> DensityMatrix:
    """``lam |Phi+><Phi+| + (1 - lam) I / d^2``: class-0 coherences ``lam/d``."""
    _check_unit("lambda", lam)
    diag = np.full((d, d), (1 - lam) / d**2)
    diag[np.arange(d), np.arange(d)] += lam / d
    return _class_zero_density(d, lam / d, diag,
                               family={"family": "isotropic", "d": d, "lambda": lam})


def werner_x(d: int, p: float) -> tuple[float, float]:
    """``(x_minus, x_plus)`` with ``x_pm = [(1-p)/(d+1) +- p/(d-1)] / d``."""
    base = (1 - p) / (d + 1)
    return (base - p / (d - 1)) / d, (base + p / (d - 1)) / d


def werner(d: int, p: float) -> DensityMatrix:
    """Partial-transpose form of the Werner state.

    Class-0 coherences ``x_-``, ``|jj>`` diagonal ``x_- + x_+`` and the other
    diagonal entries ``x_+``.
    """
    if d < 2:
        raise ValueError(f"invalid dimension d={d}")
    _check_unit("p", p)
    xm, xp = werner_x(d, p)
    diag = np.full((d, d), xp)
    diag[np.arange(d), np.arange(d)] = xm + xp
    return _class_zero_density(d, xm, diag, pt_form=True,
                               family={"family": "werner", "d": d, "p": p})


def divincenzo(d: int, b: float, c: float) -> DensityMatrix:
    """Partial-transpose form of ``a sum|ii><ii| + symmetric/antisymmetric pair mixtures``.

    Class-0 coherences ``(c - b)/2``; ``|jj>`` diagonal ``a = 1/d - (b+c)(d-1)/2``;
    remaining diagonal ``(b + c)/2``.
    """
    a = 1.0 / d - (b + c) * (d - 1) / 2
    off = (b + c) / 2
    if a < 0 or off < 0:
        raise ValueError(f"negative diagonal for b={b}, c={c}: a={a:.6g}, (b+c)/2={off:.6g}")
    diag = np.full((d, d), off)
    diag[np.arange(d), np.arange(d)] = a
    return _class_zero_density(d, (c - b) / 2, diag, pt_form=True,
                               family={"family": "divincenzo", "d": d, "b": b, "c": c})


def horodecki_alpha(alpha: float) -> DensityMatrix:
    """The 3x3 Horodecki state ``2/7 |psi+><psi+| + alpha/7 s_+ + (5 - alpha)/7 s_-``.

    Class-0 coherences and ``|jj>`` diagonal are 2/21; ``|j, j+1>`` carries
    ``alpha/21`` and ``|j, j-1>`` carries ``(5 - alpha)/21``.
    """
    if not 0.0 <= alpha <= 5.0:
        raise ValueError(f"alpha={alpha} outside [0, 5]")
    d = 3
    diag = np.zeros((d, d))
    for j in range(d):
        diag[j, j] = 2 / 21
        diag[j, (j + 1) % d] = alpha / 21
        diag[j, (j - 1) % d] = (5 - alpha) / 21
    return _class_zero_density(d, 2 / 21, diag, family={"family": "horodecki", "alpha": alpha})


# -- Baumgartner-Hiesmayr-Narnhofer mixtures -----------------------------------

def bhn_projector(d: int, j: int, k: int) -> np.ndarray:
    """Trace-one projector onto ``(S_{j,k} (x) I) sum_u |u u>``, normalised by 1/d."""
    phi = np.zeros(d * d, dtype=complex)
    phi[np.arange(d) * (d + 1)] = 1.0
    omega = np.kron(spin_basis(d)[j, k], np.eye(d)) @ phi
    return np.outer(omega, omega.conj()) / d


def _check_weights(d: int, c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.shape != (d, d):
        raise ValueError(f"weights must have shape ({d}, {d}), got {c.shape}")
    if (c < -1e-15).any():
        raise ValueError("weights must be non-negative")
    if abs(c.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights sum to {c.sum()!r}, expected 1")
    return np.clip(c, 0.0, None)


def bhn_density(d: int, c) -> DensityMatrix:
    """``sum c_{j,k} P~_{j,k}`` built from the closed-form entries.

    ``rho[n (n+r), (n+k) (n+r+k)] = (1/d) sum_j c_{j,r} eta^{-j k}``.
    """
    c = _check_weights(d, c)
    eta = eta_table(d)
    m = np.zeros((d * d, d * d), dtype=complex)
    for r in range(d):
        for k in range(d):
            val = sum(c[j, r] * eta[(-j * k) % d] for j in range(d)) / d
            for n in range(d):
                row, col = circulant_entry(d, n, r, k)
                m[row, col] = val
    return DensityMatrix(m, permutation=PermutationZd.identity(d),
                         family={"family": "bhn", "d": d, "c": c.tolist()})


def bhn_density_from_projectors(d: int, c) -> np.ndarray:
    c = _check_weights(d, c)
    return sum(c[j, k] * bhn_projector(d, j, k) for j in range(d) for k in range(d))


def bhn_line_weights(d: int, s: int = 0, t: int = 0, vertical: Optional[int] = None) -> np.ndarray:
    """Weights ``1/d`` on the line ``r = s j + t`` (or on column ``j = vertical``)."""
    if not is_prime(d):
        raise ValueError(f"line states need prime d, got {d}")
    c = np.zeros((d, d))
    if vertical is not None:
        c[vertical % d, :] = 1.0 / d
    else:
        for j in range(d):
            c[j, (s * j + t) % d] = 1.0 / d
    return c


def bhn_line_state(d: int, s: int = 0, t: int = 0, vertical: Optional[int] = None) -> DensityMatrix:
    rho = bhn_density(d, bhn_line_weights(d, s, t, vertical))
    fam = {"family": "bhn-line", "d": d, "s": s, "t": t}
    if vertical is not None:
        fam = {"family": "bhn-line", "d": d, "vertical": vertical}
    return rho.with_entries(rho.entries, family=fam)


def mix_with_identity(rho, t: float) -> DensityMatrix:
    """``(1 - t) I / d^2 + t rho``."""
    _check_unit("t", t)
    m = np.asarray(getattr(rho, "entries", rho), dtype=complex)
    d = local_dim(m.shape[0])
    out = (1 - t) * np.eye(d * d) / d**2 + t * m
    if isinstance(rho, DensityMatrix):
        fam = None if rho.family is None else {"mix": t, "of": rho.family}
        return rho.with_entries(out, family=fam)
    return DensityMatrix(out)


def bhn_two_projector(alpha: float, beta: float) -> DensityMatrix:
    """``(1 - alpha - beta) I/9 + alpha P~_{1,0} + beta P~_{2,0}`` for d = 3."""
    if alpha < 0 or beta < 0 or alpha + beta > 1 + 1e-15:
        raise ValueError(f"need alpha, beta >= 0 and alpha + beta <= 1, got {alpha}, {beta}")
    d = 3
    t = alpha + beta
    if t == 0:
        rho = DensityMatrix(np.eye(9) / 9, permutation=PermutationZd.identity(d))
    else:
        c = np.zeros((d, d))
        c[1, 0] = alpha / t
        c[2, 0] = beta / t
        rho = mix_with_identity(bhn_density(d, c), min(t, 1.0))
    return rho.with_entries(rho.entries, family={"family": "bhn-two", "alpha": alpha, "beta": beta})


# -- generic circulant builders -----------------------------------------------

def general_cr_density(d: int, c_r, diag) -> DensityMatrix:
    """Identity-pattern matrix with ``rho[n1 n2, (n1+k)(n2+k)] = c_{n2-n1}`` for k != 0."""
    c_r = np.asarray(c_r, dtype=float)
    m = np.diag(np.asarray(diag, dtype=float).reshape(-1)).astype(complex)
    for r in range(d):
        for n in range(d):
            for k in range(1, d):
                row, col = circulant_entry(d, n, r, k)
                m[row, col] = c_r[r]
    return DensityMatrix(m, permutation=PermutationZd.identity(d),
                         family={"family": "general-cr", "d": d, "c_r": c_r.tolist()})


@dataclass(frozen=True)
class ProductEntrySpec:
    """Off-diagonals ``rho[n (n+r), (n+k)(n+r+k)] = x(n, r) conj(x(n+k, r))``, k != 0.

    ``diagonal`` is indexed like the flat diagonal, i.e. ``diagonal[d*n1 + n2]``.
    """

    d: int
    x: np.ndarray
    diagonal: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex)
        diag = np.asarray(self.diagonal, dtype=float).reshape(-1)
        if x.shape != (self.d, self.d):
            raise ValueError(f"x must have shape ({self.d}, {self.d})")
        if diag.shape != (self.d**2,):
            raise ValueError(f"diagonal must have {self.d**2} entries")
        if (diag < 0).any():
            raise ValueError("diagonal entries must be non-negative")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "diagonal", diag)

    def weight(self) -> float:
        """``sum_{n,r} |x(n,r)|^2``."""
        return float(np.sum(np.abs(self.x) ** 2))


def product_entry_density(spec: ProductEntrySpec) -> DensityMatrix:
    d, x = spec.d, spec.x
    m = np.diag(spec.diagonal).astype(complex)
    for r in range(d):
        for n in range(d):
            for k in range(1, d):
                row, col = circulant_entry(d, n, r, k)
                m[row, col] = x[n, r] * np.conj(x[(n + k) % d, r])
    rho = DensityMatrix(m, permutation=PermutationZd.identity(d), family={"family": "product-entry"})
    blocks = to_class_blocks(rho)
    for cls in range(d):
        ok, lo = is_psd(blocks.blocks[cls])
        if not ok:
            raise NonPsdBlockError(cls, lo)
    return rho


def random_product_entry_spec(d: int, rng: np.random.Generator, spread: float = 1.0) -> ProductEntrySpec:
    """Random trace-one spec whose class blocks are PSD by construction.

    Each diagonal entry ``rho[n(n+r), n(n+r)]`` is at least ``|x(n, r)|^2``,
    so every class block is a non-negative diagonal plus a rank-one term.
    Every entry also gets an extra ``spread * u * sum|x|^2`` with ``u`` uniform
    in [0.5, 1.5]; ``spread >= 2`` therefore guarantees
    ``min diag >= sum|x|^2`` while small values usually violate it.
    """
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    xw = float(np.sum(np.abs(x) ** 2))
    diag = np.zeros((d, d))
    for n in range(d):
        for r in range(d):
            diag[n, (n + r) % d] = abs(x[n, r]) ** 2 + spread * rng.uniform(0.5, 1.5) * xw
    total = diag.sum()
    return ProductEntrySpec(d, x / np.sqrt(total), diag.reshape(-1) / total)


def random_circulant(d: int, rng: np.random.Generator, p: Optional[PermutationZd] = None,
                     max_rank: Optional[int] = None) -> DensityMatrix:
    """Random PSD circulant density on M_p: independent random PSD class blocks."""
    p = _identity_perm(d, p)
    blocks = []
    for _ in range(d):
        rank = rng.integers(1, (max_rank or d) + 1)
        g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
        blocks.append(g @ g.conj().T * rng.uniform(0.2, 1.0))
    arr = np.array(blocks)
    arr /= sum(np.trace(b).real for b in arr)
    return from_class_blocks(ClassBlocks(d, p, arr))


# -- registry used by the CLI and sweeps ---------------------------------------

def _bhn_line_family(d: int = 3, s: int = 1, t: int = 0, vertical: Optional[int] = None,
                     mix: Optional[float] = None) -> DensityMatrix:
    rho = bhn_line_state(d, s, t, vertical)
    return rho if mix is None else mix_with_identity(rho, mix)


def _only_d3(name: str, d: int):
    raise ValueError(f"family {name!r} is defined for d=3 only, got d={d}")


FAMILIES: dict[str, Callable[..., DensityMatrix]] = {
    "isotropic": lambda d=3, **kw: isotropic(d, kw["lambda"]),
    "werner": lambda d=3, p=0.0: werner(d, p),
    "divincenzo": lambda d=3, b=0.0, c=0.0: divincenzo(d, b, c),
    "horodecki": lambda alpha, d=3: horodecki_alpha(alpha) if d == 3 else _only_d3("horodecki", d),
    "bhn-line": _bhn_line_family,
    "bhn-two": lambda alpha=0.0, beta=0.0, d=3: bhn_two_projector(alpha, beta) if d == 3 else _only_d3("bhn-two", d),
}


def build_family(name: str, **params) -> DensityMatrix:
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}; known: {sorted(FAMILIES)}")
    params = {k: v for k, v in params.items() if v is not None}
    try:
        return FAMILIES[name](**params)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad parameters for family {name!r}: {exc}") from exc
