"""Modular arithmetic on Z_d, small Galois-field addition tables and permutations."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "ModRing",
    "GfAddTable",
    "PermutationZd",
    "eta_pow",
    "is_prime",
    "mod_inverse",
    "binom2",
    "invert_permutation",
    "negate_permutation",
    "gf_add_table",
]


def is_prime(n: int) -> bool:
    """Trial division."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _check_dim(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValueError(f"invalid dimension d={d!r}; need an integer d >= 2")


@dataclass(frozen=True)
class ModRing:
    """The ring Z_d."""

    d: int

    def __post_init__(self):
        _check_dim(self.d)

    @property
    def is_prime(self) -> bool:
        return is_prime(self.d)

    def add(self, x: int, y: int) -> int:
        return (x + y) % self.d

    def neg(self, x: int) -> int:
        return (-x) % self.d

    def mul(self, x: int, y: int) -> int:
        return (x * y) % self.d

    def inv(self, x: int) -> int:
        return mod_inverse(x, self.d)

    def elements(self) -> range:
        return range(self.d)


def mod_inverse(x: int, d: int) -> int:
    """Multiplicative inverse of ``x`` modulo a prime ``d`` (Fermat)."""
    if not is_prime(d):
        raise ValueError(f"modular inverse only supported for prime d, got {d}")
    x %= d
    if x == 0:
        raise ZeroDivisionError("0 has no multiplicative inverse")
    return pow(x, d - 2, d)


def binom2(k: int) -> int:
    """k choose 2 over the integers; 0 for k in {0, 1}."""
    return k * (k - 1) // 2


def eta_pow(d: int, e: int) -> complex:
    """Return eta**e with eta = exp(2*pi*i/d), reducing e mod d first."""
    _check_dim(d)
    e = int(e) % d
    if e == 0:
        return 1.0 + 0.0j
    # exact quarter turns so that d in {2, 4} gives clean values
    if (4 * e) % d == 0:
        return (1.0, 1.0j, -1.0, -1.0j)[(4 * e) // d]
    return cmath.exp(2j * math.pi * e / d)


@lru_cache(maxsize=None)
def eta_table(d: int) -> np.ndarray:
    """Read-only array of eta**e for e = 0..d-1."""
    tab = np.array([eta_pow(d, e) for e in range(d)], dtype=complex)
    tab.setflags(write=False)
    return tab


@dataclass(frozen=True)
class PermutationZd:
    """A permutation ``p`` of Z_d with ``p(0) == 0``.

    Validity is checked once here; everything downstream trusts it.
    """

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        d = len(vals)
        _check_dim(d)
        if sorted(vals) != list(range(d)):
            raise ValueError(f"{list(vals)} is not a permutation of Z_{d}")
        if vals[0] != 0:
            raise ValueError(f"permutation must fix 0, got p(0)={vals[0]}")

    @classmethod
    def identity(cls, d: int) -> PermutationZd:
        return cls(tuple(range(d)))

    @classmethod
    def random(cls, d: int, rng: np.random.Generator) -> PermutationZd:
        rest = rng.permutation(np.arange(1, d))
        return cls((0, *rest.tolist()))

    @property
    def d(self) -> int:
        return len(self.values)

    @property
    def is_identity(self) -> bool:
        return self.values == tuple(range(self.d))

    def __call__(self, x: int) -> int:
        return self.values[x % self.d]

    def __len__(self) -> int:
        return self.d

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=int)

    def to_json(self) -> list[int]:
        return list(self.values)

    @classmethod
    def from_json(cls, data) -> PermutationZd:
        return cls(tuple(data))


def invert_permutation(p: PermutationZd) -> PermutationZd:
    sigma = [0] * p.d
    for x, px in enumerate(p.values):
        sigma[px] = x
    return PermutationZd(tuple(sigma))


def negate_permutation(p: PermutationZd) -> PermutationZd:
    return PermutationZd(tuple((-v) % p.d for v in p.values))


@dataclass(frozen=True)
class GfAddTable:
    """Addition table of GF(q) in a polynomial basis.

    Element ``i`` is the polynomial whose coefficients are the base-``char``
    digits of ``i`` (least significant digit is the constant term), so for
    GF(4) the labels 0, 1, 2, 3 stand for 0, 1, lambda, lambda + 1.
    """

    q: int
    char: int
    table: np.ndarray

    def add(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def neg(self, x: int) -> int:
        return int(np.flatnonzero(self.table[x] == 0)[0])

    def label(self, x: int) -> str:
        """Polynomial spelling of element ``x``, e.g. 'lambda+1'."""
        digits = []
        n = x
        while n:
            digits.append(n % self.char)
            n //= self.char
        if not digits:
            return "0"
        parts = []
        for power in range(len(digits) - 1, -1, -1):
            c = digits[power]
            if c == 0:
                continue
            mono = {0: "", 1: "lambda"}.get(power, f"lambda^{power}")
            if not mono:
                parts.append(str(c))
            else:
                parts.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(parts)


_GF_ORDERS = {4: (2, 2), 8: (2, 3), 9: (3, 2)}


@lru_cache(maxsize=None)
def gf_add_table(q: int) -> GfAddTable:
    """Addition table of GF(q) for q in {4, 8, 9}: digit-wise addition mod the characteristic."""
    if q not in _GF_ORDERS:
        raise ValueError(f"unsupported Galois field order q={q}; supported: 4, 8, 9")
    char, n = _GF_ORDERS[q]
    digits = np.array([[(x // char**i) % char for i in range(n)] for x in range(q)])
    weights = char ** np.arange(n)
    summed = (digits[:, None, :] + digits[None, :, :]) % char
    table = summed @ weights
    table.setflags(write=False)
    return GfAddTable(q=q, char=char, table=table)
