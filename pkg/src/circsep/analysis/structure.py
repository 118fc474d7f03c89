"""Structural coefficients of a circulant density in the product-projector basis.

For prime ``d`` and support inside the identity pattern,

    rho - rho_D = sum_{a1,a2,m1,m2} C(a, m) P_{a1,1}(m1) (x) P_{a2,1}(m2)

with ``d^2 C(a, m) = sum_{k != 0, n1, n2} xi_{a1}^k xi_{a2}^k
eta^{-C(k,2)(a1+a2) - k(m1+m2) - k(a1 n1 + a2 n2)} rho[n1 n2, (n1+k)(n2+k)]``.
The slope phases ``xi_a`` are 1 for odd ``d`` (see ``weyl.slope_phase``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..algebra import PermutationZd, binom2, eta_table, invert_permutation, is_prime
from ..weyl import projector_stack, relabel_operator, slope_phase, spin_coefficients
from .linalg import as_matrix, local_dim
from .ppt import check_support

__all__ = ["StructuralCoefficients", "structural_coefficients", "spin_l1_condition",
           "relabel_to_identity", "product_projectors", "SPIN_L1_BOUND"]

SPIN_L1_BOUND = 2.0


@dataclass(frozen=True)
class StructuralCoefficients:
    """``C[a1, a2, m1, m2]`` (real) plus per-slope shifts ``mu[a1, a2]``.

    ``sigma`` is the relabelling applied to the first factor when the input
    pattern is not the identity (None otherwise).
    """

    d: int
    C: np.ndarray
    mu: np.ndarray
    max_imag: float
    diagonal: np.ndarray
    sigma: Optional[PermutationZd] = None

    @property
    def mu_sum(self) -> float:
        return float(self.mu.sum())

    def reconstruct(self) -> np.ndarray:
        """``rho_D + sum C P (x) P`` in the original labelling."""
        return np.diag(self.diagonal).astype(complex) + product_projectors(self.d, self.C, self.sigma)


def product_projectors(d: int, weights: np.ndarray, sigma: Optional[PermutationZd] = None) -> np.ndarray:
    """``sum_{a,m} w[a1,a2,m1,m2] (Pi P_{a1}(m1) Pi^T) (x) P_{a2}(m2)``."""
    stack = projector_stack(d)
    left = stack
    if sigma is not None:
        pi = relabel_operator(sigma)
        left = np.einsum("ij,abjk,lk->abil", pi, stack, pi)
    # out[i, k, j, l] = sum w[a,b,m,n] L[a,m,i,j] R[b,n,k,l]
    out = np.einsum("abmn,amij,bnkl->ikjl", weights, left, stack, optimize=True)
    return out.reshape(d * d, d * d)


def relabel_to_identity(m: np.ndarray, p: PermutationZd) -> tuple[np.ndarray, Optional[PermutationZd]]:
    """Conjugate by ``Pi_sigma (x) I`` (sigma = p^{-1}) so the support becomes the identity pattern."""
    if p.is_identity:
        return m, None
    sigma = invert_permutation(p)
    pi = np.kron(relabel_operator(sigma), np.eye(p.d))
    return pi.T @ m @ pi, sigma


@dataclass(frozen=True)
class _Phases:
    k_phase: np.ndarray  # (k, a1, a2, m1, m2)
    n_phase: np.ndarray  # (k, a, n)


_PHASE_CACHE: dict[int, _Phases] = {}


def _phases(d: int) -> _Phases:
    if d in _PHASE_CACHE:
        return _PHASE_CACHE[d]
    eta = eta_table(d)
    ks = np.arange(1, d)
    a = np.arange(d)
    m = np.arange(d)
    expo = (-(np.array([binom2(int(k)) for k in ks])[:, None, None, None, None]
              * (a[:, None, None, None] + a[None, :, None, None]))
            - ks[:, None, None, None, None] * (m[:, None] + m[None, :])) % d
    xi = np.array([slope_phase(d, int(x)) for x in a])
    xi_k = xi[None, :] ** ks[:, None]  # (k, a)
    k_phase = eta[expo] * xi_k[:, :, None, None, None] * xi_k[:, None, :, None, None]
    n_phase = eta[(-(ks[:, None, None] * a[None, :, None] * m[None, None, :])) % d]
    ph = _Phases(k_phase, n_phase)
    _PHASE_CACHE[d] = ph
    return ph


def structural_coefficients(rho, p: Optional[PermutationZd] = None) -> StructuralCoefficients:
    m = as_matrix(rho)
    d = local_dim(m.shape[0])
    if not is_prime(d):
        raise ValueError(f"structural coefficients need prime d, got d={d}")
    if p is None:
        p = getattr(rho, "permutation", None) or PermutationZd.identity(d)
    check_support(m, p)
    m_id, sigma = relabel_to_identity(m, p)

    n = np.arange(d)
    ks = np.arange(1, d)
    rows = d * n[None, :, None] + n[None, None, :]
    cols = d * ((n[None, :, None] + ks[:, None, None]) % d) + (n[None, None, :] + ks[:, None, None]) % d
    r = m_id[rows, cols]  # (k, n1, n2)
    ph = _phases(d)
    # g[k, a1, a2] = sum_{n1,n2} eta^{-k(a1 n1 + a2 n2)} r[k, n1, n2]
    g = np.einsum("kan,kbl,knl->kab", ph.n_phase, ph.n_phase, r)
    c_full = np.einsum("kabst,kab->abst", ph.k_phase, g) / d**2
    max_imag = float(np.abs(c_full.imag).max())
    c_real = c_full.real
    mu = np.maximum(0.0, -c_real.min(axis=(2, 3)))
    return StructuralCoefficients(d, c_real, mu, max_imag, m.diagonal().real.copy(), sigma)


def spin_l1_condition(rho) -> tuple[bool, float]:
    """``(sum |s_{u,v}| <= 2, sum |s_{u,v}|)`` over the tensor Weyl coefficients."""
    total = spin_coefficients(as_matrix(rho)).l1()
    return total <= SPIN_L1_BOUND + 1e-12, total
