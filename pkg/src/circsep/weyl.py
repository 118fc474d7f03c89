"""Discrete Weyl (generalized Pauli) matrices and their eigenprojector families.

``S_{j,k} = sum_m eta^{j m} |m><m+k|`` with ``eta = exp(2 pi i / d)``.  For
prime ``d`` the eigenprojectors of ``S_{a,1}`` (a = 0..d-1) give the
rank-one projectors used in the separable decompositions of ``analysis``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .algebra import PermutationZd, binom2, eta_pow, eta_table, is_prime, mod_inverse

__all__ = [
    "spin_matrix",
    "relabeled_spin_matrix",
    "spin_basis",
    "spin_product_check",
    "spin_coefficients",
    "reconstruct_from_coefficients",
    "SpinCoefficients",
    "ProjectorFamily",
    "projector_family",
    "projector_stack",
    "relabel_operator",
    "spin_tensor_support",
    "general_projectors",
    "slope_phase",
    "spin_from_projectors",
    "mub_overlap_check",
]


def _check_index(d: int, *idx: int) -> None:
    if d < 2:
        raise ValueError(f"invalid dimension d={d}")
    for i in idx:
        if not 0 <= i < d:
            raise ValueError(f"index {i} out of range for d={d}")


def spin_matrix(d: int, j: int, k: int) -> np.ndarray:
    _check_index(d, j, k)
    return spin_basis(d)[j, k].copy()


def relabeled_spin_matrix(d: int, j: int, k: int, sigma: PermutationZd) -> np.ndarray:
    """``S_{j,k}(sigma) = sum_m eta^{j m} |sigma(m)><sigma(m+k)|``."""
    _check_index(d, j, k)
    if sigma.d != d:
        raise ValueError("permutation length does not match d")
    out = np.zeros((d, d), dtype=complex)
    eta = eta_table(d)
    for m in range(d):
        out[sigma(m), sigma((m + k) % d)] = eta[(j * m) % d]
    return out


@lru_cache(maxsize=None)
def spin_basis(d: int) -> np.ndarray:
    """All S_{j,k} stacked into a read-only array of shape (d, d, d, d)."""
    if d < 2:
        raise ValueError(f"invalid dimension d={d}")
    eta = eta_table(d)
    basis = np.zeros((d, d, d, d), dtype=complex)
    m = np.arange(d)
    for j in range(d):
        for k in range(d):
            basis[j, k, m, (m + k) % d] = eta[(j * m) % d]
    basis.setflags(write=False)
    return basis


def spin_product_check(d: int) -> float:
    """Worst deviation over all index pairs of the product and adjoint rules.

    Checks ``S_{j,k} S_{u,v} = eta^{k u} S_{j+u,k+v}`` and
    ``S_{j,k}^dagger = eta^{j k} S_{-j,-k} = S_{j,k}^{-1}``.
    """
    basis = spin_basis(d)
    worst = 0.0
    eye = np.eye(d)
    for j in range(d):
        for k in range(d):
            s = basis[j, k]
            adj = s.conj().T
            worst = max(worst, np.abs(adj - eta_pow(d, j * k) * basis[-j % d, -k % d]).max())
            worst = max(worst, np.abs(adj @ s - eye).max())
            for u in range(d):
                for v in range(d):
                    lhs = s @ basis[u, v]
                    rhs = eta_pow(d, k * u) * basis[(j + u) % d, (k + v) % d]
                    worst = max(worst, np.abs(lhs - rhs).max())
    return float(worst)


@dataclass(frozen=True)
class SpinCoefficients:
    """``s[u1, v1, u2, v2] = Tr[(S_{u1,v1} (x) S_{u2,v2})^dagger rho]``."""

    d: int
    s: np.ndarray

    def l1(self) -> float:
        return float(np.abs(self.s).sum())

    def nonzero_labels(self, tol: float = 1e-12) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        hits = np.argwhere(np.abs(self.s) > tol)
        return [((int(a), int(b)), (int(c), int(e))) for a, b, c, e in hits]


def _local_dim(n: int) -> int:
    d = int(round(np.sqrt(n)))
    if d * d != n or d < 2:
        raise ValueError(f"matrix dimension {n} is not a square d^2 with d >= 2")
    return d


def spin_coefficients(rho) -> SpinCoefficients:
    rho = np.asarray(getattr(rho, "entries", rho), dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density must be a square matrix")
    d = _local_dim(rho.shape[0])
    w = spin_basis(d).conj()
    r4 = rho.reshape(d, d, d, d)  # [i, k, j, l] for rho_{ik, jl}
    s = np.einsum("abij,cdkl,ikjl->abcd", w, w, r4)
    return SpinCoefficients(d, s)


def reconstruct_from_coefficients(coeffs: SpinCoefficients) -> np.ndarray:
    d = coeffs.d
    b = spin_basis(d)
    full = np.einsum("abcd,abij,cdkl->ikjl", coeffs.s, b, b)
    return full.reshape(d * d, d * d) / d**2


# -- projector families -----------------------------------------------------

def _require_prime(d: int) -> None:
    if not is_prime(d):
        raise ValueError(f"unsupported dimension d={d}: projector families need prime d")


def slope_phase(d: int, a: int) -> complex:
    """Phase ``xi_a`` with ``(S_{a,1} / xi_a)^d = I``.

    For odd d, ``S_{a,1}^d = I`` already and ``xi_a = 1``.  For d = 2,
    ``S_{1,1}^2 = -I`` (it is i*sigma_y) so ``xi_1 = i``.
    """
    if d == 2 and a % 2 == 1:
        return 1j
    return 1.0 + 0.0j


@dataclass(frozen=True)
class ProjectorFamily:
    d: int
    a: int
    projectors: np.ndarray  # (d, d, d): projectors[m] = P_{a,1}(m)

    def __getitem__(self, m: int) -> np.ndarray:
        return self.projectors[m % self.d]

    def vectors(self) -> np.ndarray:
        """Unit vectors spanning each projector, as rows; the global phase is fixed arbitrarily."""
        out = []
        for p in self.projectors:
            col = int(np.argmax(np.abs(np.diag(p))))
            v = p[:, col] / np.sqrt(p[col, col].real)
            out.append(v)
        return np.array(out)


@lru_cache(maxsize=None)
def _projector_stack(d: int) -> np.ndarray:
    basis = spin_basis(d)
    eta = eta_table(d)
    out = np.zeros((d, d, d, d), dtype=complex)  # [a, m, :, :]
    for a in range(d):
        u = basis[a, 1] / slope_phase(d, a)
        powers = [np.eye(d, dtype=complex)]
        for _ in range(d - 1):
            powers.append(powers[-1] @ u)
        for r in range(d):
            out[a, r] = sum(eta[(t * r) % d] * powers[t] for t in range(d)) / d
    out.setflags(write=False)
    return out


def projector_family(d: int, a: int) -> ProjectorFamily:
    """``P_{a,1}(r) = (1/d) sum_t eta^{t r} (S_{a,1}/xi_a)^t`` for r = 0..d-1."""
    _require_prime(d)
    _check_index(d, a)
    return ProjectorFamily(d, a, _projector_stack(d)[a])


def projector_stack(d: int) -> np.ndarray:
    """All families at once, shape (d, d, d, d) indexed [a, m, row, col]."""
    _require_prime(d)
    return _projector_stack(d)


def general_projectors(d: int, j: int, k: int) -> np.ndarray:
    """``P_{j,k}(r) = (1/d) sum_m eta^{m r} (S_{j,k})^m`` without any phase adjustment.

    These are projectors whenever ``S_{j,k}^d = I`` (always for odd d).
    """
    _check_index(d, j, k)
    s = spin_basis(d)[j, k]
    eta = eta_table(d)
    out = np.zeros((d, d, d), dtype=complex)
    power = np.eye(d, dtype=complex)
    for m in range(d):
        for r in range(d):
            out[r] += eta[(m * r) % d] * power
        power = power @ s
    return out / d


def spin_from_projectors(d: int, j: int, k: int) -> np.ndarray:
    """Rebuild ``S_{j,k}`` (k != 0) from the slope ``a = j k^{-1}`` projector family.

    ``S_{j,k} = eta^{-a C(k,2)} xi_a^k sum_m eta^{-m k} P_{a,1}(m)``.
    """
    _require_prime(d)
    _check_index(d, j, k)
    if k == 0:
        raise ValueError("k = 0 has no slope representation")
    a = (j * mod_inverse(k, d)) % d
    fam = _projector_stack(d)[a]
    eta = eta_table(d)
    acc = sum(eta[(-m * k) % d] * fam[m] for m in range(d))
    return eta_pow(d, -a * binom2(k)) * slope_phase(d, a) ** k * acc


def mub_overlap_check(d: int) -> float:
    """Worst deviation of ``Tr[P_{a,1}(m) P_{b,1}(m')]`` from 1/d over slopes a != b."""
    stack = projector_stack(d)
    worst = 0.0
    for a in range(d):
        for b in range(d):
            if a == b:
                continue
            ov = np.einsum("mij,nji->mn", stack[a], stack[b])
            worst = max(worst, float(np.abs(ov - 1.0 / d).max()))
    return worst


def relabel_operator(sigma: PermutationZd) -> np.ndarray:
    """Permutation matrix with ``Pi |m> = |sigma(m)>``."""
    d = sigma.d
    pi = np.zeros((d, d))
    pi[sigma.as_array(), np.arange(d)] = 1.0
    return pi


def spin_tensor_support(d: int, sigma: Optional[PermutationZd] = None) -> set:
    """Support of ``sum_k S_{0,k}(sigma) (x) S_{0,k}`` as flat index pairs."""
    if sigma is None:
        sigma = PermutationZd.identity(d)
    total = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        total += np.kron(relabeled_spin_matrix(d, 0, k, sigma), spin_basis(d)[0, k])
    return {(int(r), int(s)) for r, s in np.argwhere(np.abs(total) > 1e-14)}
