"""Small dense Hermitian linear algebra: cyclic Jacobi eigenvalues, PSD test, partial transpose."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["jacobi_eigvalsh", "is_psd", "partial_transpose", "local_dim", "as_matrix",
           "HERMITIAN_TOL", "EIG_TOL"]

HERMITIAN_TOL = 1e-10
EIG_TOL = 1e-9


def as_matrix(rho) -> np.ndarray:
    """Accept a DensityMatrix-like object (``.entries``) or anything array-like."""
    return np.asarray(getattr(rho, "entries", rho), dtype=complex)


def local_dim(n: int) -> int:
    d = int(round(np.sqrt(n)))
    if d * d != n or d < 2:
        raise ValueError(f"matrix dimension {n} is not d^2 for an integer d >= 2")
    return d


def jacobi_eigvalsh(h, tol: float = 1e-15, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a complex Hermitian matrix by cyclic Jacobi rotations, ascending.

    Each pivot ``(p, q)`` is zeroed by ``J^H A J`` where ``J`` is the plane
    rotation ``[[c, s*phi], [-s*conj(phi), c]]`` and ``phi`` is the phase of
    ``A[p, q]``.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 1:
        return a.real.diagonal().copy()
    scale = max(np.abs(a).max(), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(np.triu(a, 1)) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                mag = abs(g)
                if mag <= 1e-300:
                    continue
                phi = g / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phi) * col_q
                a[:, q] = s * phi * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phi * row_q
                a[q, :] = s * np.conj(phi) * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    return np.sort(a.real.diagonal())


def is_psd(h, tol: float = EIG_TOL) -> tuple[bool, float]:
    """``(min_eig >= -tol, min_eig)`` for a Hermitian matrix."""
    h = as_matrix(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("matrix must be square")
    herm_err = np.abs(h - h.conj().T).max() if h.size else 0.0
    if herm_err > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (max |H - H^dagger| = {herm_err:.3g})")
    lo = float(jacobi_eigvalsh(h)[0])
    return lo >= -tol, lo


def partial_transpose(rho) -> np.ndarray:
    """Transpose on the second factor: entry ((j1,j2),(k1,k2)) moves to ((j1,k2),(k1,j2))."""
    m = as_matrix(rho)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    d = local_dim(m.shape[0])
    return m.reshape(d, d, d, d).transpose(0, 3, 2, 1).reshape(d * d, d * d)
