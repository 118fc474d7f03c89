"""Constructive separability certificates for circulant densities.

Every certificate writes the input as

    rho = diag(remainder) + sum_{a,m} w[a1,a2,m1,m2] P_{a1,1}(m1) (x) P_{a2,1}(m2)

with ``w >= 0`` and ``remainder >= 0``: a non-negative combination of product
projectors plus a non-negative diagonal, hence separable.  The identity mass
subtracted from ``rho_D`` is reported as ``identity_weight``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..algebra import PermutationZd, binom2, eta_table, is_prime
from .. import density as dm  # density itself imports analysis.linalg, so resolve names lazily
from .linalg import EIG_TOL, as_matrix, local_dim
from .ppt import BlockReport, positivity_blocks, ppt_blocks
from .structure import StructuralCoefficients, product_projectors, structural_coefficients

__all__ = [
    "SeparabilityCertificate",
    "Verdict",
    "certify",
    "certify_general_cr",
    "certify_product_entry",
    "certify_mixture",
    "product_entry_weights",
    "product_entry_terms",
    "state_reports",
    "REMAINDER_TOL",
    "RECON_TOL",
    "WEIGHT_CLAMP",
]

REMAINDER_TOL = 1e-10
RECON_TOL = 1e-9
WEIGHT_CLAMP = 1e-12


@dataclass(frozen=True)
class SeparabilityCertificate:
    d: int
    weights: np.ndarray  # (a1, a2, m1, m2), all >= 0
    identity_weight: float
    remainder: np.ndarray  # d^2 diagonal entries, all >= -REMAINDER_TOL
    residual: float
    method: str
    sigma: Optional[PermutationZd] = None

    def terms(self, tol: float = 0.0) -> list[dict]:
        out = []
        for a1, a2, m1, m2 in np.argwhere(self.weights > tol):
            out.append({"weight": float(self.weights[a1, a2, m1, m2]),
                        "a1": int(a1), "m1": int(m1), "a2": int(a2), "m2": int(m2)})
        return out

    def reconstruct(self) -> np.ndarray:
        return np.diag(self.remainder).astype(complex) + product_projectors(self.d, self.weights, self.sigma)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "terms": self.terms(),
            "identity_weight": self.identity_weight,
            "remainder": [float(v) for v in self.remainder],
            "residual": self.residual,
            "relabel": None if self.sigma is None else self.sigma.to_json(),
        }


@dataclass(frozen=True)
class Verdict:
    """Outcome of a certification attempt.

    ``kind`` is ``"separable"`` (with a certificate), ``"entangled"`` (a
    PSD/PPT witness class failed) or ``"inconclusive"`` (``shortfall`` is
    how much the identity shift exceeds the smallest diagonal entry).
    """

    kind: str
    ppt: Optional[BlockReport] = None
    positivity: Optional[BlockReport] = None
    certificate: Optional[SeparabilityCertificate] = None
    mu_sum: Optional[float] = None
    min_diag: Optional[float] = None
    shortfall: Optional[float] = None
    details: dict = field(default_factory=dict)

    @property
    def is_separable(self) -> bool:
        return self.kind == "separable"

    @property
    def witness(self) -> Optional[dict]:
        if self.kind != "entangled":
            return None
        if self.ppt is None or self.ppt.ok:
            return None
        return {"kind": "ppt", "class": self.ppt.witness, "min_eig": min(self.ppt.min_eigs)}

    def to_json(self) -> dict:
        return {
            "verdict": self.kind,
            "mu_sum": self.mu_sum,
            "min_diag": self.min_diag,
            "shortfall": self.shortfall,
            "ppt_min_eigs": None if self.ppt is None else list(self.ppt.min_eigs),
            "psd_min_eigs": None if self.positivity is None else list(self.positivity.min_eigs),
            "witness": self.witness,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            **({"details": self.details} if self.details else {}),
        }


def state_reports(rho, tol: float = EIG_TOL) -> tuple[BlockReport, BlockReport]:
    """``(positivity, ppt)`` block reports for the *state* described by ``rho``.

    For inputs stored in partial-transpose form the two checks swap roles:
    positivity of the stored matrix is the PPT test of the state and vice
    versa.
    """
    pos = positivity_blocks(rho, tol=tol)
    ppt = ppt_blocks(rho, tol=tol)
    if getattr(rho, "partial_transpose_form", False):
        return BlockReport("positivity", ppt.min_eigs, ppt.tol), BlockReport("ppt", pos.min_eigs, pos.tol)
    return pos, ppt


def _screen(rho, tol_eig: float) -> tuple[Optional[Verdict], BlockReport, BlockReport]:
    """Run the block PSD and PPT tests; return an Entangled verdict if PPT fails."""
    pos, ppt = state_reports(rho, tol_eig)
    if not pos.ok:
        raise ValueError(f"input is not positive semidefinite (class {pos.witness}, "
                         f"min eigenvalue {min(pos.min_eigs):.3e})")
    if not ppt.ok:
        return Verdict("entangled", ppt=ppt, positivity=pos), pos, ppt
    return None, pos, ppt


def _finish(rho, m: np.ndarray, weights: np.ndarray, shift: float, method: str,
            sigma: Optional[PermutationZd], pos: BlockReport, ppt: BlockReport,
            extra: Optional[dict] = None, tol_recon: float = RECON_TOL) -> Verdict:
    d = local_dim(m.shape[0])
    diag = m.diagonal().real
    min_diag = float(diag.min())
    remainder = diag - shift
    details = dict(extra or {})
    if remainder.min() < -REMAINDER_TOL:
        return Verdict("inconclusive", ppt=ppt, positivity=pos, mu_sum=shift, min_diag=min_diag,
                       shortfall=shift - min_diag, details=details)
    if weights.min() < -WEIGHT_CLAMP:
        raise ArithmeticError(f"negative product weight {weights.min():.3e} in {method} certificate")
    weights = np.where(weights < 0, 0.0, weights)
    remainder = np.where(remainder < 0, 0.0, remainder)
    cert = SeparabilityCertificate(d, weights, shift, remainder, 0.0, method, sigma)
    residual = float(np.abs(cert.reconstruct() - m).max())
    if residual > tol_recon:
        raise ArithmeticError(f"{method} certificate does not reconstruct the input "
                              f"(residual {residual:.3e})")
    cert = SeparabilityCertificate(d, weights, shift, remainder, residual, method, sigma)
    return Verdict("separable", ppt=ppt, positivity=pos, certificate=cert, mu_sum=shift,
                   min_diag=min_diag, shortfall=shift - min_diag, details=details)


def certify(rho, tol_eig: float = EIG_TOL, tol_recon: float = RECON_TOL) -> Verdict:
    """Per-slope shift certificate.

    For each slope pair ``a`` the shift ``mu_a = max(0, -min_m C(a, m))``
    makes ``C(a, .) + mu_a`` non-negative; since ``sum_m P_{a1}(m1) (x)
    P_{a2}(m2) = I`` the total shift is paid from the diagonal, so the test
    is ``min(rho_D) >= sum_a mu_a``.
    """
    m = as_matrix(rho)
    d = local_dim(m.shape[0])
    if not is_prime(d):
        raise ValueError(f"certificates need prime d, got d={d}")
    early, pos, ppt = _screen(rho, tol_eig)
    sc = structural_coefficients(rho)
    if early is not None:
        return _with_mu(early, sc, m)
    weights = sc.C + sc.mu[:, :, None, None]
    return _finish(rho, m, weights, sc.mu_sum, "per-slope", sc.sigma, pos, ppt,
                   {"max_imag_C": sc.max_imag}, tol_recon)


def _with_mu(v: Verdict, sc: StructuralCoefficients, m: np.ndarray) -> Verdict:
    min_diag = float(m.diagonal().real.min())
    return Verdict(v.kind, ppt=v.ppt, positivity=v.positivity, mu_sum=sc.mu_sum,
                   min_diag=min_diag, shortfall=sc.mu_sum - min_diag)


def certify_mixture(rho, t: float, **tols) -> Verdict:
    """Certify ``(1 - t) I / d^2 + t rho``."""
    return certify(dm.mix_with_identity(rho, t), **tols)


# -- entries depending only on r = n2 - n1 ------------------------------------

def _check_cr(m: np.ndarray, c_r: np.ndarray, tol: float = 1e-12) -> None:
    d = local_dim(m.shape[0])
    for r in range(d):
        for n in range(d):
            for k in range(1, d):
                row, col = dm.circulant_entry(d, n, r, k)
                if abs(m[row, col] - c_r[r]) > tol:
                    raise ValueError(f"entry rho[{n}{(n + r) % d},{(n + k) % d}{(n + r + k) % d}] = "
                                     f"{m[row, col]:.6g} does not match c_{r} = {c_r[r]:.6g}")


def certify_general_cr(rho, c_r, tol_eig: float = EIG_TOL, tol_recon: float = RECON_TOL) -> Verdict:
    """Certificate for off-diagonals ``c_r`` that depend only on ``r = n2 - n1``.

    Groups terms as ``sum_r c_r sum_a sum_m P_a(m) (x) P_{-a}(a r - m)``.  A
    negative ``c_r`` is rewritten with the complementary sum over
    ``m1 + m2 != a r`` at the cost of ``d |c_r|`` identity mass, so the
    total shift is ``sum_{c_r > 0} c_r + (d - 1) sum_{c_r < 0} |c_r|``.
    """
    m = as_matrix(rho)
    d = local_dim(m.shape[0])
    if not is_prime(d):
        raise ValueError(f"certificates need prime d, got d={d}")
    c_r = np.asarray(c_r, dtype=float)
    if c_r.shape != (d,):
        raise ValueError(f"need {d} constants c_r")
    if getattr(rho, "permutation", None) not in (None, PermutationZd.identity(d)):
        raise ValueError("certify_general_cr expects the identity pattern")
    _check_cr(m, c_r)
    early, pos, ppt = _screen(rho, tol_eig)
    pos_sum = float(c_r[c_r > 0].sum())
    neg_sum = float(-c_r[c_r < 0].sum())
    shift = pos_sum + (d - 1) * neg_sum
    if early is not None:
        min_diag = float(m.diagonal().real.min())
        return Verdict("entangled", ppt=ppt, positivity=pos, mu_sum=shift, min_diag=min_diag,
                       shortfall=shift - min_diag)
    weights = np.zeros((d, d, d, d))
    a = np.arange(d)
    mm = np.arange(d)
    for r in range(d):
        if c_r[r] == 0:
            continue
        on_line = ((mm[:, None] + mm[None, :])[None, :, :] % d == (a * r % d)[:, None, None])
        for a1 in range(d):
            a2 = (-a1) % d
            if c_r[r] > 0:
                weights[a1, a2] += c_r[r] * on_line[a1]
            else:
                weights[a1, a2] += -c_r[r] * ~on_line[a1]
    return _finish(rho, m, weights, shift, "general-c_r", None, pos, ppt,
                   {"s": float(c_r.sum())}, tol_recon)


# -- product-entry class ------------------------------------------------------

def product_entry_weights(spec: dm.ProductEntrySpec) -> np.ndarray:
    """``A~[r, b, t] = |(1/d) sum_n x(n, r) eta^{C(n,2) b + n t}|^2``."""
    d = spec.d
    eta = eta_table(d)
    n = np.arange(d)
    b = np.arange(d)
    t = np.arange(d)
    c2 = np.array([binom2(int(v)) for v in n])
    expo = (c2[None, None, :] * b[:, None, None] + n[None, None, :] * t[None, :, None]) % d  # (b,t,n)
    amp = np.einsum("btn,nr->rbt", eta[expo], spec.x) / d
    return np.abs(amp) ** 2


def product_entry_terms(spec: dm.ProductEntrySpec) -> np.ndarray:
    """Weights ``w[a1, a2, m1, m2] = A~(r, a1 + a2, m1 + m2 + r a2)`` summed over r.

    ``rho = diag(rho_D - sum|x|^2) + sum w P_{a1}(m1) (x) P_{a2}(m2)`` holds
    whether or not the diagonal term is non-negative.
    """
    d = spec.d
    at = product_entry_weights(spec)
    a = np.arange(d)
    mm = np.arange(d)
    bb = (a[:, None] + a[None, :]) % d  # (a1, a2)
    weights = np.zeros((d, d, d, d))
    for r in range(d):
        tt = (mm[:, None] + mm[None, :])[None, None] + (r * a)[None, :, None, None]  # (1, a2, m1, m2)
        weights += at[r][bb[:, :, None, None], tt % d]
    return weights


def certify_product_entry(spec: dm.ProductEntrySpec, tol_eig: float = EIG_TOL,
                          tol_recon: float = RECON_TOL) -> Verdict:
    """Certificate ``rho = rho_D - (sum |x|^2) I + sum_{r,b,t} A~(r,b,t) Q(r,b,t)``.

    ``Q(r, b, t)`` collects the products ``P_{a1}(m1) (x) P_{a2}(m2)`` with
    ``a1 + a2 = b`` and ``m1 + m2 + r a2 = t``.  Falls back to :func:`certify`
    when the diagonal cannot pay for the shift.
    """
    d = spec.d
    if not is_prime(d) or d == 2:
        raise ValueError(f"product-entry certificates need an odd prime d, got d={d}")
    rho = dm.product_entry_density(spec)
    m = rho.entries
    early, pos, ppt = _screen(rho, tol_eig)
    shift = spec.weight()
    min_diag = float(spec.diagonal.min())
    excess = shift - min_diag
    mixing_t = 1.0 if excess <= 0 else min(1.0, 1.0 / (1.0 + d * d * excess))
    extra = {"mixing_bound": mixing_t, "x_weight": shift}
    if early is not None:
        return Verdict("entangled", ppt=ppt, positivity=pos, mu_sum=shift, min_diag=min_diag,
                       shortfall=excess, details=extra)
    weights = product_entry_terms(spec)
    verdict = _finish(rho, m, weights, shift, "product-entry", None, pos, ppt, extra, tol_recon)
    if verdict.kind == "separable":
        return verdict
    generic = certify(rho, tol_eig, tol_recon)
    details = dict(extra, product_entry_shortfall=excess)
    return Verdict(generic.kind, ppt=generic.ppt, positivity=generic.positivity,
                   certificate=generic.certificate, mu_sum=generic.mu_sum, min_diag=generic.min_diag,
                   shortfall=generic.shortfall, details=details)
