"""PPT tests, structural decomposition, separability certificates and threshold sweeps."""

from __future__ import annotations

import numpy as np

from .certify import (RECON_TOL, SeparabilityCertificate, Verdict, certify, certify_general_cr,
                      certify_mixture, certify_product_entry, product_entry_terms,
                      product_entry_weights, state_reports)
from .linalg import EIG_TOL, as_matrix, is_psd, jacobi_eigvalsh, partial_transpose
from .ppt import BlockReport, PptReport, SupportViolation, full_ppt_min_eig, positivity_blocks, ppt_blocks
from .structure import (SPIN_L1_BOUND, StructuralCoefficients, spin_l1_condition,
                        structural_coefficients)
from .sweep import SweepResult, sweep_threshold

__all__ = [
    "BlockReport", "PptReport", "SupportViolation", "SeparabilityCertificate", "Verdict",
    "StructuralCoefficients", "SweepResult", "EIG_TOL", "RECON_TOL", "SPIN_L1_BOUND",
    "analyze", "certify", "certify_general_cr", "certify_mixture", "certify_product_entry",
    "full_ppt_min_eig", "is_psd", "jacobi_eigvalsh", "partial_transpose", "positivity_blocks",
    "ppt_blocks", "product_entry_terms", "product_entry_weights", "spin_l1_condition", "state_ppt_oracle",
    "state_reports", "structural_coefficients", "sweep_threshold",
]


def state_ppt_oracle(rho) -> float:
    """Smallest eigenvalue of the state's partial transpose from a full LAPACK solve.

    For inputs stored in partial-transpose form that is the stored matrix itself.
    """
    m = as_matrix(rho)
    if getattr(rho, "partial_transpose_form", False):
        return float(np.linalg.eigvalsh(m)[0])
    return full_ppt_min_eig(m)


def analyze(rho, tol_eig: float = EIG_TOL, tol_recon: float = RECON_TOL) -> dict:
    """Every check on one density, as a JSON-ready dict.

    Block PPT and its LAPACK oracle, the spin l1 sum, the structural
    decomposition residual and the certificate verdict.  Raises
    ``SupportViolation`` or ``ValueError`` for invalid inputs.
    """
    if tol_eig <= 0 or tol_recon <= 0:
        raise ValueError("tolerances must be positive")
    pos, ppt = state_reports(rho, tol_eig)
    oracle = state_ppt_oracle(rho)
    l1_ok, l1 = spin_l1_condition(rho)
    sc = structural_coefficients(rho)
    residual = float(np.abs(sc.reconstruct() - as_matrix(rho)).max())
    verdict = certify(rho, tol_eig, tol_recon) if pos.ok else None
    return {
        "positivity": pos.to_json(),
        "ppt": {
            "block": ppt.to_json(),
            "oracle_min_eig": oracle,
            "oracle_verdict": "PPT" if oracle >= -tol_eig else "violated",
            "agree": (oracle >= -tol_eig) == ppt.ok,
        },
        "l1": {"sum": l1, "bound": SPIN_L1_BOUND, "separable_by_l1": l1_ok},
        "structure": {"mu_sum": sc.mu_sum, "max_imag_C": sc.max_imag,
                      "reconstruction_residual": residual},
        "verdict": None if verdict is None else verdict.to_json(),
    }
