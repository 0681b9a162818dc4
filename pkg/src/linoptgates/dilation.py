"""Unitary dilation of contractions and the rescaled qubit-pair embedding.

Any ``k x k`` matrix ``V`` with maximum singular value at most one extends to
a unitary on ``k + e`` modes whose upper-left block is ``V``: stack
``(I - V^dag V)^{1/2}`` under ``V`` to get a matrix ``X`` with orthonormal
columns and complete with an orthonormal basis of the complement.  ``e`` is
the number of singular values strictly below one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fock import ModeTransform
from .gates import verify_cs


class MaxSingularValueExceeded(ValueError):
    """The matrix is not a contraction, so no unitary dilation exists."""


#: singular values within this distance of one add no extra mode
UNIT_SV_THRESHOLD = 1e-10


@dataclass
class DilationResult:
    """A unitary completion of a contraction.

    ``unitary.matrix[:k, :k]`` equals the (possibly rescaled) input; ``lam``
    is the maximum singular value of the input.
    """

    unitary: ModeTransform
    extra_modes: int
    lam: float


def max_singular_value(V) -> float:
    """Operator 2-norm: the largest singular value."""
    V = np.asarray(V, dtype=np.complex128)
    if V.size == 0:
        return 0.0
    return float(np.linalg.svd(V, compute_uv=False)[0])


def dilate(V, tol: float = 1e-12, unit_sv_tol: float = UNIT_SV_THRESHOLD) -> DilationResult:
    """Extend a contraction ``V`` to a unitary with ``V`` as its corner block.

    Raises :class:`MaxSingularValueExceeded` when the largest singular value
    exceeds ``1 + tol``.  Singular values within ``unit_sv_tol`` of one are
    treated as exactly one and consume no extra mode, so a unitary input is
    returned unchanged.
    """
    V = np.asarray(V, dtype=np.complex128)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise ValueError("dilate expects a square matrix")
    k = V.shape[0]
    lam = max_singular_value(V)
    if lam > 1.0 + tol:
        raise MaxSingularValueExceeded(
            f"maximum singular value {lam:.12g} exceeds 1; rescale the matrix first")

    gap = np.eye(k) - V.conj().T @ V
    # Hermitian square root via eigendecomposition; clamp fp-noise negatives.
    w, q = np.linalg.eigh((gap + gap.conj().T) / 2.0)
    w = np.where(w > 0.0, w, 0.0)
    # eigenvalue w = 1 - sigma^2; sigma >= 1 - unit_sv_tol  <=>  w <= ~2*unit_sv_tol
    w_floor = 1.0 - (1.0 - unit_sv_tol) ** 2
    keep = w > w_floor
    extra = int(np.count_nonzero(keep))
    if extra == 0:
        return DilationResult(ModeTransform(V.copy()), 0, lam)

    k_rows = (np.sqrt(w[keep])[:, None] * q[:, keep].conj().T)
    x = np.vstack([V, k_rows])                      # (k+extra, k), X^dag X = I
    proj = np.eye(k + extra) - x @ x.conj().T       # projector onto complement
    q_full, _, _ = scipy.linalg.qr(proj, pivoting=True)
    y = q_full[:, :extra]
    # orthogonality of y against x holds to rounding; tighten it one step
    y = y - x @ (x.conj().T @ y)
    y, _ = np.linalg.qr(y)
    u = np.hstack([x, y])
    return DilationResult(ModeTransform(u), extra, lam)


def embed_rescaled(V, tol: float = 1e-9):
    """Embed a conditional-phase-shift solution into the six-mode pair gate.

    Returns ``(V_e, success_probability)`` where ``V_e = diag(I, V) / lam``
    with ``lam`` the maximum singular value of the embedded matrix
    ``diag(I, V)`` (that is ``max(lambda(V), 1)``, so ``V_e`` is always a
    contraction, also when ``lambda(V) < 1``).  The probability is
    ``|a0000(V)|^2 / lam^8``, the post-selection probability of the embedded
    gate.  ``V`` must satisfy the phase-shift conditions within ``tol``.
    """
    V = np.asarray(V, dtype=np.complex128)
    if V.shape != (4, 4):
        raise ValueError("embed_rescaled expects a 4x4 matrix")
    report = verify_cs(V, theta=0.0, tol=tol)
    if np.isfinite(report.theta_measured):
        # the phase itself is free: re-check at the measured phase so any
        # valid CS_theta solution is accepted
        report = verify_cs(V, theta=report.theta_measured, tol=tol)
    if not report.passed:
        raise ValueError(
            f"matrix does not satisfy the gate conditions "
            f"(residual {report.max_constraint_residual:.3e} > {tol:.1e})")
    lam = max(max_singular_value(V), 1.0)
    v_e = np.zeros((6, 6), dtype=np.complex128)
    v_e[0, 0] = v_e[1, 1] = 1.0
    v_e[2:, 2:] = V
    v_e /= lam
    probability = report.success_probability / lam ** 8
    return v_e, probability
