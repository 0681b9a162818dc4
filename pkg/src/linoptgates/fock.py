"""Exact Fock-state amplitudes under passive linear-optics transformations.

A transformation on ``m`` modes is represented by an ``m x m`` complex matrix
whose column ``s`` holds the image of the creation operator of input mode
``s``: ``c_s -> sum_r  T[r, s] c_r``.  Feeding ``d_s`` photons into mode ``s``
therefore produces the operator polynomial ``P = prod_s (column_s)^{d_s}``,
and every output amplitude is a monomial coefficient of ``P`` dressed with
factorial normalization.

Two independent amplitude algorithms are implemented: full polynomial
expansion (:func:`amplitude`) and the matrix permanent (
:func:`amplitude_permanent`); they agree to 1e-10 and cross-validate each
other in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from . import _kernels

#: largest photon number accepted by the permanent oracle
PERMANENT_CUTOFF = 10

FockState = tuple  # occupation numbers, one non-negative int per mode


def as_fock(occupations) -> tuple:
    """Validate and normalize a Fock state to a tuple of ints."""
    occ = tuple(int(k) for k in occupations)
    if any(k < 0 for k in occ):
        raise ValueError(f"negative occupation number in {occ}")
    return occ


def total_photons(state) -> int:
    return int(sum(state))


@dataclass(frozen=True)
class ModeTransform:
    """A linear-optics mode transformation (not necessarily unitary).

    ``matrix[r, s]`` is the coefficient of output mode ``r`` in the image of
    input mode ``s``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"transform matrix must be square, got shape {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    def unitarity_defect(self) -> float:
        """max |(T^dag T - I)_{rs}|."""
        eye = np.eye(self.m)
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - eye)))

    def is_unitary(self, tol: float = 1e-10) -> bool:
        return self.unitarity_defect() <= tol

    @classmethod
    def identity(cls, m: int) -> "ModeTransform":
        return cls(np.eye(m, dtype=np.complex128))

    @classmethod
    def random_unitary(cls, m: int, rng: np.random.Generator) -> "ModeTransform":
        """Haar-distributed random unitary (QR of a Ginibre matrix)."""
        z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r)
        return cls(q * (d / np.abs(d)))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ModeTransform":
        m = int(obj["m"])
        entries = obj["entries"]
        if len(entries) != m or any(len(row) != m for row in entries):
            raise ValueError("matrix entries do not match declared mode count")
        mat = np.array([[complex(re, im) for re, im in row] for row in entries])
        return cls(mat)


@dataclass
class MonomialPolynomial:
    """Sparse polynomial in the mode creation operators.

    Keys are per-mode exponent tuples, values the complex coefficients.
    Exact zeros are pruned; when built from ``n`` degree-1 factors every
    surviving exponent vector has total degree ``n``.
    """

    modes: int
    coeffs: dict = field(default_factory=dict)

    def coefficient(self, exponents) -> complex:
        return self.coeffs.get(tuple(exponents), 0.0 + 0.0j)

    def degree(self) -> int:
        if not self.coeffs:
            return 0
        return total_photons(next(iter(self.coeffs)))

    def prune(self) -> "MonomialPolynomial":
        self.coeffs = {e: c for e, c in self.coeffs.items() if c != 0}
        return self


def expand_product(columns, multiplicities) -> MonomialPolynomial:
    """Expand ``prod_s (sum_r columns[s][r] c_r)^{multiplicities[s]}``.

    ``columns`` is a sequence of complex vectors, all of the same length.
    """
    cols = [np.asarray(c, dtype=np.complex128) for c in columns]
    mults = [int(d) for d in multiplicities]
    if len(cols) != len(mults):
        raise ValueError("one multiplicity per column is required")
    if any(d < 0 for d in mults):
        raise ValueError("multiplicities must be non-negative")
    if not cols:
        return MonomialPolynomial(0, {(): 1.0 + 0.0j})
    m = len(cols[0])
    if any(len(c) != m for c in cols):
        raise ValueError("all columns must have the same length")

    coeffs = {(0,) * m: 1.0 + 0.0j}
    for col, d in zip(cols, mults):
        for _ in range(d):
            new: dict = {}
            for exp, c in coeffs.items():
                for r in range(m):
                    v = col[r]
                    if v == 0:
                        continue
                    e2 = exp[:r] + (exp[r] + 1,) + exp[r + 1:]
                    new[e2] = new.get(e2, 0.0 + 0.0j) + c * v
            coeffs = new
    return MonomialPolynomial(m, coeffs).prune()


def _factorial_prod(state) -> float:
    out = 1.0
    for k in state:
        out *= math.factorial(k)
    return out


def amplitude(transform: ModeTransform, input_state, output_state) -> complex:
    """Transition amplitude ``<output| T |input>`` via polynomial expansion.

    Normalized so the induced map on Fock states is unitary whenever the
    transform is.  Returns 0 when photon number differs.
    """
    inp = as_fock(input_state)
    out = as_fock(output_state)
    if len(inp) != transform.m or len(out) != transform.m:
        raise ValueError("state length does not match mode count")
    if total_photons(inp) != total_photons(out):
        return 0.0 + 0.0j
    poly = expand_product(list(transform.matrix.T), inp)
    beta = poly.coefficient(out)
    return beta * np.sqrt(_factorial_prod(out) / _factorial_prod(inp))


def amplitude_permanent(transform: ModeTransform, input_state, output_state,
                        cutoff: int = PERMANENT_CUTOFF) -> complex:
    """Transition amplitude via Ryser's permanent; independent oracle.

    ``per(T[out | in]) / sqrt(prod d_s! prod m_t!)`` with rows and columns
    repeated according to the occupations.  Photon number is capped at
    ``cutoff`` (the inclusion-exclusion sum has 2^n terms).
    """
    inp = as_fock(input_state)
    out = as_fock(output_state)
    if len(inp) != transform.m or len(out) != transform.m:
        raise ValueError("state length does not match mode count")
    n = total_photons(inp)
    if n > cutoff or total_photons(out) > cutoff:
        raise ValueError(
            f"photon number {max(n, total_photons(out))} exceeds permanent cutoff {cutoff}")
    if n != total_photons(out):
        return 0.0 + 0.0j
    rows = [r for r, k in enumerate(out) for _ in range(k)]
    cols = [s for s, k in enumerate(inp) for _ in range(k)]
    sub = np.ascontiguousarray(transform.matrix[np.ix_(rows, cols)])
    per = _kernels.permanent(sub)
    return per / np.sqrt(_factorial_prod(inp) * _factorial_prod(out))


def enumerate_states(m: int, n: int):
    """All occupation tuples of ``n`` photons over ``m`` modes."""
    for combo in combinations_with_replacement(range(m), n):
        occ = [0] * m
        for mode in combo:
            occ[mode] += 1
        yield tuple(occ)


def output_distribution(transform: ModeTransform, input_state, unitarity_tol: float = 1e-10) -> dict:
    """Probabilities of every output Fock state for the given input.

    The transform must be unitary (within ``unitarity_tol``); probabilities
    then sum to one.
    """
    if not transform.is_unitary(unitarity_tol):
        raise ValueError(
            f"transform is not unitary (defect {transform.unitarity_defect():.3e})")
    inp = as_fock(input_state)
    if len(inp) != transform.m:
        raise ValueError("state length does not match mode count")
    n = total_photons(inp)
    poly = expand_product(list(transform.matrix.T), inp)
    in_fact = _factorial_prod(inp)
    dist = {}
    for out in enumerate_states(transform.m, n):
        beta = poly.coefficient(out)
        amp = beta * np.sqrt(_factorial_prod(out) / in_fact)
        dist[out] = float(abs(amp) ** 2)
    return dist


def transpose_convention(matrix: np.ndarray) -> np.ndarray:
    """Convert between the column-action matrix used throughout this package
    and the transposed bookkeeping (entry ``[r, s]`` = coefficient of input
    mode ``r`` on output mode ``s``).  The conversion is its own inverse.
    """
    return np.asarray(matrix).T.copy()
