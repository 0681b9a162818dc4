"""Triangular decomposition of mode unitaries into beamsplitters and phase
shifters, recomposition, and an angle chart of the unitary group.

Beamsplitter convention: ``T_{pq}(theta, phi)`` acts on modes ``(p, q)`` as::

    [ e^{i phi} cos(theta)   -sin(theta) ]
    [ e^{i phi} sin(theta)    cos(theta) ]

Networks are applied element by element (first element first), followed by a
layer of output phase shifters.  ``decompose`` nulls the below-diagonal
entries right to left with at most ``m(m-1)/2`` beamsplitters, so
``recompose(decompose(U)) == U`` to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fock import ModeTransform

#: entries at or below this magnitude need no nulling beamsplitter
NULL_THRESHOLD = 1e-13


@dataclass(frozen=True)
class BeamSplitter:
    modes: tuple
    theta: float
    phi: float

    def to_json(self) -> dict:
        return {"type": "bs", "modes": [int(self.modes[0]), int(self.modes[1])],
                "theta": float(self.theta), "phi": float(self.phi)}


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    phi: float

    def to_json(self) -> dict:
        return {"type": "ps", "mode": int(self.mode), "phi": float(self.phi)}


@dataclass
class InterferometerNetwork:
    m: int
    elements: list = field(default_factory=list)
    output_phases: np.ndarray = None

    def __post_init__(self):
        if self.output_phases is None:
            self.output_phases = np.zeros(self.m)
        self.output_phases = np.asarray(self.output_phases, dtype=np.float64)
        if self.output_phases.shape != (self.m,):
            raise ValueError("one output phase per mode is required")
        for el in self.elements:
            if isinstance(el, BeamSplitter):
                p, q = el.modes
                if p == q or not (0 <= p < self.m and 0 <= q < self.m):
                    raise ValueError(f"invalid beamsplitter modes {el.modes}")
            elif isinstance(el, PhaseShifter):
                if not 0 <= el.mode < self.m:
                    raise ValueError(f"invalid phase shifter mode {el.mode}")
            else:
                raise TypeError(f"unknown element {el!r}")

    def beamsplitter_count(self) -> int:
        return sum(1 for el in self.elements if isinstance(el, BeamSplitter))

    def to_json(self) -> dict:
        return {"m": self.m, "elements": [el.to_json() for el in self.elements],
                "output_phases": [float(p) for p in self.output_phases]}

    @classmethod
    def from_json(cls, obj: dict) -> "InterferometerNetwork":
        elements = []
        for el in obj["elements"]:
            if el["type"] == "bs":
                elements.append(BeamSplitter((el["modes"][0], el["modes"][1]),
                                             el["theta"], el["phi"]))
            elif el["type"] == "ps":
                elements.append(PhaseShifter(el["mode"], el["phi"]))
            else:
                raise ValueError(f"unknown element type {el['type']!r}")
        return cls(int(obj["m"]), elements, np.array(obj["output_phases"]))


def beamsplitter_matrix(m: int, p: int, q: int, theta: float, phi: float) -> np.ndarray:
    mat = np.eye(m, dtype=np.complex128)
    c, s = np.cos(theta), np.sin(theta)
    eph = np.exp(1j * phi)
    mat[p, p] = eph * c
    mat[p, q] = -s
    mat[q, p] = eph * s
    mat[q, q] = c
    return mat


def element_matrix(m: int, element) -> np.ndarray:
    if isinstance(element, BeamSplitter):
        return beamsplitter_matrix(m, element.modes[0], element.modes[1],
                                   element.theta, element.phi)
    mat = np.eye(m, dtype=np.complex128)
    mat[element.mode, element.mode] = np.exp(1j * element.phi)
    return mat


def recompose(network: InterferometerNetwork) -> ModeTransform:
    """Multiply out a network into its mode transformation."""
    u = np.eye(network.m, dtype=np.complex128)
    for el in network.elements:
        u = element_matrix(network.m, el) @ u
    u = np.exp(1j * network.output_phases)[:, None] * u
    return ModeTransform(u)


def _nulling_order(m: int):
    """Mode index pairs (col, row) in nulling order, bottom row first."""
    for r in range(m - 1, 0, -1):
        for c in range(r):
            yield c, r


def decompose(U, tol: float = 1e-10) -> InterferometerNetwork:
    """Factor a unitary into at most ``m(m-1)/2`` beamsplitters plus phases.

    Works right to left: each below-diagonal entry is nulled by multiplying
    with the inverse of one beamsplitter, leaving a diagonal of phases.
    Already-zero entries are skipped, so the identity yields an empty network.
    """
    if isinstance(U, ModeTransform):
        transform = U
    else:
        transform = ModeTransform(np.asarray(U, dtype=np.complex128))
    if not transform.is_unitary(tol):
        raise ValueError(
            f"matrix is not unitary (defect {transform.unitarity_defect():.3e})")
    m = transform.m
    g = transform.matrix.copy()
    elements = []
    for c, r in _nulling_order(m):
        if abs(g[r, c]) <= NULL_THRESHOLD:
            continue
        # right-multiply by T(theta, phi)^dag on columns (c, r) so that the
        # new (r, c) entry vanishes:  g[r,c] e^{-i phi} cos - g[r,r] sin = 0
        phi = float(np.angle(g[r, c]) - np.angle(g[r, r])) if abs(g[r, r]) > 0 else 0.0
        theta = float(np.arctan2(abs(g[r, c]), abs(g[r, r])))
        t = beamsplitter_matrix(m, c, r, theta, phi)
        g = g @ t.conj().T
        elements.append(BeamSplitter((c, r), theta, phi))
    phases = np.angle(np.diagonal(g))
    # off-diagonal residue is rounding noise by construction
    return InterferometerNetwork(m, elements, phases)


def parametrize_unitary(m: int, angles) -> ModeTransform:
    """Build a unitary from ``m**2`` real angles.

    Layout: ``m(m-1)/2`` mixing angles, then ``m(m-1)/2`` beamsplitter
    phases, then ``m`` output phases, following the triangular element order
    of :func:`decompose`.  The chart covers the unitary group up to a measure
    zero set, and every value is exactly unitary.
    """
    angles = np.asarray(angles, dtype=np.float64)
    if angles.shape != (m * m,):
        raise ValueError(f"expected {m * m} angles for {m} modes, got {angles.shape}")
    k = m * (m - 1) // 2
    pairs = list(_nulling_order(m))
    elements = [BeamSplitter((c, r), angles[i], angles[k + i])
                for i, (c, r) in enumerate(pairs)]
    network = InterferometerNetwork(m, elements, angles[2 * k:])
    return recompose(network)
