"""Post-selected conditional gates: extraction and verification.

A non-deterministic gate is defined by a submatrix ``V`` of the full mode
transformation: the system modes come first, the measured ancilla modes
last.  Helper photons enter the ancilla modes and a fixed detection pattern
is post-selected; the unnormalized amplitudes of the induced map on the
system modes are monomial coefficients of the column polynomials of ``V``.

Three verifiers are provided:

* :func:`verify_cs` -- two-mode conditional phase shift by ``theta`` with two
  helper photons (seven amplitude constraints),
* :func:`verify_ns` -- single-mode nonlinear sign flip with one helper,
* :func:`verify_qubit_pair` -- the six-mode conditional phase gate on a pair
  of dual-rail qubits.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import fock
from .fock import as_fock, enumerate_states, expand_product, total_photons


@dataclass
class GateSpec:
    """Declarative description of a target post-selected gate.

    ``target_map`` lists ``(input pattern, output pattern, amplitude)``
    triples on the system modes; amplitudes are relative to the first entry,
    which is the reference and must be 1.
    """

    system_modes: list
    helper_inputs: tuple
    detection_pattern: tuple
    target_map: list
    theta: float = 0.0

    def __post_init__(self):
        self.helper_inputs = as_fock(self.helper_inputs)
        self.detection_pattern = as_fock(self.detection_pattern)
        if len(self.helper_inputs) != len(self.detection_pattern):
            raise ValueError("helper and detection patterns must cover the same modes")
        if self.target_map and self.target_map[0][2] != 1:
            raise ValueError("reference amplitude (first target entry) must be 1")

    def to_json(self) -> dict:
        return {
            "system_modes": list(self.system_modes),
            "helpers": list(self.helper_inputs),
            "detection": list(self.detection_pattern),
            "theta": float(self.theta),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GateSpec":
        theta = float(obj.get("theta", 0.0))
        system = list(obj["system_modes"])
        if len(system) == 1:
            target = [((0,), (0,), 1), ((1,), (1,), 1), ((2,), (2,), -1)]
        elif len(system) == 2:
            target = _cs_target_map(theta)
        else:
            target = [(pat, pat, cmath.exp(1j * theta) if pat == _PAIR_LOGICAL[(1, 1)] else 1)
                      for pat in pair_input_patterns()]
            target[0] = (target[0][0], target[0][1], 1)
        return cls(system, tuple(obj["helpers"]), tuple(obj["detection"]),
                   target_map=target, theta=theta)


def _cs_target_map(theta: float) -> list:
    return [
        ((0, 0), (0, 0), 1),
        ((0, 1), (0, 1), 1),
        ((1, 0), (1, 0), 1),
        ((1, 1), (1, 1), cmath.exp(1j * theta)),
    ]


def cs_gate_spec(theta: float) -> GateSpec:
    """Conditional phase shift by ``theta`` on 2 modes, helpers in modes 3, 4."""
    return GateSpec([0, 1], (1, 1), (1, 1), _cs_target_map(theta), theta)


def ns_gate_spec() -> GateSpec:
    """Nonlinear sign flip on one mode, one helper photon, detection (1, 0)."""
    return GateSpec([0], (1, 0), (1, 0),
                    [((0,), (0,), 1), ((1,), (1,), 1), ((2,), (2,), -1)],
                    theta=np.pi)


@dataclass
class ConditionalMap:
    """Post-selected amplitudes keyed by (input pattern, output pattern)."""

    system_modes: int
    helper_inputs: tuple
    detection_pattern: tuple
    amplitudes: dict = field(default_factory=dict)

    def __getitem__(self, key) -> complex:
        inp, out = key
        return self.amplitudes.get((as_fock(inp), as_fock(out)), 0.0 + 0.0j)


@dataclass
class VerificationReport:
    """Outcome of a gate-condition check.

    ``passed`` holds iff ``max_constraint_residual <= tolerance``.  The
    success probability is |reference amplitude|^2 and is physically
    attainable only when ``lambda_max`` is at most one (``probability_valid``).
    """

    passed: bool
    max_constraint_residual: float
    success_probability: float
    theta_measured: float
    tolerance: float
    lambda_max: float = float("nan")
    probability_valid: bool = True

    def to_json(self) -> dict:
        return {
            "passed": bool(self.passed),
            "max_constraint_residual": float(self.max_constraint_residual),
            "success_probability": float(self.success_probability),
            "theta_measured": float(self.theta_measured),
            "tolerance": float(self.tolerance),
            "lambda_max": float(self.lambda_max),
            "probability_valid": bool(self.probability_valid),
        }


def conditional_map(V, helper_inputs, detection_pattern, inputs=None) -> ConditionalMap:
    """Compute the post-selected map induced by submatrix ``V``.

    The last ``len(helper_inputs)`` modes of ``V`` are the measured ancilla
    modes.  ``inputs`` defaults to all 0/1 patterns on the system modes;
    outputs run over every same-photon-number pattern on the system modes.
    """
    V = np.asarray(V, dtype=np.complex128)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise ValueError("V must be square")
    k = V.shape[0]
    helpers = as_fock(helper_inputs)
    detect = as_fock(detection_pattern)
    if len(helpers) != len(detect):
        raise ValueError("helper and detection patterns must cover the same modes")
    n_sys = k - len(helpers)
    if n_sys < 1:
        raise ValueError("no system modes left after ancilla assignment")
    if inputs is None:
        inputs = [tuple(p) for p in product((0, 1), repeat=n_sys)]

    columns = list(V.T)
    amps = {}
    for inp in inputs:
        inp = as_fock(inp)
        if len(inp) != n_sys:
            raise ValueError(f"input pattern {inp} does not match {n_sys} system modes")
        d = inp + helpers
        poly = expand_product(columns, d)
        n_out = total_photons(d) - total_photons(detect)
        if n_out < 0:
            continue
        in_norm = np.sqrt(fock._factorial_prod(d))
        for out in enumerate_states(n_sys, n_out):
            full_out = out + detect
            beta = poly.coefficient(full_out)
            amps[(inp, out)] = beta * np.sqrt(fock._factorial_prod(full_out)) / in_norm
    return ConditionalMap(n_sys, helpers, detect, amps)


def _report(amps_and_targets, reference, tol, lambda_max=float("nan"),
            theta_measured=float("nan")) -> VerificationReport:
    """Build a report from (amplitude, target) pairs normalized by the reference."""
    if reference == 0:
        return VerificationReport(False, float("inf"), 0.0, theta_measured, tol,
                                  lambda_max, False)
    residual = max(abs(a / reference - t) for a, t in amps_and_targets)
    prob_valid = not np.isnan(lambda_max) and lambda_max <= 1.0 + tol
    return VerificationReport(bool(residual <= tol), float(residual),
                              float(abs(reference) ** 2), float(theta_measured),
                              tol, float(lambda_max), prob_valid)


def verify_cs(V, theta: float, tol: float = 1e-9) -> VerificationReport:
    """Check the seven conditional-phase-shift amplitude constraints on ``V``.

    Constraints (amplitudes divided by the reference a0000): the four leak
    amplitudes a0110, a1001, a1120, a1102 vanish; a1010 and a0101 equal
    a0000; a1111 equals e^{i theta} a0000.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    V = np.asarray(V, dtype=np.complex128)
    if V.shape != (4, 4):
        raise ValueError("verify_cs expects a 4x4 submatrix")
    cmap = conditional_map(V, (1, 1), (1, 1))
    a0000 = cmap[(0, 0), (0, 0)]
    pairs = [
        (cmap[(0, 1), (0, 1)], 1.0),
        (cmap[(0, 1), (1, 0)], 0.0),
        (cmap[(1, 0), (1, 0)], 1.0),
        (cmap[(1, 0), (0, 1)], 0.0),
        (cmap[(1, 1), (1, 1)], cmath.exp(1j * theta)),
        (cmap[(1, 1), (2, 0)], 0.0),
        (cmap[(1, 1), (0, 2)], 0.0),
    ]
    lam = float(np.linalg.svd(V, compute_uv=False)[0])
    theta_meas = cmath.phase(cmap[(1, 1), (1, 1)] / a0000) if a0000 != 0 else float("nan")
    return _report(pairs, a0000, tol, lam, theta_meas)


def verify_ns(V, tol: float = 1e-9, helper_inputs=(1, 0), detection_pattern=(1, 0)) -> VerificationReport:
    """Check the nonlinear-sign conditions a(0->0) = a(1->1) = -a(2->2) on ``V``."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    V = np.asarray(V, dtype=np.complex128)
    if V.shape[0] != V.shape[1] or V.shape[0] != len(as_fock(helper_inputs)) + 1:
        raise ValueError("V must act on one system mode plus the helper modes")
    cmap = conditional_map(V, helper_inputs, detection_pattern,
                           inputs=[(0,), (1,), (2,)])
    a00 = cmap[(0,), (0,)]
    pairs = [
        (cmap[(1,), (1,)], 1.0),
        (cmap[(2,), (2,)], -1.0),
    ]
    lam = float(np.linalg.svd(V, compute_uv=False)[0])
    theta_meas = cmath.phase(cmap[(2,), (2,)] / a00) if a00 != 0 else float("nan")
    return _report(pairs, a00, tol, lam, theta_meas)


# dual-rail pair layout: modes (right_a, right_b, left_a, left_b, helper, helper);
# logical 0 puts the photon in the right mode, logical 1 in the left mode.
_PAIR_LOGICAL = {
    (a, b): tuple(int(x) for x in (1 - a, 1 - b, a, b))
    for a, b in product((0, 1), repeat=2)
}


def pair_input_patterns() -> list:
    """The four 4-photon logical input patterns of the embedded pair gate."""
    return [_PAIR_LOGICAL[key] for key in sorted(_PAIR_LOGICAL)]


def verify_qubit_pair(V6, theta: float, tol: float = 1e-9) -> VerificationReport:
    """Check that a 6x6 submatrix realizes the conditional phase gate on a
    pair of dual-rail qubits.

    The post-selected map restricted to the logical basis must equal
    diag(1, 1, 1, e^{i theta}) up to global phase, and every amplitude out of
    the logical subspace must vanish.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    V6 = np.asarray(V6, dtype=np.complex128)
    if V6.shape != (6, 6):
        raise ValueError("verify_qubit_pair expects a 6x6 submatrix")
    logical = sorted(_PAIR_LOGICAL)
    cmap = conditional_map(V6, (1, 1), (1, 1),
                           inputs=[_PAIR_LOGICAL[key] for key in logical])
    reference = cmap[_PAIR_LOGICAL[(0, 0)], _PAIR_LOGICAL[(0, 0)]]
    pairs = []
    for key_in in logical:
        pat_in = _PAIR_LOGICAL[key_in]
        target_diag = cmath.exp(1j * theta) if key_in == (1, 1) else 1.0
        for out in enumerate_states(4, 2):
            if out == pat_in:
                pairs.append((cmap[pat_in, out], target_diag))
            else:
                pairs.append((cmap[pat_in, out], 0.0))
    lam = float(np.linalg.svd(V6, compute_uv=False)[0])
    a11 = cmap[_PAIR_LOGICAL[(1, 1)], _PAIR_LOGICAL[(1, 1)]]
    theta_meas = cmath.phase(a11 / reference) if reference != 0 else float("nan")
    return _report(pairs, reference, tol, lam, theta_meas)
