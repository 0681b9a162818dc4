"""Closed-form solution family for the conditional phase shift.

With the standardization ``v13 = v24 = v33 = v44 = v43 = 1``, every solution
of the seven amplitude constraints is parametrized by three free entries
``v14, v23, v34``, one auxiliary ``l1``, and the required phase ``ph``.  The
remaining entries follow from rational closed forms sharing one square root;
the two sign branches of that root are both valid solutions.  Six further
log-scale parameters apply the row/column rescalings that preserve the
constraints (rows 3 and 4, columns 3 and 4, and the two balanced
column/row pairs), which is how the success probability is tuned without
leaving the solution set.

Correctness is enforced constructively: :func:`build_V` re-verifies every
matrix it returns through the independent polynomial-expansion engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .gates import verify_cs

#: denominators within this distance of zero raise DegenerateParameters
DEGENERACY_EPS = 1e-12

#: residual above which build_V refuses to return a matrix
BUILD_RESIDUAL_TOL = 1e-8


class DegenerateParameters(ValueError):
    """A closed-form denominator is (numerically) zero for these parameters."""


class ConstraintResidualTooLarge(ArithmeticError):
    """The constructed matrix failed its own verification; the parameters are
    too ill-conditioned for double precision (or a branch is inconsistent)."""


BRANCHES = ("plus", "minus")


@dataclass
class FamilyParams:
    """Free parameters of the closed-form solution family."""

    v14: complex
    v23: complex
    v34: complex
    l1: complex
    phase: complex = -1.0 + 0.0j
    branch: str = "plus"
    log_scales: np.ndarray = field(default_factory=lambda: np.zeros(6))

    def __post_init__(self):
        self.v14 = complex(self.v14)
        self.v23 = complex(self.v23)
        self.v34 = complex(self.v34)
        self.l1 = complex(self.l1)
        self.phase = complex(self.phase)
        if abs(abs(self.phase) - 1.0) > 1e-12:
            raise ValueError(f"phase must have unit modulus, got |{self.phase}|")
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}")
        self.log_scales = np.asarray(self.log_scales, dtype=np.float64)
        if self.log_scales.shape != (6,):
            raise ValueError("log_scales must hold 6 values")
        if not np.all(np.isfinite(self.log_scales)):
            raise ValueError("log_scales must be finite")

    @property
    def theta(self) -> float:
        return float(np.angle(self.phase))

    def to_vector(self) -> np.ndarray:
        """Flat float64 layout used by the kernels and the optimizer."""
        return np.array([
            self.v14.real, self.v14.imag, self.v23.real, self.v23.imag,
            self.v34.real, self.v34.imag, self.l1.real, self.l1.imag,
            *self.log_scales,
        ])

    @classmethod
    def from_vector(cls, x, phase, branch) -> "FamilyParams":
        return cls(complex(x[0], x[1]), complex(x[2], x[3]), complex(x[4], x[5]),
                   complex(x[6], x[7]), phase, branch, np.asarray(x[8:14], dtype=float))

    @classmethod
    def random(cls, rng: np.random.Generator, theta: float, branch: str = "plus",
               real_only: bool = False, max_tries: int = 200) -> "FamilyParams":
        """Draw well-conditioned random parameters.

        Real and imaginary parts are uniform in [-2, 2], log-scales in
        [-1, 1].  Draws whose closed-form denominators are smaller than 1e-3,
        whose ``|l1|`` is below 0.05, or whose matrix entries exceed 1e3 are
        rejected; such points are valid but numerically useless.
        """
        ph = complex(np.cos(theta), np.sin(theta))
        for _ in range(max_tries):
            if real_only:
                vals = rng.uniform(-2.0, 2.0, 4).astype(complex)
            else:
                re = rng.uniform(-2.0, 2.0, 4)
                im = rng.uniform(-2.0, 2.0, 4)
                vals = re + 1j * im
            scales = rng.uniform(-1.0, 1.0, 6)
            v14, v23, v34, l1 = vals
            g = -1 - (2 + v23) * v14 + v34 + v23 * (2 + v14) * v34
            if (abs(l1) < 0.05 or abs(v34) < 1e-3 or abs(v34 - 1) < 1e-3
                    or abs(v34 + 1) < 1e-3 or abs(v23 * v14 - 1) < 1e-3
                    or abs(g) < 1e-3):
                continue
            params = cls(v14, v23, v34, l1, ph, branch, scales)
            mat = _family_matrix(params)
            if mat is None or np.max(np.abs(mat)) > 1e3:
                continue
            return params
        raise RuntimeError("could not draw well-conditioned family parameters")

    def to_json(self) -> dict:
        c = lambda z: [z.real, z.imag]  # noqa: E731
        return {"v14": c(self.v14), "v23": c(self.v23), "v34": c(self.v34),
                "l1": c(self.l1), "phase": c(self.phase), "branch": self.branch,
                "log_scales": [float(s) for s in self.log_scales]}

    @classmethod
    def from_json(cls, obj: dict) -> "FamilyParams":
        c = lambda p: complex(p[0], p[1])  # noqa: E731
        return cls(c(obj["v14"]), c(obj["v23"]), c(obj["v34"]), c(obj["l1"]),
                   c(obj["phase"]), obj["branch"], np.array(obj["log_scales"]))


def l1_times_l2(params: FamilyParams) -> complex:
    """The product ``l1 * l2`` fixed by the phase constraint a1111 = ph * a0000."""
    v14, v23, v34, ph = params.v14, params.v23, params.v34, params.phase
    g = -1 - (2 + v23) * v14 + v34 + v23 * (2 + v14) * v34
    for den, name in ((v34, "v34"), (v34 - 1, "v34 - 1"),
                      (v23 * v14 - 1, "v23*v14 - 1"), (g, "column denominator")):
        if abs(den) < DEGENERACY_EPS:
            raise DegenerateParameters(f"{name} is numerically zero")
    return -((ph - 1) * (1 + v34) ** 2 * g) / (4 * (v23 * v14 - 1) ** 2 * (v34 - 1) * v34)


def _family_matrix(params: FamilyParams):
    """Raw kernel call; returns None for degenerate parameters."""
    sign = 1.0 if params.branch == "plus" else -1.0
    mat = _kernels.family_matrix(params.to_vector(), params.phase, sign, DEGENERACY_EPS)
    if not np.all(np.isfinite(mat)):
        return None
    return mat


def build_V(params: FamilyParams, check: bool = True) -> np.ndarray:
    """Construct the 4x4 matrix for the given family parameters.

    When ``check`` is true (the default) the matrix is re-verified through
    the polynomial-expansion engine at the parameter phase; a residual above
    ``1e-8`` raises :class:`ConstraintResidualTooLarge`.
    """
    l1_times_l2(params)  # raises DegenerateParameters on bad denominators
    if abs(params.l1) < DEGENERACY_EPS:
        raise DegenerateParameters("l1 is numerically zero")
    if abs(1 + params.v34) < DEGENERACY_EPS:
        raise DegenerateParameters("v34 + 1 is numerically zero")
    mat = _family_matrix(params)
    if mat is None:
        raise DegenerateParameters("closed forms overflowed for these parameters")
    if check:
        report = verify_cs(mat, params.theta, tol=BUILD_RESIDUAL_TOL)
        if not report.passed:
            raise ConstraintResidualTooLarge(
                f"constructed matrix has residual {report.max_constraint_residual:.3e}")
    return mat


def apply_scalings(V, log_scales) -> np.ndarray:
    """Apply the six constraint-preserving rescalings to a 4x4 matrix.

    ``log_scales = (row3, row4, col3, col4, balanced1, balanced2)``; the
    balanced entries scale column 1 (2) by ``e^s`` and row 1 (2) by
    ``e^{-s}``, which leaves every gate amplitude unchanged.
    """
    V = np.asarray(V, dtype=np.complex128)
    s = np.asarray(log_scales, dtype=np.float64)
    if s.shape != (6,):
        raise ValueError("log_scales must hold 6 values")
    rows = np.exp(np.array([-s[4], -s[5], s[0], s[1]]))
    cols = np.exp(np.array([s[4], s[5], s[2], s[3]]))
    return V * rows[:, None] * cols[None, :]


# exact parameters of the theta = 180 degrees optimum (objective 2/27);
# the log-scales rescale the standardized matrix back to maximum singular
# value one, where the embedded success probability peaks
def optimum_params_180() -> FamilyParams:
    s6 = np.sqrt(6.0)
    w = np.sqrt(3.0 + s6)          # |column-3 scale| of the standardization
    u = np.sqrt(2.0) + np.sqrt(3.0)  # row-4 / row-3 scale ratio
    scales = np.array([
        0.0,
        -np.log(u),
        np.log(w / (3.0 * np.sqrt(2.0))),
        np.log(w * u / (3.0 * np.sqrt(2.0))),
        np.log(w / 2.0),
        np.log(w * u / 2.0),
    ])
    return FamilyParams(v14=s6 - 2.0, v23=-(2.0 + s6), v34=2.0 * s6 - 5.0,
                        l1=-2.0 / 3.0, phase=-1.0 + 0.0j, branch="plus",
                        log_scales=scales)
