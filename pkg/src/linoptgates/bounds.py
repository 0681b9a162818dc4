"""Product states of creation-operator linear forms, coherent-state
projections, and the Bell-overlap bound machinery.

States reachable by passive linear optics from single photons (plus vacuum
constants) have the form ``prod_k (b_k0 + sum_j b_kj c_j) |vac>``.  Tracing
out a mode keeps this form: projecting onto a coherent state ``<gamma|``
replaces each factor's constant by ``b_k0 + conj(gamma) b_km`` and drops the
mode, and the coherent resolution of identity turns the reduced density
matrix into a mixture of such projections.  The overlap of normalized
product states with the two-photon Bell state ``(c1 c2 + c3 c4)/sqrt(2)``
caps the success probability of any post-selected sign flip built on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

#: default per-mode Fock truncation for dense oracles
DEFAULT_CUTOFF = 4


@dataclass
class ProductState:
    """Product of degree-1 creation-operator polynomials acting on vacuum.

    ``factors[k] = (constant, coeff mode 1, ..., coeff mode m)``; the scalar
    ``prefactor`` collects constants picked up by coherent projections.
    """

    factors: list
    prefactor: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not self.factors:
            raise ValueError("at least one factor is required")
        facs = [np.asarray(f, dtype=np.complex128) for f in self.factors]
        m = len(facs[0]) - 1
        if any(len(f) != m + 1 for f in facs):
            raise ValueError("all factors must cover the same modes")
        self.factors = facs

    @property
    def modes(self) -> int:
        return len(self.factors[0]) - 1

    @property
    def photons(self) -> int:
        return len(self.factors)

    def to_json(self) -> dict:
        return {"factors": [[[z.real, z.imag] for z in f] for f in self.factors]}

    @classmethod
    def from_json(cls, obj: dict) -> "ProductState":
        return cls([[complex(re, im) for re, im in f] for f in obj["factors"]])


def expand_state(state: ProductState, cutoff: int = None) -> dict:
    """Fock amplitudes of the (unnormalized) product state.

    Returns occupation tuple -> amplitude including the sqrt(n!) weights, so
    the squared amplitudes sum to the squared norm.  ``cutoff`` bounds the
    photon number per mode; it defaults to the photon count, which loses
    nothing.
    """
    m = state.modes
    if cutoff is None:
        cutoff = state.photons
    coeffs = {(0,) * m: state.prefactor}
    for f in state.factors:
        new = {}
        for exp, c in coeffs.items():
            if f[0] != 0:
                new[exp] = new.get(exp, 0.0 + 0.0j) + c * f[0]
            for r in range(m):
                if f[r + 1] == 0:
                    continue
                if exp[r] + 1 > cutoff:
                    continue
                e2 = exp[:r] + (exp[r] + 1,) + exp[r + 1:]
                new[e2] = new.get(e2, 0.0 + 0.0j) + c * f[r + 1]
        coeffs = new
    out = {}
    for exp, c in coeffs.items():
        if c == 0:
            continue
        weight = 1.0
        for k in exp:
            weight *= math.factorial(k)
        out[exp] = c * np.sqrt(weight)
    return out


def state_norm(state: ProductState) -> float:
    amps = expand_state(state)
    return float(np.sqrt(sum(abs(a) ** 2 for a in amps.values())))


def coherent_project(state: ProductState, mode: int, gamma: complex) -> ProductState:
    """Apply ``<gamma|`` on one mode, returning the reduced product state.

    Each factor's constant becomes ``b0 + conj(gamma) * b_mode``; the overall
    coherent-vacuum overlap ``e^{-|gamma|^2 / 2}`` multiplies the prefactor.
    """
    m = state.modes
    if not 0 <= mode < m:
        raise ValueError(f"mode {mode} out of range for {m} modes")
    g = complex(gamma)
    new_factors = []
    for f in state.factors:
        const = f[0] + np.conj(g) * f[mode + 1]
        rest = [f[j + 1] for j in range(m) if j != mode]
        new_factors.append([const] + rest)
    prefactor = state.prefactor * np.exp(-abs(g) ** 2 / 2.0)
    return ProductState(new_factors, prefactor)


def bell_overlap(state: ProductState) -> float:
    """Normalized overlap with the Bell state ``(c1 c2 + c3 c4)/sqrt(2)``.

    The state must live on 4 modes and have nonzero norm.
    """
    if state.modes != 4:
        raise ValueError("the Bell overlap is defined on 4 modes")
    amps = expand_state(state)
    norm = np.sqrt(sum(abs(a) ** 2 for a in amps.values()))
    if norm == 0:
        raise ValueError("zero-norm state has no normalized overlap")
    inner = (amps.get((1, 1, 0, 0), 0.0) + amps.get((0, 0, 1, 1), 0.0)) / np.sqrt(2.0)
    return float(abs(inner) / norm)


def _state_from_vector(x) -> ProductState:
    """Two factors over 4 modes; the c1 (c2) coefficient of factor 1 (2) is
    pinned to 1 via scale invariance of the normalized overlap."""
    f1 = [complex(x[0], x[1]), 1.0, complex(x[2], x[3]),
          complex(x[4], x[5]), complex(x[6], x[7])]
    f2 = [complex(x[8], x[9]), complex(x[10], x[11]), 1.0,
          complex(x[12], x[13]), complex(x[14], x[15])]
    return ProductState([f1, f2])


def _overlap_from_vector(x) -> float:
    return bell_overlap(_state_from_vector(x))


def maximize_bell_overlap(restarts: int = 50, seed: int = 0,
                          max_iterations: int = 2000):
    """Search two-factor product states for maximal Bell overlap.

    Returns ``(best_state, overlap)``.  The achievable value ``1/sqrt(2)``
    (e.g. ``(c1 + c3)(c2 + c4)``) is found reliably; the reported maximum is
    an empirical estimate, not a proven supremum.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    best_x, best_val = None, -1.0
    for i in range(restarts):
        rng = np.random.default_rng([seed, i])
        x0 = rng.uniform(-1.5, 1.5, 16)
        res = minimize(lambda x: -_overlap_from_vector(x), x0,
                       method="Nelder-Mead",
                       options={"maxiter": max_iterations, "xatol": 1e-10,
                                "fatol": 1e-12})
        if -res.fun > best_val:
            best_val, best_x = -res.fun, res.x
    return _state_from_vector(best_x), float(best_val)


# ---------------------------------------------------------------------------
# Dense oracles used to validate the trace-out identity
# ---------------------------------------------------------------------------

def dense_state_vector(state: ProductState, cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Dense Fock array of shape (cutoff+1,)^m (amplitudes above cutoff drop)."""
    dims = (cutoff + 1,) * state.modes
    vec = np.zeros(dims, dtype=np.complex128)
    for exp, amp in expand_state(state, cutoff=cutoff).items():
        vec[exp] = amp
    return vec


def reduced_density_matrix(state: ProductState, mode: int,
                           cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Exact partial trace of |state><state| over one mode (dense oracle)."""
    vec = dense_state_vector(state, cutoff)
    vec = np.moveaxis(vec, mode, -1)
    rest = int(np.prod(vec.shape[:-1]))
    mat = vec.reshape(rest, cutoff + 1)
    rho = mat @ mat.conj().T
    return rho


def coherent_mixture_density_matrix(state: ProductState, mode: int,
                                    cutoff: int = DEFAULT_CUTOFF,
                                    grid_points: int = 40,
                                    gamma_max: float = 5.0) -> np.ndarray:
    """Reduced density matrix as a coherent-projection mixture.

    Midpoint quadrature of ``(1/pi) \\int d^2 gamma |<gamma|psi>><...|`` over
    a square grid; the Gaussian factor makes the truncation error tiny.
    """
    xs = np.linspace(-gamma_max, gamma_max, grid_points)
    h = xs[1] - xs[0]
    dim = (cutoff + 1) ** (state.modes - 1)
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for gr in xs:
        for gi in xs:
            proj = coherent_project(state, mode, complex(gr, gi))
            vec = dense_state_vector(proj, cutoff).reshape(dim)
            rho += np.outer(vec, vec.conj())
    return rho * (h * h / np.pi)


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(rho1 - rho2)
    return float(0.5 * np.sum(np.abs(eigs)))
