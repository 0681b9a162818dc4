"""Numerically hot kernels: matrix permanents and gate-amplitude evaluation.

Two implementations are provided for every kernel: a numba ``@njit`` version
and a pure-numpy fallback.  The fallback is selected by setting the
environment variable ``LINOPTGATES_DISABLE_NUMBA=1`` before import (or when
numba is not installed).  ``USING_NUMBA`` records which path is active.

All kernels operate on ``complex128`` arrays.  They are deliberately free of
Python-object state so both paths produce results that agree to double
precision rounding.
"""

import os

import numpy as np

_DISABLE = os.environ.get("LINOPTGATES_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")

try:
    if _DISABLE:
        raise ImportError("numba disabled by LINOPTGATES_DISABLE_NUMBA")
    from numba import njit

    USING_NUMBA = True
except ImportError:
    njit = None
    USING_NUMBA = False


# ---------------------------------------------------------------------------
# Permanent (Ryser's inclusion-exclusion with Gray-code subset updates)
# ---------------------------------------------------------------------------

def _permanent_numpy(a):
    """per(a) for a square complex matrix, vectorized inclusion-exclusion."""
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    # all non-empty column subsets as a (2^n - 1, n) 0/1 mask
    k = np.arange(1, 2**n, dtype=np.uint32)
    masks = ((k[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1).astype(np.complex128)
    rowsums = masks @ a.T                       # (2^n-1, n): sum_{j in S} a[i, j]
    prods = np.prod(rowsums, axis=1)
    popcount = masks.real.sum(axis=1)
    signs = np.where((n - popcount) % 2 == 0, 1.0, -1.0)
    return complex(np.sum(signs * prods))


def _permanent_gray(a):
    """per(a) via Ryser with Gray-code updates; O(2^n * n)."""
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    row = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    old_gray = 0
    num = 1 << n
    parity = 1.0  # (-1)^|S|, updated as the Gray code adds/removes a column
    for k in range(1, num):
        gray = k ^ (k >> 1)
        diff = gray ^ old_gray
        j = 0
        while (diff >> j) & 1 == 0:
            j += 1
        if gray & diff:
            for i in range(n):
                row[i] += a[i, j]
            parity = -parity
        else:
            for i in range(n):
                row[i] -= a[i, j]
            parity = -parity
        old_gray = gray
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= row[i]
        # parity tracks (-1)^|S| relative to (-1)^0; combine with (-1)^n
        total += parity * prod
    if n % 2 == 0:
        return total
    return -total


# ---------------------------------------------------------------------------
# Conditional-phase-shift gate amplitudes from a 4x4 matrix
#
# Columns of V are the output polynomials of the four input modes; modes 3,4
# carry one helper photon each and are post-selected on one detected photon
# each.  Returns the eight amplitudes
#   (a0000, a0101, a0110, a1010, a1001, a1111, a1120, a1102)
# as Fock-state amplitudes (the two-photon leak terms carry their sqrt(2!)).
# ---------------------------------------------------------------------------

_SQRT2 = np.sqrt(2.0)


def _per3(v, r0, r1, r2, c0, c1, c2):
    return (v[r0, c0] * (v[r1, c1] * v[r2, c2] + v[r1, c2] * v[r2, c1])
            + v[r0, c1] * (v[r1, c0] * v[r2, c2] + v[r1, c2] * v[r2, c0])
            + v[r0, c2] * (v[r1, c0] * v[r2, c1] + v[r1, c1] * v[r2, c0]))


def _per4_rows(v, r0, r1, r2, r3):
    total = 0.0 + 0.0j
    cols = (0, 1, 2, 3)
    for c0 in cols:
        for c1 in cols:
            if c1 == c0:
                continue
            for c2 in cols:
                if c2 == c0 or c2 == c1:
                    continue
                c3 = 6 - c0 - c1 - c2
                total += v[r0, c0] * v[r1, c1] * v[r2, c2] * v[r3, c3]
    return total


def _cs_amplitudes_impl(v):
    a0000 = v[2, 2] * v[3, 3] + v[2, 3] * v[3, 2]
    a0101 = _per3(v, 1, 2, 3, 1, 2, 3)
    a0110 = _per3(v, 0, 2, 3, 1, 2, 3)
    a1010 = _per3(v, 0, 2, 3, 0, 2, 3)
    a1001 = _per3(v, 1, 2, 3, 0, 2, 3)
    a1111 = _per4_rows(v, 0, 1, 2, 3)
    a1120 = _per4_rows(v, 0, 0, 2, 3) * (_SQRT2 / 2.0)
    a1102 = _per4_rows(v, 1, 1, 2, 3) * (_SQRT2 / 2.0)
    out = np.empty(8, dtype=np.complex128)
    out[0] = a0000
    out[1] = a0101
    out[2] = a0110
    out[3] = a1010
    out[4] = a1001
    out[5] = a1111
    out[6] = a1120
    out[7] = a1102
    return out


# ---------------------------------------------------------------------------
# Nonlinear-sign gate amplitudes from a 3x3 matrix
#
# Mode 1 carries the signal (0, 1 or 2 photons), mode 2 one helper photon;
# post-selection detects one photon in mode 2 and none in mode 3.
# Returns (a00, a11, a22).
# ---------------------------------------------------------------------------

def _ns_amplitudes_impl(v):
    a00 = v[1, 1]
    a11 = v[0, 0] * v[1, 1] + v[0, 1] * v[1, 0]
    a22 = v[0, 0] * v[0, 0] * v[1, 1] + 2.0 * v[0, 0] * v[0, 1] * v[1, 0]
    out = np.empty(3, dtype=np.complex128)
    out[0] = a00
    out[1] = a11
    out[2] = a22
    return out


# ---------------------------------------------------------------------------
# Closed-form solution family: build the 4x4 matrix from free parameters.
#
# Parameter vector layout (all float64):
#   x = (re v14, im v14, re v23, im v23, re v34, im v34, re l1, im l1,
#        s_row3, s_row4, s_col3, s_col4, s_bal1, s_bal2)
# ``ph`` is the required conditional phase e^{i theta}; ``sign`` selects the
# square-root branch.  Returns the scaled matrix, or a matrix of NaN when the
# parameters are degenerate (denominators below ``eps``).
# ---------------------------------------------------------------------------

def _family_matrix_impl(x, ph, sign, eps):
    v14 = complex(x[0], x[1])
    v23 = complex(x[2], x[3])
    v34 = complex(x[4], x[5])
    l1 = complex(x[6], x[7])

    bad = np.full((4, 4), np.nan, dtype=np.complex128)
    g = -1.0 - (2.0 + v23) * v14 + v34 + v23 * (2.0 + v14) * v34
    if (abs(v34) < eps or abs(v34 - 1.0) < eps or abs(v34 + 1.0) < eps
            or abs(v23 * v14 - 1.0) < eps or abs(g) < eps or abs(l1) < eps):
        return bad

    h = 1.0 + (2.0 + v23) * v14 + v34 + v23 * (2.0 + v14) * v34
    s2 = (v14 * v14 * (v23 * (v34 - 1.0) ** 2 + 2.0 * (1.0 + v34)) ** 2
          + 2.0 * v14 * (2.0 * (v34 - 1.0) ** 2 * (1.0 + v34)
                         + 2.0 * v23 * v23 * (v34 - 1.0) ** 2 * v34 * (1.0 + v34)
                         + v23 * (1.0 - 18.0 * v34 ** 2 + v34 ** 4))
          + (1.0 + v34 * (-2.0 + v34 + 2.0 * v23 * (1.0 + v34))) ** 2)
    s = sign * np.sqrt(s2)

    n1 = (1.0 + v14 + v23 * v14 - 2.0 * v14 ** 2 - v23 * v14 ** 2 - 2.0 * v34
          + 2.0 * v23 * v34 - 4.0 * v14 * v34 + 4.0 * v23 * v14 * v34
          - 2.0 * v14 ** 2 * v34 + 2.0 * v23 * v14 ** 2 * v34 + v34 ** 2
          + 2.0 * v23 * v34 ** 2 - v14 * v34 ** 2 - v23 * v14 * v34 ** 2
          - v23 * v14 ** 2 * v34 ** 2)
    n2 = (-1.0 + v23 - 2.0 * v14 + v23 * v14 + v23 ** 2 * v14 + 2.0 * v34
          + 4.0 * v23 * v34 + 2.0 * v23 ** 2 * v34 - 2.0 * v14 * v34
          - 4.0 * v23 * v14 * v34 - 2.0 * v23 ** 2 * v14 * v34 - v34 ** 2
          - v23 * v34 ** 2 + 2.0 * v23 ** 2 * v34 ** 2 - v23 * v14 * v34 ** 2
          + v23 ** 2 * v14 * v34 ** 2)

    d = 2.0 * (1.0 + v34) * g
    dp1c1 = (n1 + (1.0 + v14) * s) / d
    dp2c1 = (n1 - (1.0 + v14) * s) / d
    dp1c2 = (n2 + (1.0 + v23) * s) / d
    dp2c2 = (n2 - (1.0 + v23) * s) / d
    dp1c3 = ((v34 - 1.0) * h - s) / (2.0 * g)
    dp2c3 = ((v34 - 1.0) * h + s) / (2.0 * g)

    l1tl2 = -((ph - 1.0) * (1.0 + v34) ** 2 * g) / (4.0 * (v23 * v14 - 1.0) ** 2 * (v34 - 1.0) * v34)
    l2 = l1tl2 / l1

    v = np.empty((4, 4), dtype=np.complex128)
    # column 1 = e1 + l1 * dp1, column 2 = e2 + l2 * dp2
    v[0, 0] = 1.0 + l1 * dp1c1
    v[1, 0] = l1 * dp1c2
    v[2, 0] = l1 * dp1c3
    v[3, 0] = -l1
    v[0, 1] = l2 * dp2c1
    v[1, 1] = 1.0 + l2 * dp2c2
    v[2, 1] = l2 * dp2c3
    v[3, 1] = -l2
    v[0, 2] = 1.0
    v[1, 2] = v23
    v[2, 2] = 1.0
    v[3, 2] = 1.0
    v[0, 3] = v14
    v[1, 3] = 1.0
    v[2, 3] = v34
    v[3, 3] = 1.0

    # row/column rescalings: rows (1/b1, 1/b2, r3, r4), cols (b1, b2, c3, c4)
    er3 = np.exp(x[8])
    er4 = np.exp(x[9])
    ec3 = np.exp(x[10])
    ec4 = np.exp(x[11])
    eb1 = np.exp(x[12])
    eb2 = np.exp(x[13])
    for j in range(4):
        v[0, j] /= eb1
        v[1, j] /= eb2
        v[2, j] *= er3
        v[3, j] *= er4
    for i in range(4):
        v[i, 0] *= eb1
        v[i, 1] *= eb2
        v[i, 2] *= ec3
        v[i, 3] *= ec4
    return v


# ---------------------------------------------------------------------------
# Unitary from the triangular angle chart (hot twin of reck.parametrize_unitary)
# ---------------------------------------------------------------------------

def _unitary_from_angles_impl(m, angles):
    u = np.eye(m, dtype=np.complex128)
    k = m * (m - 1) // 2
    idx = 0
    for r in range(m - 1, 0, -1):
        for c in range(r):
            theta = angles[idx]
            phi = angles[k + idx]
            idx += 1
            ct = np.cos(theta)
            st = np.sin(theta)
            eph = np.cos(phi) + 1j * np.sin(phi)
            for j in range(m):
                a = u[c, j]
                b = u[r, j]
                u[c, j] = eph * ct * a - st * b
                u[r, j] = eph * st * a + ct * b
    for j in range(m):
        phi = angles[2 * k + j]
        eph = np.cos(phi) + 1j * np.sin(phi)
        for col in range(m):
            u[j, col] *= eph
    return u


# ---------------------------------------------------------------------------
# Negative search objectives (minimized by the simplex engine)
#
# kind 0: conditional phase shift over the closed-form family.
#         x is the 14-component family vector;
#         fargs = (branch sign, degeneracy eps, plateau pull).
# kind 1: nonlinear sign over the unitary angle chart.
#         x holds m*m angles; fargs = (penalty weight, m, unused).
# Invalid points return 1e6.
# ---------------------------------------------------------------------------

_INVALID = 1e6


def _neg_objective_impl(kind, x, phase, fargs):
    if kind == 0:
        mat = family_matrix(x, phase, fargs[0], fargs[1])
        if not np.all(np.isfinite(mat)):
            return _INVALID
        big = 0.0
        for i in range(4):
            for j in range(4):
                big = max(big, abs(mat[i, j]))
        if big > 1e6:
            return _INVALID
        alphas = cs_amplitudes(mat)
        a0 = alphas[0]
        if abs(a0) < 1e-12:
            return _INVALID
        residual = max(abs(alphas[1] / a0 - 1.0), abs(alphas[2] / a0),
                       abs(alphas[3] / a0 - 1.0), abs(alphas[4] / a0),
                       abs(alphas[5] / a0 - phase), abs(alphas[6] / a0),
                       abs(alphas[7] / a0))
        if residual > 1e-8:
            return _INVALID
        lam = np.linalg.svd(mat)[1][0]
        value = (abs(a0) / max(lam, 1.0) ** 4) ** 2
        if lam < 1.0 and fargs[2] > 0.0:
            # the objective is exactly flat along the balanced rescalings
            # while lam < 1; a vanishing pull toward the lam = 1 boundary
            # keeps the simplex from degenerating on that plateau
            value *= 1.0 - fargs[2] * (1.0 - lam) ** 2
        return -value
    else:
        m = int(fargs[1])
        u = _kernels_unitary(m, x)
        alphas = ns_amplitudes(u[:3, :3].copy())
        gain = abs(alphas[0]) ** 2
        penalty = abs(alphas[1] - alphas[0]) ** 2 + abs(alphas[2] + alphas[0]) ** 2
        return -(gain - fargs[0] * penalty)


# ---------------------------------------------------------------------------
# Nelder-Mead over a coordinate subset (Gao-Han adaptive parameters)
# ---------------------------------------------------------------------------

def _nelder_mead_impl(kind, x0, active, phase, fargs, maxiter, fatol, xatol, step):
    """Minimize the selected objective over ``x0[active]``; other coordinates
    stay fixed.  Returns (best full vector, best value).
    """
    n = len(active)
    rho = 1.0
    chi = 1.0 + 2.0 / n
    psi = 0.75 - 1.0 / (2.0 * n)
    sigma = 1.0 - 1.0 / n

    full = x0.copy()
    simplex = np.empty((n + 1, n))
    fvals = np.empty(n + 1)
    for j in range(n):
        simplex[0, j] = x0[active[j]]
    fvals[0] = _neg_objective(kind, full, phase, fargs)
    for i in range(n):
        for j in range(n):
            simplex[i + 1, j] = simplex[0, j]
        h = 0.5 * step * abs(simplex[0, i])
        if h < step:
            h = step
        simplex[i + 1, i] = simplex[0, i] + h
        for j in range(n):
            full[active[j]] = simplex[i + 1, j]
        fvals[i + 1] = _neg_objective(kind, full, phase, fargs)

    order = np.argsort(fvals)
    simplex = simplex[order]
    fvals = fvals[order]

    centroid = np.empty(n)
    point = np.empty(n)
    evals = n + 1
    while evals < maxiter:
        # convergence: function spread and simplex size
        if abs(fvals[n] - fvals[0]) <= fatol:
            break
        spread = 0.0
        for i in range(1, n + 1):
            for j in range(n):
                d = abs(simplex[i, j] - simplex[0, j])
                if d > spread:
                    spread = d
        if spread <= xatol:
            break

        for j in range(n):
            s = 0.0
            for i in range(n):
                s += simplex[i, j]
            centroid[j] = s / n

        # reflection
        for j in range(n):
            point[j] = centroid[j] + rho * (centroid[j] - simplex[n, j])
            full[active[j]] = point[j]
        f_r = _neg_objective(kind, full, phase, fargs)
        evals += 1

        if f_r < fvals[0]:
            # expansion
            for j in range(n):
                full[active[j]] = centroid[j] + chi * rho * (centroid[j] - simplex[n, j])
            f_e = _neg_objective(kind, full, phase, fargs)
            evals += 1
            if f_e < f_r:
                for j in range(n):
                    simplex[n, j] = centroid[j] + chi * rho * (centroid[j] - simplex[n, j])
                fvals[n] = f_e
            else:
                for j in range(n):
                    simplex[n, j] = point[j]
                fvals[n] = f_r
        elif f_r < fvals[n - 1]:
            for j in range(n):
                simplex[n, j] = point[j]
            fvals[n] = f_r
        else:
            shrink = False
            if f_r < fvals[n]:
                # outside contraction
                for j in range(n):
                    full[active[j]] = centroid[j] + psi * rho * (centroid[j] - simplex[n, j])
                f_c = _neg_objective(kind, full, phase, fargs)
                evals += 1
                if f_c <= f_r:
                    for j in range(n):
                        simplex[n, j] = centroid[j] + psi * rho * (centroid[j] - simplex[n, j])
                    fvals[n] = f_c
                else:
                    shrink = True
            else:
                # inside contraction
                for j in range(n):
                    full[active[j]] = centroid[j] - psi * (centroid[j] - simplex[n, j])
                f_c = _neg_objective(kind, full, phase, fargs)
                evals += 1
                if f_c < fvals[n]:
                    for j in range(n):
                        simplex[n, j] = centroid[j] - psi * (centroid[j] - simplex[n, j])
                    fvals[n] = f_c
                else:
                    shrink = True
            if shrink:
                for i in range(1, n + 1):
                    for j in range(n):
                        simplex[i, j] = simplex[0, j] + sigma * (simplex[i, j] - simplex[0, j])
                        full[active[j]] = simplex[i, j]
                    fvals[i] = _neg_objective(kind, full, phase, fargs)
                    evals += 1

        order = np.argsort(fvals)
        simplex = simplex[order]
        fvals = fvals[order]

    out = x0.copy()
    for j in range(n):
        out[active[j]] = simplex[0, j]
    return out, fvals[0]


if USING_NUMBA:
    # helpers must be jitted (and rebound) before the functions that call them
    _per3 = njit(cache=True)(_per3)
    _per4_rows = njit(cache=True)(_per4_rows)
    permanent = njit(cache=True)(_permanent_gray)
    cs_amplitudes = njit(cache=True)(_cs_amplitudes_impl)
    ns_amplitudes = njit(cache=True)(_ns_amplitudes_impl)
    family_matrix = njit(cache=True)(_family_matrix_impl)
    unitary_from_angles = njit(cache=True)(_unitary_from_angles_impl)
    _kernels_unitary = unitary_from_angles
    _neg_objective = njit(cache=True)(_neg_objective_impl)
    nelder_mead = njit(cache=True)(_nelder_mead_impl)
else:
    permanent = _permanent_numpy
    cs_amplitudes = _cs_amplitudes_impl
    ns_amplitudes = _ns_amplitudes_impl
    family_matrix = _family_matrix_impl
    unitary_from_angles = _unitary_from_angles_impl
    _kernels_unitary = unitary_from_angles
    _neg_objective = _neg_objective_impl
    nelder_mead = _nelder_mead_impl


def neg_objective(kind, x, phase, fargs):
    """Scalar search objective (negated); see the kind table above."""
    return _neg_objective(int(kind), np.asarray(x, dtype=np.float64), complex(phase),
                          np.asarray(fargs, dtype=np.float64))


def warmup():
    """Trigger JIT compilation of every kernel (cheap no-op on the numpy path)."""
    permanent(np.eye(2, dtype=np.complex128))
    cs_amplitudes(np.eye(4, dtype=np.complex128))
    ns_amplitudes(np.eye(3, dtype=np.complex128))
    x = np.array([0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 1.0, 0.0,
                  0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    family_matrix(x, -1.0 + 0.0j, 1.0, 1e-12)
    unitary_from_angles(3, np.zeros(9))
    nelder_mead(0, x, np.arange(14), -1.0 + 0.0j, np.array([1.0, 1e-12, 0.1]),
                50, 1e-13, 1e-11, 0.1)
    nelder_mead(1, np.zeros(9), np.arange(9), 0.0 + 0.0j, np.array([10.0, 3.0, 0.0]),
                50, 1e-13, 1e-11, 0.1)
