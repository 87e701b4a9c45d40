"""Time-stepping kernels.

Two interchangeable backends: numba-compiled Thomas sweeps (default) and a
numpy/scipy path built on a sparse LU factorization.  Set
``PHOTOCOHERENCE_BACKEND=numpy`` to force the fallback; it is also used when
numba cannot be imported.
"""

from __future__ import annotations

import os

import numpy as np

_requested = os.environ.get("PHOTOCOHERENCE_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"PHOTOCOHERENCE_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    if _requested != "numba":
        raise ImportError
    from numba import njit
except ImportError:
    njit = None

BACKEND = "numba" if njit is not None else "numpy"

# |u|**2 above this marks the run as unstable
BLOWUP = 1e12


def _thomas_factor_py(lower, diag, upper):
    n = diag.size
    mult = np.zeros(n, dtype=np.complex128)
    inv = np.empty(n, dtype=np.complex128)
    d = diag[0]
    inv[0] = 1.0 / d
    for i in range(1, n):
        mult[i] = lower[i] * inv[i - 1]
        d = diag[i] - mult[i] * upper[i - 1]
        inv[i] = 1.0 / d
    return mult, inv


def _cayley_apply_py(v, mult, inv, upper):
    # v -> 2 M^-1 B v - v with B = [1, 10, 1]/12
    n = v.size
    y = np.empty(n, dtype=np.complex128)
    y[0] = (10.0 * v[0] + v[1]) / 12.0
    for i in range(1, n - 1):
        y[i] = (v[i - 1] + 10.0 * v[i] + v[i + 1]) / 12.0 - mult[i] * y[i - 1]
    y[n - 1] = (v[n - 2] + 10.0 * v[n - 1]) / 12.0 - mult[n - 1] * y[n - 2]
    out = np.empty(n, dtype=np.complex128)
    x = y[n - 1] * inv[n - 1]
    out[n - 1] = 2.0 * x - v[n - 1]
    for i in range(n - 2, -1, -1):
        x = (y[i] - upper[i] * x) * inv[i]
        out[i] = 2.0 * x - v[i]
    return out


def _run_py(v, mult, inv, upper, w, coeffs, stride, snaps, pop, hom_pop, dr):
    """Advance ``v`` in place through ``coeffs.size`` steps.

    Each step is ``v <- C v + coeffs[n] * w`` where ``C`` is the factored
    Cayley map.  ``pop[n]`` gets the trapezoidal norm after step ``n`` (and
    ``pop[0]`` the initial one); ``hom_pop[n]`` the norm right after the
    homogeneous part of step ``n``.  Returns the failing step index or -1.
    """
    n = v.size
    nsteps = coeffs.size
    y = np.empty(n, dtype=np.complex128)
    s = 0.0
    for i in range(n):
        s += v[i].real ** 2 + v[i].imag ** 2
    pop[0] = (s - 0.5 * (abs(v[0]) ** 2 + abs(v[n - 1]) ** 2)) * dr
    snaps[0, :] = v
    for step in range(nsteps):
        c = coeffs[step]
        y[0] = (10.0 * v[0] + v[1]) / 12.0
        for i in range(1, n - 1):
            y[i] = (v[i - 1] + 10.0 * v[i] + v[i + 1]) / 12.0 - mult[i] * y[i - 1]
        y[n - 1] = (v[n - 2] + 10.0 * v[n - 1]) / 12.0 - mult[n - 1] * y[n - 2]
        x = y[n - 1] * inv[n - 1]
        h = 2.0 * x - v[n - 1]
        nv = h + c * w[n - 1]
        hs = 0.5 * (h.real ** 2 + h.imag ** 2)
        s = 0.5 * (nv.real ** 2 + nv.imag ** 2)
        peak = nv.real ** 2 + nv.imag ** 2
        v[n - 1] = nv
        for i in range(n - 2, -1, -1):
            x = (y[i] - upper[i] * x) * inv[i]
            h = 2.0 * x - v[i]
            nv = h + c * w[i]
            a2 = nv.real ** 2 + nv.imag ** 2
            hs += h.real ** 2 + h.imag ** 2
            s += a2
            if a2 > peak:
                peak = a2
            v[i] = nv
        hs -= 0.5 * (h.real ** 2 + h.imag ** 2)
        s -= 0.5 * (nv.real ** 2 + nv.imag ** 2)
        hom_pop[step] = hs * dr
        pop[step + 1] = s * dr
        if not (peak < BLOWUP):
            return step
        if (step + 1) % stride == 0:
            snaps[(step + 1) // stride, :] = v
    return -1


if njit is not None:
    _jit = njit(cache=True, nogil=True, fastmath=False)
    thomas_factor = _jit(_thomas_factor_py)
    cayley_apply = _jit(_cayley_apply_py)
    run_steps = _jit(_run_py)
else:
    import scipy.sparse
    import scipy.sparse.linalg

    def thomas_factor(lower, diag, upper):
        # the numpy path factors with SuperLU instead; keep the bands
        return (lower, diag, upper), None

    def _lu(bands):
        lower, diag, upper = bands
        m = scipy.sparse.diags([lower[1:], diag, upper[:-1]], [-1, 0, 1], format="csc")
        return scipy.sparse.linalg.splu(m)

    def _b_times(v):
        r = 10.0 * v
        r[1:] += v[:-1]
        r[:-1] += v[1:]
        return r / 12.0

    def cayley_apply(v, mult, inv, upper):
        lu = _lu(mult)
        return 2.0 * lu.solve(_b_times(v)) - v

    def run_steps(v, mult, inv, upper, w, coeffs, stride, snaps, pop, hom_pop, dr):
        lu = _lu(mult)
        pop[0] = _trapz_norm(v, dr)
        snaps[0, :] = v
        for step in range(coeffs.size):
            h = 2.0 * lu.solve(_b_times(v)) - v
            hom_pop[step] = _trapz_norm(h, dr)
            v[:] = h + coeffs[step] * w
            pop[step + 1] = _trapz_norm(v, dr)
            peak = np.max(v.real ** 2 + v.imag ** 2)
            if not (peak < BLOWUP):
                return step
            if (step + 1) % stride == 0:
                snaps[(step + 1) // stride, :] = v
        return -1


def _trapz_norm(v, dr):
    a2 = v.real ** 2 + v.imag ** 2
    return float((a2.sum() - 0.5 * (a2[0] + a2[-1])) * dr)
