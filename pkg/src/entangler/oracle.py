"""Brute-force reference propagation on the full 8-dim space.

Nothing here is shared with :mod:`entangler.dynamics`: the matrix
exponential is a hand-written Taylor scaling-and-squaring and the RK4
integrator has its own kernel, so agreement between the two modules is
evidence rather than tautology. Time here is physical ``t``; pass
``t = tau / Gamma``.
"""
import math

import numpy as np

from ._accel import njit, select
from .errors import ConvergenceFailure, StepFailure

TAYLOR_TOL = 1e-16
TAYLOR_MAX_TERMS = 60


def expm_taylor(a: np.ndarray) -> np.ndarray:
    """``exp(a)`` by scaling, truncated Taylor series, and repeated squaring."""
    a = np.asarray(a, dtype=complex)
    norm = np.max(np.sum(np.abs(a), axis=0)) if a.size else 0.0
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    b = a / 2.0**squarings
    result = np.eye(a.shape[0], dtype=complex)
    term = result.copy()
    for k in range(1, TAYLOR_MAX_TERMS + 1):
        term = term @ b / k
        result = result + term
        if np.max(np.abs(term)) <= TAYLOR_TOL * max(1.0, np.max(np.abs(result))):
            break
    else:
        raise ConvergenceFailure("Taylor series did not converge")
    for _ in range(squarings):
        result = result @ result
    if not np.all(np.isfinite(result)):
        raise ConvergenceFailure("non-finite entries after squaring")
    return result


def expm_propagate(h: np.ndarray, psi0, t):
    """``exp(-i H t) psi0`` for scalar or array ``t``. ``H`` may be non-Hermitian."""
    psi0 = np.asarray(psi0, dtype=complex)
    t_arr = np.asarray(t, dtype=float)
    out = np.array([expm_taylor(-1j * np.asarray(h) * tt) @ psi0
                    for tt in np.atleast_1d(t_arr)])
    return out.reshape(t_arr.shape + psi0.shape)


@njit
def _rk4_run_numba(h_mat, psi, h, n):
    a = -1j * h_mat
    y = psi.copy()
    for _ in range(n):
        k1 = np.dot(a, y)
        k2 = np.dot(a, y + (0.5 * h) * k1)
        k3 = np.dot(a, y + (0.5 * h) * k2)
        k4 = np.dot(a, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def _rk4_run_numpy(h_mat, psi, h, n):
    # the generator is constant, so one RK4 step is a fixed matrix: run the
    # stages on the identity once, then take n steps by repeated squaring
    a = -1j * h_mat
    y = np.eye(a.shape[0], dtype=complex)
    k1 = a @ y
    k2 = a @ (y + 0.5 * h * k1)
    k3 = a @ (y + 0.5 * h * k2)
    k4 = a @ (y + h * k3)
    step = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return np.linalg.matrix_power(step, n) @ psi


_rk4_run = select(_rk4_run_numba, _rk4_run_numpy)


def richardson_bound(h_mat, t, h):
    """Ten times the leading RK4 global error ``t ||H||^5 h^4 / 120``."""
    scale = max(1.0, float(np.linalg.norm(h_mat, 2)))
    return 10.0 * h**4 * max(1.0, abs(t)) * scale**5 / 120.0


def rk4_propagate(h_mat, psi0, t: float, h: float) -> np.ndarray:
    """Classic fixed-step RK4 for ``dpsi/dt = -i H psi``.

    ``t`` must be an integer multiple of ``h``. The run is repeated at
    ``h/2`` and the two results must agree within
    ``10 h^4 max(1, t) max(1, ||H||)^5 / 120``; the finer result is returned.

    Raises
    ------
    StepFailure
        If the h vs h/2 comparison exceeds the bound.
    """
    if h <= 0:
        raise ValueError("h must be > 0")
    n = round(t / h)
    if abs(t / h - n) > 1e-6:
        raise ValueError(f"t/h = {t / h} is not an integer")
    h_mat = np.ascontiguousarray(h_mat, dtype=complex)
    psi0 = np.ascontiguousarray(psi0, dtype=complex)
    if n == 0:
        return psi0.copy()
    coarse = _rk4_run(h_mat, psi0, h, n)
    fine = _rk4_run(h_mat, psi0, h / 2, 2 * n)
    diff = float(np.max(np.abs(fine - coarse)))
    bound = richardson_bound(h_mat, t, h)
    if diff > bound:
        raise StepFailure(f"h vs h/2 difference {diff:.2e} exceeds bound {bound:.2e}")
    return fine


def rk4_trajectory(h_mat, psi0, times, h_max: float = 1e-3) -> np.ndarray:
    """RK4 states on an increasing time grid starting from ``t = 0``.

    Each grid interval is split into equal steps no longer than ``h_max``;
    the Richardson check is applied to the accumulated trajectory.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0) or (times.size and times[0] < 0):
        raise ValueError("times must be non-negative and increasing")
    h_mat = np.ascontiguousarray(h_mat, dtype=complex)
    psi0 = np.ascontiguousarray(psi0, dtype=complex)
    out = np.empty((times.size,) + psi0.shape, dtype=complex)
    coarse = psi0.copy()
    fine = psi0.copy()
    t_prev = 0.0
    worst = 0.0
    for k, t in enumerate(times):
        dt = t - t_prev
        if dt > 0:
            n = max(1, int(math.ceil(dt / h_max - 1e-9)))
            coarse = _rk4_run(h_mat, coarse, dt / n, n)
            fine = _rk4_run(h_mat, fine, dt / (2 * n), 2 * n)
            worst = max(worst, float(np.max(np.abs(fine - coarse))))
        out[k] = fine
        t_prev = t
    bound = richardson_bound(h_mat, t_prev, h_max)
    if worst > bound:
        raise StepFailure(f"h vs h/2 difference {worst:.2e} exceeds bound {bound:.2e}")
    return out
