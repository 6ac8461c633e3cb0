"""Fixed-step RK4 kernels for ``dpsi/dtau = A psi`` with constant ``A``.

Used by the dynamics module for the dissipative secular evolution. The
reference oracle carries its own, separately written integrator.
"""
import math

import numpy as np

from ._accel import njit, select


def _substeps(dt, h_max):
    n = int(math.ceil(dt / h_max - 1e-9))
    return max(n, 1)


@njit
def _rk4_grid_numba(a, psi0, times, h_max):
    dim = psi0.shape[0]
    out = np.empty((times.shape[0], dim), dtype=np.complex128)
    y = psi0.copy()
    k1 = np.empty(dim, dtype=np.complex128)
    k2 = np.empty(dim, dtype=np.complex128)
    k3 = np.empty(dim, dtype=np.complex128)
    k4 = np.empty(dim, dtype=np.complex128)
    tmp = np.empty(dim, dtype=np.complex128)
    t_prev = 0.0
    for k in range(times.shape[0]):
        dt = times[k] - t_prev
        if dt > 0.0:
            n = int(math.ceil(dt / h_max - 1e-9))
            if n < 1:
                n = 1
            h = dt / n
            for _ in range(n):
                for i in range(dim):
                    s = 0j
                    for j in range(dim):
                        s += a[i, j] * y[j]
                    k1[i] = s
                for i in range(dim):
                    tmp[i] = y[i] + 0.5 * h * k1[i]
                for i in range(dim):
                    s = 0j
                    for j in range(dim):
                        s += a[i, j] * tmp[j]
                    k2[i] = s
                for i in range(dim):
                    tmp[i] = y[i] + 0.5 * h * k2[i]
                for i in range(dim):
                    s = 0j
                    for j in range(dim):
                        s += a[i, j] * tmp[j]
                    k3[i] = s
                for i in range(dim):
                    tmp[i] = y[i] + h * k3[i]
                for i in range(dim):
                    s = 0j
                    for j in range(dim):
                        s += a[i, j] * tmp[j]
                    k4[i] = s
                for i in range(dim):
                    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        out[k] = y
        t_prev = times[k]
    return out


def _rk4_grid_numpy(a, psi0, times, h_max):
    # For constant A the four stages collapse to one polynomial step map.
    dim = psi0.shape[0]
    eye = np.eye(dim, dtype=np.complex128)
    out = np.empty((times.shape[0], dim), dtype=np.complex128)
    y = psi0.copy()
    t_prev = 0.0
    cache = {}
    for k, t in enumerate(times):
        dt = t - t_prev
        if dt > 0.0:
            n = _substeps(dt, h_max)
            h = dt / n
            step = cache.get(h)
            if step is None:
                ah = a * h
                ah2 = ah @ ah
                step = eye + ah + ah2 / 2 + ah2 @ ah / 6 + ah2 @ ah2 / 24
                cache = {h: step}
            for _ in range(n):
                y = step @ y
        out[k] = y
        t_prev = t
    return out


rk4_grid = select(_rk4_grid_numba, _rk4_grid_numpy)


SY_SY = np.array([[0, 0, 0, -1],
                  [0, 0, 1, 0],
                  [0, 1, 0, 0],
                  [-1, 0, 0, 0]], dtype=np.complex128)


@njit
def _flipped_sv_numba(rhos, cut):
    n = rhos.shape[0]
    out = np.empty((n, 4))
    for k in range(n):
        w, v = np.linalg.eigh(rhos[k])
        a = np.zeros((4, 4), dtype=np.complex128)
        for j in range(4):
            if w[j] > cut:
                r = math.sqrt(w[j])
                for i in range(4):
                    a[i, j] = v[i, j] * r
        tau = a.T @ SY_SY @ a
        out[k] = np.linalg.svd(tau)[1]
    return out


def _flipped_sv_numpy(rhos, cut):
    w, v = np.linalg.eigh(rhos)
    root = np.where(w > cut, np.sqrt(np.clip(w, 0.0, None)), 0.0)
    a = v * root[..., None, :]
    tau = np.swapaxes(a, -1, -2) @ SY_SY @ a
    return np.linalg.svd(tau, compute_uv=False)


_flipped_sv = select(_flipped_sv_numba, _flipped_sv_numpy)


def flipped_roots(rhos, cut=1e-12):
    """Square roots of the eigenvalues of ``rho (sy x sy) rho* (sy x sy)``.

    With ``rho = A A^dagger`` these are the singular values of
    ``A^T (sy x sy) A``, which avoids the non-Hermitian eigenproblem.
    Eigenvalues of ``rho`` at or below ``cut`` are treated as zero.
    Returns shape ``(n, 4)``, descending.
    """
    rhos = np.ascontiguousarray(rhos, dtype=np.complex128).reshape(-1, 4, 4)
    return _flipped_sv(rhos, cut)
