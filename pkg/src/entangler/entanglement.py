"""Pairwise concurrence, one-vs-rest tangles and residual three-atom entanglement.

Atoms are labelled 1, 2, 3 in this module's public functions, matching the
physics notation; states use the 8-dim layout of :mod:`entangler.dynamics`.

The three-atom quantity is ``C_a(bc) - C_ab^2 - C_ac^2`` with
``C_a(bc) = 4 det rho_a``. Note that ``4 det rho_a`` is already the square
of the one-vs-rest concurrence, so this is the usual residual tangle even
though the first term carries no explicit square.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamics
from .errors import InvalidDensity, NotNormalized, NumericalError
from .kernels import SY_SY, flipped_roots

NORM_TOL = 1e-8
DENSITY_TOL = 1e-8
CLAMP_TOL = 1e-12
TANGLE_AGREE_TOL = 1e-12
RESIDUAL_TOL = 1e-9

PAIRS = ((1, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class EntanglementReport:
    """Entanglement of one pure three-atom state.

    ``c_pair`` = (C12, C13, C23); ``tangle_one_rest`` = (C1(23), C2(31), C3(12));
    ``c_three`` holds the residual entanglement taking each atom as focus.
    """

    c_pair: tuple
    tangle_one_rest: tuple
    c_three: tuple

    @property
    def c12(self):
        return self.c_pair[0]

    @property
    def c13(self):
        return self.c_pair[1]

    @property
    def c23(self):
        return self.c_pair[2]

    @property
    def c123(self):
        return self.c_three[0]


def _check_normalized(psi):
    norms = np.linalg.norm(psi, axis=-1)
    bad = np.abs(norms - 1.0)
    if np.any(bad > NORM_TOL):
        raise NotNormalized(f"state norm off by {np.max(bad):.2e}; normalise first")


def normalize(psi):
    psi = np.asarray(psi, dtype=complex)
    return psi / np.linalg.norm(psi, axis=-1, keepdims=True)


def reduced_density(psi, keep) -> np.ndarray:
    """Partial trace of a pure three-atom state onto the atoms in ``keep``.

    ``psi`` may carry leading batch dimensions. ``keep`` is one atom or a
    pair, e.g. ``(2, 3)``; kept atoms stay in increasing order.
    """
    psi = np.asarray(psi, dtype=complex)
    _check_normalized(psi)
    psi = normalize(psi)
    keep = sorted({keep} if isinstance(keep, int) else set(keep))
    if not keep or any(a not in (1, 2, 3) for a in keep):
        raise ValueError(f"bad atom subset {keep}")
    t = psi.reshape(psi.shape[:-1] + (2, 2, 2))
    letters = "abc"
    prime = "xyz"
    ket = "..." + letters
    bra = "..." + "".join(prime[k] if (k + 1) in keep else letters[k] for k in range(3))
    out = "..." + "".join(letters[k - 1] for k in keep) + "".join(prime[k - 1] for k in keep)
    rho = np.einsum(f"{ket},{bra}->{out}", t, t.conj())
    d = 2 ** len(keep)
    return rho.reshape(psi.shape[:-1] + (d, d))


def _validate_density(rho):
    herm = np.max(np.abs(rho - np.conj(np.swapaxes(rho, -1, -2))))
    if herm > DENSITY_TOL:
        raise InvalidDensity(f"not Hermitian (deviation {herm:.2e})")
    tr = np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1.0)
    if np.any(tr > DENSITY_TOL):
        raise InvalidDensity(f"trace off by {np.max(tr):.2e}")
    w = np.linalg.eigvalsh(rho)
    if np.any(w < -DENSITY_TOL):
        raise InvalidDensity(f"negative eigenvalue {np.min(w):.2e}")


def concurrence(rho) -> float | np.ndarray:
    """Two-qubit concurrence ``max(0, l1 - l2 - l3 - l4)``.

    Accepts a single 4x4 density matrix or a stack of them.

    Raises
    ------
    InvalidDensity
        On Hermiticity, trace or positivity violations beyond 1e-8.
    """
    rho = np.asarray(rho, dtype=complex)
    _validate_density(rho)
    lam = flipped_roots(rho, CLAMP_TOL)
    c = np.maximum(0.0, lam[:, 0] - lam[:, 1] - lam[:, 2] - lam[:, 3])
    return float(c[0]) if rho.ndim == 2 else c.reshape(rho.shape[:-2])


def tangle_one_rest(psi, a: int):
    """``4 det rho_a``, cross-checked against ``2 (1 - Tr rho_a^2)``."""
    rho = reduced_density(psi, a)
    det = np.real(rho[..., 0, 0] * rho[..., 1, 1] - rho[..., 0, 1] * rho[..., 1, 0])
    purity = np.real(np.einsum("...ij,...ji->...", rho, rho))
    t_det = 4.0 * det
    t_pur = 2.0 * (1.0 - purity)
    gap = np.max(np.abs(t_det - t_pur))
    if gap > TANGLE_AGREE_TOL:
        raise NumericalError(f"tangle expressions disagree by {gap:.2e}")
    t = np.clip(t_det, 0.0, 1.0)
    return float(t) if np.ndim(t) == 0 else t


def pure_pair_concurrence(psi, pair):
    """Concurrence of ``rho_ab`` for a pure three-atom state, without eigensolves.

    ``rho_ab = x x^dagger + y y^dagger`` with ``x, y`` the slices of ``psi``
    at the traced atom in ``e`` and ``g``; the concurrence is the gap
    between the singular values of ``[x y]^T (sy x sy) [x y]``.
    """
    psi = np.asarray(psi, dtype=complex)
    _check_normalized(psi)
    psi = normalize(psi)
    a, b = sorted(pair)
    traced = ({1, 2, 3} - {a, b}).pop()
    t = np.moveaxis(psi.reshape(psi.shape[:-1] + (2, 2, 2)), psi.ndim - 1 + traced - 1, -1)
    cols = t.reshape(psi.shape[:-1] + (4, 2))
    tau = np.swapaxes(cols, -1, -2) @ SY_SY @ cols
    s = np.linalg.svd(tau, compute_uv=False)
    c = np.maximum(0.0, s[..., 0] - s[..., 1])
    return float(c) if np.ndim(c) == 0 else c


_pair_concurrence = pure_pair_concurrence


def three_tangle(psi, a: int = 1):
    """Residual three-atom entanglement with atom ``a`` as focus."""
    b, c = [k for k in (1, 2, 3) if k != a]
    res = (tangle_one_rest(psi, a) - _pair_concurrence(psi, (a, b)) ** 2
           - _pair_concurrence(psi, (a, c)) ** 2)
    if np.min(res) < -RESIDUAL_TOL:
        raise NumericalError(f"residual entanglement {np.min(res):.2e} < 0")
    out = np.clip(res, 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def entanglement_arrays(psi) -> dict:
    """All measures for a batch of states, as arrays keyed by name.

    Keys: ``C12, C13, C23, tangle_1_rest, tangle_2_rest, tangle_3_rest,
    C123_focus1, C123_focus2, C123_focus3``.
    """
    psi = np.atleast_2d(np.asarray(psi, dtype=complex))
    out = {}
    for a, b in PAIRS:
        out[f"C{a}{b}"] = np.atleast_1d(_pair_concurrence(psi, (a, b)))
    for a in (1, 2, 3):
        out[f"tangle_{a}_rest"] = np.atleast_1d(tangle_one_rest(psi, a))
    for a in (1, 2, 3):
        b, c = [k for k in (1, 2, 3) if k != a]
        res = (out[f"tangle_{a}_rest"] - out[f"C{min(a, b)}{max(a, b)}"] ** 2
               - out[f"C{min(a, c)}{max(a, c)}"] ** 2)
        if np.min(res) < -RESIDUAL_TOL:
            raise NumericalError(f"residual entanglement {np.min(res):.2e} < 0")
        out[f"C123_focus{a}"] = np.clip(res, 0.0, 1.0)
    return out


def _reports(arrs):
    n = len(arrs["C12"])
    return [
        EntanglementReport(
            c_pair=tuple(float(arrs[k][i]) for k in ("C12", "C13", "C23")),
            tangle_one_rest=tuple(float(arrs[f"tangle_{a}_rest"][i]) for a in (1, 2, 3)),
            c_three=tuple(float(arrs[f"C123_focus{a}"][i]) for a in (1, 2, 3)),
        )
        for i in range(n)
    ]


def entanglement_report(psi) -> EntanglementReport:
    return _reports(entanglement_arrays(psi))[0]


def evolved_states(tau_grid, gamma_over_gamma: float = 0.0) -> np.ndarray:
    """Normalised 8-dim states on ``tau_grid`` starting from ``|egg>``."""
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.size > 1 and np.any(np.diff(tau_grid) <= 0):
        raise ValueError("tau grid must be strictly increasing")
    c0 = np.eye(6, dtype=complex)[0]
    if gamma_over_gamma > 0:
        c = dynamics.evolve_dissipative(c0, tau_grid, gamma_over_gamma)
    else:
        sd = dynamics.eigensystem(dynamics.secular_matrix(1.0))
        c = dynamics.evolve_spectral(c0, tau_grid, sd)
    return normalize(dynamics.embed(c))


def entanglement_timeseries(tau_grid, gamma_over_gamma: float = 0.0):
    """Evolve ``|egg>`` over ``tau_grid`` and report entanglement at each point."""
    return _reports(entanglement_arrays(evolved_states(tau_grid, gamma_over_gamma)))
