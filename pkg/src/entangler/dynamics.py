"""Three-spin states, Ising-ring and secular Hamiltonians, time evolution.

Conventions
-----------
* Single atom basis ``(|e>, |g>)`` with ``sigma_z |e> = +|e>``,
  ``sigma_z |g> = -|g>`` and ``sigma_+ |g> = |e>``.
* Three-atom states are length-8 complex arrays, atom 1 the slowest index:
  ``index = 4 s1 + 2 s2 + s3`` with ``e -> 0`` and ``g -> 1``.
* Subspace states are length-6 arrays over
  ``egg, eeg, geg, gee, gge, ege`` (one or two atoms excited).
* Time is the dimensionless ``tau = Gamma t`` everywhere in this module.

Phase frames
------------
The closed-form coefficients for the initial state ``|egg>`` are most
compact in a "real" frame where every amplitude is real. The actual
Schrodinger solution of the secular Hamiltonian carries an extra factor
``i`` on the two-excitation amplitudes (``c2, c4, c6``).
Both describe the same physics: they differ by the local unitary
``diag(-i, 1)`` on every atom, so probabilities and every entanglement
measure agree. :func:`closed_form_coefficients` returns either frame;
evolution routines always work in the Schrodinger frame.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import LeakageOutOfSubspace, NotTheSecularMatrix, StepFailure
from .kernels import rk4_grid

# single-atom operators in (e, g) order
SZ = np.diag([1.0, -1.0]).astype(complex)
SP = np.array([[0, 1], [0, 0]], dtype=complex)
SM = SP.T.copy()
SX = SP + SM
SY = np.array([[0, -1j], [1j, 0]])
I2 = np.eye(2, dtype=complex)

SUBSPACE_LABELS = ("egg", "eeg", "geg", "gee", "gge", "ege")
N_EXCITED = np.array([1, 2, 1, 2, 1, 2])
REAL_FRAME_PHASE = np.where(N_EXCITED == 2, -1j, 1.0)


def basis_index(label: str) -> int:
    """Position of e.g. ``"egg"`` in the 8-dim basis."""
    if len(label) != 3 or set(label) - {"e", "g"}:
        raise ValueError(f"bad basis label {label!r}")
    return sum((ch == "g") << (2 - k) for k, ch in enumerate(label))


SUBSPACE_INDEX = np.array([basis_index(s) for s in SUBSPACE_LABELS])
OUTSIDE_INDEX = np.array([basis_index("eee"), basis_index("ggg")])


def basis_state(label: str) -> np.ndarray:
    psi = np.zeros(8, dtype=complex)
    psi[basis_index(label)] = 1.0
    return psi


def site_operator(op, site: int) -> np.ndarray:
    """Embed a 2x2 operator acting on atom ``site`` (0-based) into 8 dims."""
    mats = [I2, I2, I2]
    mats[site] = op
    return np.kron(np.kron(mats[0], mats[1]), mats[2])


def permutation_operator(perm) -> np.ndarray:
    """Unitary relabelling atoms: atom ``k`` of the input lands at ``perm[k]``."""
    u = np.zeros((8, 8))
    for idx in range(8):
        bits = [(idx >> (2 - k)) & 1 for k in range(3)]
        new = [0, 0, 0]
        for k in range(3):
            new[perm[k]] = bits[k]
        u[4 * new[0] + 2 * new[1] + new[2], idx] = 1.0
    return u


def build_ising_hamiltonian(couplings, gamma: float) -> np.ndarray:
    """Ising ring with a transverse drive, as a dense 8x8 matrix.

    ``couplings`` is a :class:`~entangler.model.CouplingSet` or a sequence
    ``(J12, J23, J31)``.
    """
    j12, j23, j31 = getattr(couplings, "j", couplings)
    z = [site_operator(SZ, k) for k in range(3)]
    h = j12 * z[0] @ z[1] + j23 * z[1] @ z[2] + j31 * z[2] @ z[0]
    for k in range(3):
        h = h + gamma * site_operator(SM + SP, k)
    return h


def ising_diagonal(couplings) -> np.ndarray:
    """Diagonal of the pure zz part (drive off), indexed like 8-dim states."""
    return np.real(np.diag(build_ising_hamiltonian(couplings, 0.0)))


def build_secular_hamiltonian(gamma: float) -> np.ndarray:
    """Secular Hamiltonian: flip an atom only if its neighbours disagree."""
    eye = np.eye(8)
    z = [site_operator(SZ, k) for k in range(3)]
    x = [site_operator(SX, k) for k in range(3)]
    h = (x[0] @ (eye - z[1] @ z[2]) + x[1] @ (eye - z[2] @ z[0])
         + x[2] @ (eye - z[0] @ z[1]))
    return 0.5 * gamma * h


def restrict_to_subspace(op8: np.ndarray) -> np.ndarray:
    return op8[np.ix_(SUBSPACE_INDEX, SUBSPACE_INDEX)]


def secular_matrix(gamma: float = 1.0) -> np.ndarray:
    """The 6x6 secular Hamiltonian: a hopping ring ``phi1 - phi2 - ... - phi6 - phi1``."""
    h = np.zeros((6, 6))
    for i in range(6):
        h[i, (i + 1) % 6] = h[(i + 1) % 6, i] = gamma
    return h


def embed(c) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    psi = np.zeros(c.shape[:-1] + (8,), dtype=complex)
    psi[..., SUBSPACE_INDEX] = c
    return psi


def leakage(psi) -> np.ndarray:
    """Norm of the ``|eee>``/``|ggg>`` components."""
    psi = np.asarray(psi)
    return np.linalg.norm(psi[..., OUTSIDE_INDEX], axis=-1)


def project(psi, tol: float = 1e-10) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    leak = np.max(leakage(psi))
    if leak > tol:
        raise LeakageOutOfSubspace(f"amplitude {leak:.3e} outside the two-sector subspace")
    return psi[..., SUBSPACE_INDEX].copy()


def to_real_frame(c) -> np.ndarray:
    return np.asarray(c) * REAL_FRAME_PHASE


def from_real_frame(c) -> np.ndarray:
    return np.asarray(c) / REAL_FRAME_PHASE


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of the 6x6 secular matrix, energies ascending.

    ``vectors[:, j]`` is the eigenvector for ``energies[j]`` and
    ``s_matrix = vectors^dagger`` maps basis amplitudes onto eigen-amplitudes.
    ``analytic`` keeps the closed-form eigenvectors before the degenerate
    pairs were orthonormalised.
    """

    gamma: float
    energies: np.ndarray
    vectors: np.ndarray
    s_matrix: np.ndarray
    analytic: np.ndarray

    def __post_init__(self):
        for arr in (self.energies, self.vectors, self.s_matrix, self.analytic):
            arr.setflags(write=False)


def analytic_eigenvectors():
    """Closed-form eigenvectors and energies (units of Gamma), unnormalised pairs.

    Returned in the labelling ``psi_1 .. psi_6`` with energies
    ``(+1, -1, +1, -1, +2, -2)``; columns of the returned matrix.
    """
    vecs = []
    for s in (+1, -1):
        vecs.append(0.5 * np.array([-1, -s, 0, s, 1, 0]))
    for s in (+1, -1):
        vecs.append(0.5 * np.array([s, 0, -s, -1, 0, 1]))
    for s in (+1, -1):
        vecs.append(np.array([1, s, 1, s, 1, s]) / np.sqrt(6))
    energies = np.array([1.0, -1.0, 1.0, -1.0, 2.0, -2.0])
    return energies, np.array(vecs, dtype=complex).T


def eigensystem(h6: np.ndarray, tol: float = 1e-10) -> SpectralDecomposition:
    """Spectral decomposition of the secular 6x6 matrix from the closed form.

    The two eigenvectors given for each of the degenerate ``+-Gamma`` levels
    overlap (``<psi_1|psi_3> = -1/2``); the second of each pair is
    Gram-Schmidt orthogonalised against the first.
    """
    h6 = np.asarray(h6)
    if h6.shape != (6, 6):
        raise NotTheSecularMatrix(f"expected a 6x6 matrix, got {h6.shape}")
    gamma = float(np.real(h6[0, 1]))
    if not gamma > 0 or np.max(np.abs(h6 - secular_matrix(gamma))) > tol * gamma:
        raise NotTheSecularMatrix("matrix does not match the secular hopping-ring pattern")

    e_units, raw = analytic_eigenvectors()
    order = np.argsort(e_units, kind="stable")  # -2, -1, -1, +1, +1, +2
    energies = gamma * e_units[order]
    vecs = raw[:, order].copy()
    for j in range(6):
        for i in range(j):
            if abs(energies[i] - energies[j]) < tol * gamma:
                vecs[:, j] -= np.vdot(vecs[:, i], vecs[:, j]) * vecs[:, i]
        vecs[:, j] /= np.linalg.norm(vecs[:, j])
    return SpectralDecomposition(gamma=gamma, energies=energies, vectors=vecs,
                                 s_matrix=vecs.conj().T.copy(), analytic=raw)


def closed_form_coefficients(tau, frame: str = "real") -> np.ndarray:
    """Amplitudes ``c1..c6`` at ``tau`` for the initial state ``|egg>``.

    Parameters
    ----------
    tau : float or array
        Dimensionless time ``Gamma t``.
    frame : {"real", "schrodinger"}
        ``"real"`` gives the all-real trigonometric expressions;
        ``"schrodinger"`` multiplies ``c2, c4, c6`` by ``i`` so the result
        solves ``i dc/dtau = H c`` for the secular matrix.

    Returns
    -------
    ndarray, shape ``tau.shape + (6,)``
    """
    tau = np.asarray(tau, dtype=float)
    c1, s1 = np.cos(tau), np.sin(tau)
    c2, s2 = np.cos(2 * tau), np.sin(2 * tau)
    out = np.stack([
        2 / 3 * c1 + 1 / 3 * c2,
        -1 / 3 * s1 - 1 / 3 * s2,
        -1 / 3 * c1 + 1 / 3 * c2,
        2 / 3 * s1 - 1 / 3 * s2,
        -1 / 3 * c1 + 1 / 3 * c2,
        -1 / 3 * s1 - 1 / 3 * s2,
    ], axis=-1).astype(complex)
    if frame == "real":
        return out
    if frame == "schrodinger":
        return from_real_frame(out)
    raise ValueError(f"unknown frame {frame!r}")


def evolve_spectral(psi0, tau, sd: SpectralDecomposition) -> np.ndarray:
    """Propagate a subspace state through the eigenbasis.

    ``tau`` may be an array; the result then has shape ``tau.shape + (6,)``.
    """
    tau = np.asarray(tau, dtype=float)
    weights = sd.s_matrix @ np.asarray(psi0, dtype=complex)
    phases = np.exp(-1j * np.multiply.outer(tau, sd.energies / sd.gamma))
    return (phases * weights) @ sd.vectors.T


def conditional_matrix(gamma_over_gamma: float) -> np.ndarray:
    """No-jump generator on the subspace in units of Gamma.

    Secular hopping plus ``-i gamma`` per excited atom.
    """
    return secular_matrix(1.0) - 1j * gamma_over_gamma * np.diag(N_EXCITED)


def evolve_dissipative(psi0, tau, gamma_over_gamma: float, method: str = "expm",
                       h: float = 1e-3, tol: float = 1e-9) -> np.ndarray:
    """Unnormalised no-decay evolution under the conditional Hamiltonian.

    The squared norm of the result is the probability that no photon was
    emitted up to ``tau``.

    Parameters
    ----------
    psi0 : array, shape (6,)
    tau : float or increasing array of floats >= 0
    gamma_over_gamma : float
        Spontaneous emission rate in units of the laser drive.
    method : {"expm", "rk4"}
        Scaling-and-squaring exponential of the 6x6 generator, or
        fixed-step RK4 (step ``h``) with an h vs h/2 error check.
    tol : float
        Bound on the RK4 error estimate before :class:`StepFailure`.
    """
    if gamma_over_gamma < 0:
        raise ValueError("gamma_over_gamma must be >= 0")
    psi0 = np.asarray(psi0, dtype=complex)
    tau_arr = np.asarray(tau, dtype=float)
    flat = np.atleast_1d(tau_arr)
    if np.any(flat < 0):
        raise ValueError("tau must be >= 0")
    gen = -1j * conditional_matrix(gamma_over_gamma)

    if method == "expm":
        out = np.array([scipy.linalg.expm(gen * t) @ psi0 for t in flat])
    elif method == "rk4":
        if np.any(np.diff(flat) < 0):
            raise ValueError("rk4 needs a non-decreasing tau grid")
        coarse = rk4_grid(gen, psi0, flat, h)
        fine = rk4_grid(gen, psi0, flat, h / 2)
        err = np.max(np.abs(fine - coarse)) * 16 / 15
        if err > tol:
            raise StepFailure(f"RK4 error estimate {err:.2e} exceeds {tol:.1e}; reduce h")
        out = fine
    else:
        raise ValueError(f"unknown method {method!r}")
    return out.reshape(tau_arr.shape + (6,))


def secular_energy(c) -> np.ndarray:
    """Expectation of the secular Hamiltonian (units of Gamma)."""
    c = np.asarray(c)
    h = secular_matrix(1.0)
    return np.real(np.einsum("...i,ij,...j->...", c.conj(), h, c))

