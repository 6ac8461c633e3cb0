"""Remote Bell-state preparation on atoms 2 and 3.

All three lasers are switched off together at ``tau_off``; atom 1 is then
measured in the ``sigma_z`` basis. Finding it in ``|g>`` heralds atoms 2, 3
in (ideally) ``|Psi+> = (|eg> + |ge>)/sqrt(2)``; finding it in ``|e>``
returns the ring to ``|egg>``.

Spontaneous emission is handled in the no-jump picture: the conditional
state loses norm, and its squared norm is the probability that no photon
was emitted. Two success curves are reported:

* joint: ``|(c3 + c5)/sqrt(2)|^2`` of the unnormalised conditional state,
  i.e. P(no decay and atom 1 in g and projection onto Psi+);
* conditioned: the joint curve divided by the no-decay probability.

The joint curve is the one whose maxima match 0.881, 0.872 and 0.809 for
``gamma/Gamma = 0.001, 0.002, 0.01``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
PSI_PLUS = np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) / math.sqrt(2.0)
EGG = dynamics.basis_state("egg")


@dataclass(frozen=True)
class ProtocolOutcome:
    """Everything measured in one run of the protocol.

    ``p_ground``/``p_excited`` are conditioned on no decay; ``p_success`` is
    unconditional. ``fidelity_bell`` compares the full post-measurement state
    of atoms 2, 3 (basis ``ee, eg, ge, gg``) with ``|Psi+>``; it is below one
    whenever ``|gee>`` is populated at turn-off. ``fidelity_bell_sector``
    makes the same comparison inside the one-excitation sector ``{eg, ge}``
    and equals one whenever ``c3 = c5``. Undefined fidelities are NaN.
    """

    turn_off_tau: float
    gamma_over_gamma: float
    p_no_decay: float
    p_ground: float
    p_excited: float
    p_success: float
    post_success_state: np.ndarray | None
    fidelity_bell: float
    fidelity_bell_sector: float
    post_failure_state: np.ndarray | None
    fidelity_recover: float

    @property
    def p_decay(self):
        return 1.0 - self.p_no_decay


def _conditional_state(tau_off, gamma_over_gamma):
    c0 = np.eye(6, dtype=complex)[0]
    return dynamics.evolve_dissipative(c0, tau_off, gamma_over_gamma)


def run_protocol(tau_off: float, gamma_over_gamma: float = 0.0, hold_tau: float = 0.0,
                 couplings_over_gamma=(1.0, 1.0, 1.0)) -> ProtocolOutcome:
    """Turn the lasers off at ``tau_off`` and measure atom 1.

    Parameters
    ----------
    tau_off : float
        Turn-off time ``Gamma t``.
    gamma_over_gamma : float
        Spontaneous emission rate in units of ``Gamma``.
    hold_tau : float
        Optional wait between turn-off and measurement; the ring then
        evolves under the bare zz couplings ``couplings_over_gamma``
        (``J_ij / Gamma``), which only imprints phases.
    """
    if tau_off < 0:
        raise ValueError("tau_off must be >= 0")
    c = _conditional_state(tau_off, gamma_over_gamma)
    p_no_decay = float(np.vdot(c, c).real)
    psi = dynamics.embed(c) / math.sqrt(p_no_decay)
    if hold_tau:
        psi = psi * np.exp(-1j * hold_tau * dynamics.ising_diagonal(couplings_over_gamma))

    ground, excited = psi[4:], psi[:4]
    p_ground = float(np.vdot(ground, ground).real)
    p_excited = float(np.vdot(excited, excited).real)

    post_success = fid_bell = fid_sector = None
    if p_ground > 0:
        post_success = ground / math.sqrt(p_ground)
        fid_bell = abs(np.vdot(PSI_PLUS, post_success)) ** 2
        sector = abs(post_success[1]) ** 2 + abs(post_success[2]) ** 2
        if sector > 0:
            fid_sector = abs(np.vdot(PSI_PLUS, post_success)) ** 2 / sector
    post_failure = fid_recover = None
    if p_excited > 0:
        post_failure = np.concatenate([excited, np.zeros(4)]) / math.sqrt(p_excited)
        fid_recover = abs(np.vdot(EGG, post_failure)) ** 2

    nan = float("nan")
    return ProtocolOutcome(
        turn_off_tau=float(tau_off),
        gamma_over_gamma=float(gamma_over_gamma),
        p_no_decay=p_no_decay,
        p_ground=p_ground,
        p_excited=p_excited,
        p_success=p_no_decay * p_ground,
        post_success_state=post_success,
        fidelity_bell=nan if fid_bell is None else float(fid_bell),
        fidelity_bell_sector=nan if fid_sector is None else float(fid_sector),
        post_failure_state=post_failure,
        fidelity_recover=nan if fid_recover is None else float(fid_recover),
    )


def no_decay_probability(tau, gamma_over_gamma: float) -> np.ndarray:
    """Probability that no photon has been emitted by ``tau``."""
    c = _conditional_state(tau, gamma_over_gamma)
    return np.sum(np.abs(c) ** 2, axis=-1)


def success_probability(tau, gamma_over_gamma: float = 0.0, conditioned: bool = False):
    """Bell-state success probability at ``tau`` (scalar or array)."""
    c = _conditional_state(tau, gamma_over_gamma)
    p = np.abs(c[..., 2] + c[..., 4]) ** 2 / 2.0
    if conditioned:
        p = p / np.sum(np.abs(c) ** 2, axis=-1)
    return p


def success_probability_curve(tau_grid, gamma_over_gamma: float = 0.0):
    """Joint and no-decay-conditioned success curves on ``tau_grid``.

    Returns
    -------
    tau, p_joint, p_conditioned : ndarray
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.size > 1 and np.any(np.diff(tau_grid) <= 0):
        raise ValueError("tau grid must be increasing")
    if gamma_over_gamma < 0:
        raise ValueError("gamma must be >= 0")
    c = _conditional_state(tau_grid, gamma_over_gamma)
    joint = np.abs(c[..., 2] + c[..., 4]) ** 2 / 2.0
    cond = joint / np.sum(np.abs(c) ** 2, axis=-1)
    return tau_grid, joint, cond


def golden_section_max(f, a: float, b: float, xtol: float = 1e-7):
    """Maximise a unimodal ``f`` on ``[a, b]``."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def find_peak(tau, p, evaluator=None, xtol: float = 1e-7):
    """Locate the maximum of a sampled curve.

    Takes the first grid argmax; when ``evaluator`` is given and the argmax
    is interior, refines it by golden-section search on the neighbouring
    grid cells.
    """
    tau = np.asarray(tau, dtype=float)
    p = np.asarray(p, dtype=float)
    if tau.size == 0:
        raise ValueError("empty curve")
    k = int(np.argmax(p))
    if evaluator is None or k == 0 or k == tau.size - 1:
        return float(tau[k]), float(p[k])
    x, fx = golden_section_max(evaluator, float(tau[k - 1]), float(tau[k + 1]), xtol)
    if fx < p[k]:
        return float(tau[k]), float(p[k])
    return float(x), float(fx)


def peak_success(gamma_over_gamma: float, tau_max: float = 2 * math.pi, points: int = 2001,
                 conditioned: bool = False):
    """Refined maximum of the success curve on ``[0, tau_max]``."""
    tau, joint, cond = success_probability_curve(np.linspace(0.0, tau_max, points),
                                                 gamma_over_gamma)
    curve = cond if conditioned else joint

    def evaluator(t):
        return float(success_probability(t, gamma_over_gamma, conditioned))

    return find_peak(tau, curve, evaluator)
