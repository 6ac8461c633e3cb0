"""Effective Ising-ring couplings from cavity, drive and fiber parameters.

Three single-sided cavities, each holding one two-level atom and driven by
an external field, are joined into a ring by optical fibers. After the
cavity fields are eliminated, the atoms see pairwise zz couplings ``J_ij``
set by the cavity parameters and the steady-state field amplitudes
``alpha_i``. Fiber link order throughout is ``(21, 32, 13)``.

Fiber loss enters by replacing every propagation factor ``exp(i phi_ij)``
with ``exp(i phi_ij - nu L_ij)``; the attenuation is stored as a separate
real factor per link so phases stay real.

The exponent of the second term inside each ``J_ij`` is read as
``exp(i (phi_a + phi_b))`` (both phases multiplied by ``i``), matching the
form of ``W^3``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateDenominator

DEGENERATE_RTOL = 1e-12
SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Experiment-level inputs, all frequencies in one common unit.

    ``phi`` and ``fiber_lengths`` use link order (21, 32, 13).
    ``attenuation`` holds ``exp(-nu L)`` per link once
    :func:`apply_fiber_loss` has been applied; it is all ones otherwise.
    """

    g: float
    delta: float
    kappa: float
    eps: tuple = (1.0, 1.0, 1.0)
    phi: tuple = (math.pi / 2, math.pi / 2, math.pi / 2)
    gamma_laser: float = 1e-9
    gamma_spont: float = 0.0
    nu: float = 0.0
    fiber_lengths: tuple = (0.0, 0.0, 0.0)
    attenuation: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(complex(e) for e in self.eps))
        object.__setattr__(self, "phi", tuple(float(p) for p in self.phi))
        object.__setattr__(self, "fiber_lengths", tuple(float(x) for x in self.fiber_lengths))
        object.__setattr__(self, "attenuation", tuple(float(x) for x in self.attenuation))
        for name in ("eps", "phi", "fiber_lengths", "attenuation"):
            if len(getattr(self, name)) != 3:
                raise ValueError(f"{name} needs exactly 3 entries")
        for name in ("g", "delta", "kappa", "gamma_laser"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not all(math.isfinite(p) for p in self.phi):
            raise ValueError("phases must be finite")
        if self.gamma_spont < 0:
            raise ValueError("gamma_spont must be >= 0")
        if self.nu < 0 or any(x < 0 for x in self.fiber_lengths):
            raise ValueError("nu and fiber lengths must be >= 0")


@dataclass(frozen=True)
class CouplingSet:
    chi: float
    m: complex
    w_cubed: complex
    alpha: tuple
    j: tuple
    symmetric: bool

    @property
    def j12(self):
        return self.j[0]

    @property
    def j23(self):
        return self.j[1]

    @property
    def j31(self):
        return self.j[2]


@dataclass(frozen=True)
class RegimeThresholds:
    """Numerical reading of the regime inequalities (advisory defaults)."""

    much_greater: float = 10.0
    approx_equal: float = 0.5
    much_less: float = 0.1


@dataclass(frozen=True)
class RegimeReport:
    delta_over_g: float
    kappa_over_g: float
    detuning_mismatch: float
    gamma_over_min_j: float
    thresholds: RegimeThresholds = field(default_factory=RegimeThresholds)

    @property
    def delta_much_greater_g(self):
        return self.delta_over_g >= self.thresholds.much_greater

    @property
    def kappa_much_greater_g(self):
        return self.kappa_over_g >= self.thresholds.much_greater

    @property
    def delta_approx_kappa(self):
        return self.detuning_mismatch <= self.thresholds.approx_equal

    @property
    def adiabatic(self):
        return self.gamma_over_min_j <= self.thresholds.much_less

    @property
    def ok(self):
        return (self.delta_much_greater_g and self.kappa_much_greater_g
                and self.delta_approx_kappa and self.adiabatic)

    def warnings(self):
        out = []
        t = self.thresholds
        if not self.delta_much_greater_g:
            out.append(f"Delta/g = {self.delta_over_g:.4g} < {t.much_greater:g}")
        if not self.kappa_much_greater_g:
            out.append(f"kappa/g = {self.kappa_over_g:.4g} < {t.much_greater:g}")
        if not self.delta_approx_kappa:
            out.append(f"|Delta-kappa|/kappa = {self.detuning_mismatch:.4g} > {t.approx_equal:g}")
        if not self.adiabatic:
            out.append(f"Gamma/min|J| = {self.gamma_over_min_j:.4g} > {t.much_less:g}")
        return out


def _link_factors(p: PhysicalParams):
    return tuple(a * np.exp(1j * ph) for a, ph in zip(p.attenuation, p.phi))


def _close(values, rtol):
    scale = max(abs(v) for v in values)
    if scale == 0:
        return True
    return all(abs(values[i] - values[i + 1]) <= rtol * scale for i in range(len(values) - 1))


def derive_couplings(p: PhysicalParams) -> CouplingSet:
    """Evaluate ``alpha_i`` and ``J_ij`` for the driven cavity ring.

    Raises
    ------
    DegenerateDenominator
        If ``|M^3 - W^3| <= 1e-12 kappa^3``.
    """
    kappa = p.kappa
    chi = p.g**2 / p.delta
    m = 1j * p.delta + kappa
    e21, e32, e13 = _link_factors(p)
    w3 = kappa**3 * e21 * e32 * e13
    den = m**3 - w3
    if abs(den) <= DEGENERATE_RTOL * kappa**3:
        raise DegenerateDenominator(
            f"|M^3 - W^3| = {abs(den):.3e} is below {DEGENERATE_RTOL:g} kappa^3"
        )
    eps1, eps2, eps3 = p.eps
    a1 = (m**2 * eps1 + kappa**2 * e32 * e13 * eps2 + m * kappa * e13 * eps3) / den
    a2 = (m**2 * eps2 + kappa**2 * e13 * e21 * eps3 + m * kappa * e21 * eps1) / den
    a3 = (m**2 * eps3 + kappa**2 * e21 * e32 * eps1 + m * kappa * e32 * eps2) / den

    pre = 2.0 * kappa * chi**2
    j12 = pre * (a1 * np.conj(a2) * (m * e21 + kappa * e32 * e13) / den).imag
    j23 = pre * (a2 * np.conj(a3) * (m * e32 + kappa * e13 * e21) / den).imag
    j31 = pre * (a3 * np.conj(a1) * (m * e13 + kappa * e21 * e32) / den).imag

    alpha = (complex(a1), complex(a2), complex(a3))
    j = (float(j12), float(j23), float(j31))
    symmetric = _close(alpha, SYMMETRY_RTOL) and _close(j, SYMMETRY_RTOL)
    return CouplingSet(chi=chi, m=complex(m), w_cubed=complex(w3), alpha=alpha, j=j,
                       symmetric=symmetric)


def apply_fiber_loss(p: PhysicalParams) -> PhysicalParams:
    """Attach ``exp(-nu L_ij)`` to every fiber link. Idempotent."""
    att = tuple(math.exp(-p.nu * length) for length in p.fiber_lengths)
    return replace(p, attenuation=att)


def fiber_loss_ratio(p: PhysicalParams) -> float:
    """Ratio of the smallest |J| with fiber loss to the lossless value."""
    lossless = derive_couplings(replace(p, attenuation=(1.0, 1.0, 1.0)))
    lossy = derive_couplings(apply_fiber_loss(p))
    j0 = min(abs(x) for x in lossless.j)
    return min(abs(x) for x in lossy.j) / j0


def fiber_length_for_ratio(p: PhysicalParams, ratio: float = 0.9, l_max: float = 1e3) -> float:
    """Common fiber length at which the coupling ratio reaches ``ratio``.

    Uses ``p.nu`` and sets all three links to the same length.
    """
    if p.nu <= 0:
        raise ValueError("nu must be > 0 to attenuate the couplings")

    def f(length):
        return fiber_loss_ratio(replace(p, fiber_lengths=(length,) * 3)) - ratio

    return brentq(f, 0.0, l_max, xtol=1e-14, rtol=1e-14)


def validate_regime(p: PhysicalParams, c: CouplingSet,
                    thresholds: RegimeThresholds | None = None) -> RegimeReport:
    """Check ``Delta ~ kappa >> g`` and ``Gamma << |J|``. Never raises."""
    thresholds = thresholds or RegimeThresholds()
    min_j = min(abs(x) for x in c.j)
    return RegimeReport(
        delta_over_g=p.delta / p.g,
        kappa_over_g=p.kappa / p.g,
        detuning_mismatch=abs(p.delta - p.kappa) / p.kappa,
        gamma_over_min_j=p.gamma_laser / min_j if min_j > 0 else math.inf,
        thresholds=thresholds,
    )
