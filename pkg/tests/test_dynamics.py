import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from entangler import dynamics as d
from entangler.errors import LeakageOutOfSubspace, NotTheSecularMatrix, StepFailure

PHI1 = np.eye(6, dtype=complex)[0]
SD = d.eigensystem(d.secular_matrix(1.0))


def random_subspace_state(rng):
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    return c / np.linalg.norm(c)


def test_basis_layout():
    assert d.basis_index("eee") == 0
    assert d.basis_index("egg") == 3
    assert d.basis_index("ggg") == 7
    assert list(d.SUBSPACE_INDEX) == [3, 1, 5, 4, 6, 2]


def test_ising_diagonal_energy():
    h = d.build_ising_hamiltonian((1.0, 1.0, 1.0), 0.0)
    assert np.allclose(h, np.diag(np.diag(h)))
    assert h[d.basis_index("ggg"), d.basis_index("ggg")] == 3.0
    assert h[d.basis_index("egg"), d.basis_index("egg")] == -1.0


def test_ising_drive_element_and_hermiticity():
    h = d.build_ising_hamiltonian((0.0, 0.0, 0.0), 1.0)
    assert h[d.basis_index("egg"), d.basis_index("ggg")] == 1.0
    h = d.build_ising_hamiltonian((0.3, -1.2, 2.0), 0.7)
    assert np.array_equal(h, h.conj().T)


def test_secular_annihilates_uniform_states():
    h = d.build_secular_hamiltonian(1.3)
    assert np.all(h @ d.basis_state("ggg") == 0)
    assert np.all(h @ d.basis_state("eee") == 0)


def test_secular_restriction_is_hopping_ring():
    gamma = 0.7
    h6 = d.restrict_to_subspace(d.build_secular_hamiltonian(gamma))
    expected = np.array([
        [0, 1, 0, 0, 0, 1],
        [1, 0, 1, 0, 0, 0],
        [0, 1, 0, 1, 0, 0],
        [0, 0, 1, 0, 1, 0],
        [0, 0, 0, 1, 0, 1],
        [1, 0, 0, 0, 1, 0],
    ]) * gamma
    np.testing.assert_array_equal(h6, expected)
    np.testing.assert_array_equal(d.secular_matrix(gamma), expected)


def test_flip_rule_by_hand():
    h = d.build_secular_hamiltonian(1.0)
    assert h[d.basis_index("eeg"), d.basis_index("egg")] == 1.0
    # egg -> ggg would flip atom 1 with neighbours g, g: forbidden
    assert h[d.basis_index("ggg"), d.basis_index("egg")] == 0.0


def test_secular_closure_on_subspace():
    h = d.build_secular_hamiltonian(1.0)
    inside = np.zeros(8, bool)
    inside[d.SUBSPACE_INDEX] = True
    assert np.all(h[np.ix_(~inside, inside)] == 0)


@pytest.mark.parametrize("perm", [(1, 0, 2), (0, 2, 1), (2, 0, 1), (1, 2, 0), (2, 1, 0)])
def test_secular_permutation_invariance(perm):
    u = d.permutation_operator(perm)
    h = d.build_secular_hamiltonian(1.0)
    np.testing.assert_allclose(u @ h @ u.T, h, atol=0)
    hz = d.build_ising_hamiltonian((1.0, 1.0, 1.0), 0.4)
    np.testing.assert_allclose(u @ hz @ u.T, hz, atol=1e-15)


def test_eigensystem_energies_and_orthonormality():
    np.testing.assert_allclose(SD.energies, [-2, -1, -1, 1, 1, 2], atol=1e-12)
    v = SD.vectors
    np.testing.assert_allclose(v.conj().T @ v, np.eye(6), atol=1e-12)
    h6 = d.secular_matrix(1.0)
    np.testing.assert_allclose(h6 @ v, v * SD.energies, atol=1e-10)
    np.testing.assert_allclose((v * SD.energies) @ v.conj().T, h6, atol=1e-10)


def test_eigensystem_scales_with_gamma():
    sd = d.eigensystem(d.secular_matrix(2.5))
    np.testing.assert_allclose(sd.energies, 2.5 * np.array([-2, -1, -1, 1, 1, 2]), atol=1e-12)


def test_analytic_eigenvectors():
    energies, raw = d.analytic_eigenvectors()
    h6 = d.secular_matrix(1.0)
    np.testing.assert_allclose(h6 @ raw, raw * energies, atol=1e-15)
    s6 = 1 / math.sqrt(6)
    np.testing.assert_allclose(raw[:, 4], [s6] * 6)
    np.testing.assert_allclose(raw[:, 5], [s6, -s6, s6, -s6, s6, -s6])
    # the closed-form degenerate pair overlaps, hence the orthogonalisation
    assert np.vdot(raw[:, 0], raw[:, 2]) == pytest.approx(-0.5)


def test_eigensystem_projectors_match_generic_solver():
    w, v = np.linalg.eigh(d.secular_matrix(1.0))
    for level in (-2, -1, 1, 2):
        mine = SD.vectors[:, np.isclose(SD.energies, level)]
        ref = v[:, np.isclose(w, level)]
        np.testing.assert_allclose(mine @ mine.conj().T, ref @ ref.conj().T, atol=1e-10)


def test_eigensystem_rejects_other_matrices():
    bad = d.secular_matrix(1.0)
    bad[0, 3] = 0.1
    with pytest.raises(NotTheSecularMatrix):
        d.eigensystem(bad)
    with pytest.raises(NotTheSecularMatrix):
        d.eigensystem(np.eye(4))


def test_closed_form_checkpoints():
    np.testing.assert_allclose(d.closed_form_coefficients(0.0), PHI1, atol=0)
    np.testing.assert_allclose(d.closed_form_coefficients(math.pi),
                               [-1 / 3, 0, 2 / 3, 0, 2 / 3, 0], atol=1e-15)
    np.testing.assert_allclose(d.closed_form_coefficients(2 * math.pi / 3),
                               [-0.5, 0, 0, math.sqrt(3) / 2, 0, 0], atol=1e-15)


def test_closed_form_frames_differ_by_local_phase():
    tau = np.linspace(0, 5, 11)
    real = d.closed_form_coefficients(tau, "real")
    sch = d.closed_form_coefficients(tau, "schrodinger")
    np.testing.assert_allclose(np.abs(real), np.abs(sch), atol=0)
    np.testing.assert_allclose(d.to_real_frame(sch), real, atol=1e-16)
    with pytest.raises(ValueError):
        d.closed_form_coefficients(1.0, "lab")


def test_closed_form_solves_schrodinger_equation():
    # central finite difference of i dc/dtau against H c
    tau = np.linspace(0.1, 20, 50)
    step = 1e-5
    c = d.closed_form_coefficients(tau, "schrodinger")
    dc = (d.closed_form_coefficients(tau + step, "schrodinger")
          - d.closed_form_coefficients(tau - step, "schrodinger")) / (2 * step)
    np.testing.assert_allclose(1j * dc, c @ d.secular_matrix(1.0).T, atol=1e-9)


def test_spectral_matches_closed_form():
    tau = np.linspace(0, 8 * math.pi, 1000)
    c = d.evolve_spectral(PHI1, tau, SD)
    assert np.max(np.abs(c - d.closed_form_coefficients(tau, "schrodinger"))) < 1e-8


def test_spectral_stationary_state():
    v = SD.vectors[:, -1]  # energy +2 Gamma
    tau = np.linspace(0, 7, 9)
    c = d.evolve_spectral(v, tau, SD)
    np.testing.assert_allclose(c, np.exp(-2j * tau)[:, None] * v, atol=1e-13)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.floats(0, 100))
def test_spectral_norm_conserved(seed, tau):
    c0 = random_subspace_state(np.random.default_rng(seed))
    c = d.evolve_spectral(c0, tau, SD)
    assert abs(np.linalg.norm(c) - 1) < 1e-10


def test_energy_conserved():
    c0 = random_subspace_state(np.random.default_rng(3))
    tau = np.linspace(0, 8 * math.pi, 200)
    e = d.secular_energy(d.evolve_spectral(c0, tau, SD))
    assert np.max(np.abs(e - e[0])) < 1e-9


def test_subspace_evolution_matches_full_space():
    c0 = random_subspace_state(np.random.default_rng(5))
    h8 = d.build_secular_hamiltonian(1.0)
    for tau in (0.3, 2.0, 17.0):
        full = scipy.linalg.expm(-1j * h8 * tau) @ d.embed(c0)
        np.testing.assert_allclose(d.project(full), d.evolve_spectral(c0, tau, SD), atol=1e-9)


def test_dissipative_reduces_to_unitary():
    tau = np.linspace(0, 8 * math.pi, 300)
    ref = d.closed_form_coefficients(tau, "schrodinger")
    for method in ("expm", "rk4"):
        c = d.evolve_dissipative(PHI1, tau, 0.0, method=method)
        assert np.max(np.abs(c - ref)) < 1e-8


def test_dissipative_norm_strictly_decreasing():
    tau = np.linspace(0, 4 * math.pi, 400)
    c = d.evolve_dissipative(PHI1, tau, 0.01)
    n2 = np.sum(np.abs(c) ** 2, axis=-1)
    assert np.all(np.diff(n2) < 0)


@pytest.mark.parametrize("gamma", [0.0, 0.001, 0.01, 0.3])
def test_dissipative_exchange_symmetry(gamma):
    tau = np.linspace(0, 8 * math.pi, 500)
    c = d.evolve_dissipative(PHI1, tau, gamma)
    assert np.max(np.abs(c[:, 2] - c[:, 4])) < 1e-10
    assert np.max(np.abs(c[:, 1] - c[:, 5])) < 1e-10


@pytest.mark.parametrize("gamma", [0.001, 0.01, 0.1])
def test_dissipative_methods_agree(gamma):
    tau = np.linspace(0, 8 * math.pi, 250)
    a = d.evolve_dissipative(PHI1, tau, gamma, method="expm")
    b = d.evolve_dissipative(PHI1, tau, gamma, method="rk4")
    assert np.max(np.abs(a - b)) < 1e-8


def test_dissipative_step_failure():
    with pytest.raises(StepFailure):
        d.evolve_dissipative(PHI1, [50.0], 0.0, method="rk4", h=0.5)


def test_dissipative_scalar_and_errors():
    c = d.evolve_dissipative(PHI1, math.pi, 0.0)
    assert c.shape == (6,)
    with pytest.raises(ValueError):
        d.evolve_dissipative(PHI1, 1.0, -0.1)
    with pytest.raises(ValueError):
        d.evolve_dissipative(PHI1, 1.0, 0.0, method="euler")


def test_embed_project_roundtrip():
    rng = np.random.default_rng(0)
    x = random_subspace_state(rng)
    np.testing.assert_array_equal(d.project(d.embed(x)), x)
    np.testing.assert_array_equal(d.embed(PHI1), d.basis_state("egg"))
    with pytest.raises(LeakageOutOfSubspace):
        d.project(d.basis_state("ggg"))
    assert d.leakage(d.basis_state("eee")) == 1.0
