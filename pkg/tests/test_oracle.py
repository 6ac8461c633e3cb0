import math

import numpy as np
import pytest
import scipy.linalg

from entangler import dynamics as d
from entangler import oracle
from entangler.errors import StepFailure

H8 = d.build_secular_hamiltonian(1.0)
EGG = d.basis_state("egg")


def conditional_h8(gamma):
    n_exc = sum(d.site_operator(np.diag([1.0, 0.0]), k) for k in range(3))
    return H8 - 1j * gamma * n_exc


def random_hermitian(rng, n=8):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 4


def test_zero_hamiltonian_is_identity():
    psi = np.random.default_rng(1).normal(size=8) + 0j
    np.testing.assert_array_equal(oracle.expm_propagate(np.zeros((8, 8)), psi, 3.0), psi)
    np.testing.assert_array_equal(oracle.rk4_propagate(np.zeros((8, 8)), psi, 1.0, 0.01), psi)


@pytest.mark.parametrize("seed", range(3))
def test_taylor_expm_against_scipy(seed):
    rng = np.random.default_rng(seed)
    a = 5 * (rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
    np.testing.assert_allclose(oracle.expm_taylor(a), scipy.linalg.expm(a), rtol=1e-11, atol=1e-11)


def test_expm_matches_closed_form():
    t = math.pi
    c = d.project(oracle.expm_propagate(H8, EGG, t))
    assert np.max(np.abs(c - d.closed_form_coefficients(t, "schrodinger"))) < 1e-8


def test_expm_matches_dissipative_path():
    tau = np.linspace(0, 8 * math.pi, 100)
    ref = d.evolve_dissipative(np.eye(6)[0], tau, 0.01)
    full = oracle.expm_propagate(conditional_h8(0.01), EGG, tau)
    assert np.max(np.abs(d.project(full) - ref)) < 1e-8


def test_rk4_agrees_with_expm():
    t = 2 * math.pi
    a = oracle.rk4_propagate(H8, EGG, t, 2 * math.pi / 6284)
    b = oracle.expm_propagate(H8, EGG, t)
    assert np.max(np.abs(a - b)) < 1e-8


def test_rk4_requires_integer_steps():
    with pytest.raises(ValueError):
        oracle.rk4_propagate(H8, EGG, 1.0, 0.3)


def test_rk4_richardson_failure():
    with pytest.raises(StepFailure):
        oracle.rk4_propagate(H8, EGG, 40.0, 2.0)


def test_rk4_norm_decay_monotone():
    times = np.linspace(0, 10, 200)
    traj = oracle.rk4_trajectory(conditional_h8(0.05), EGG, times, 1e-3)
    n2 = np.sum(np.abs(traj) ** 2, axis=-1)
    assert np.all(np.diff(n2) < 0)


@pytest.mark.parametrize("seed", range(3))
def test_oracles_agree_on_random_hermitian(seed):
    h = random_hermitian(np.random.default_rng(seed))
    psi = np.random.default_rng(seed + 10).normal(size=8) + 0j
    psi /= np.linalg.norm(psi)
    times = np.linspace(0, 8 * math.pi, 40)
    a = oracle.rk4_trajectory(h, psi, times, 1e-3)
    b = oracle.expm_propagate(h, psi, times)
    assert np.max(np.abs(a - b)) < 1e-8


def test_oracles_agree_on_conditional_hamiltonian():
    times = np.linspace(0, 8 * math.pi, 60)
    h = conditional_h8(0.01)
    a = oracle.rk4_trajectory(h, EGG, times, 1e-3)
    b = oracle.expm_propagate(h, EGG, times)
    assert np.max(np.abs(a - b)) < 1e-8


def test_no_leakage_out_of_subspace():
    times = np.linspace(0, 8 * math.pi, 100)
    c0 = np.random.default_rng(2).normal(size=6) + 1j
    psi0 = d.embed(c0 / np.linalg.norm(c0))
    for traj in (oracle.expm_propagate(H8, psi0, times),
                 oracle.rk4_trajectory(H8, psi0, times, 1e-3)):
        assert np.max(d.leakage(traj)) < 1e-10
