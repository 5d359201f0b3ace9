"""Wigner function: closed-form displacement, origin identities, normalization."""

import numpy as np
import pytest
from scipy.linalg import expm

from mechqubit import (
    WignerGrid,
    annihilation,
    default_grid,
    displacement_matrix,
    fock_dm,
    origin_parity_value,
    thermal_state,
    wigner,
)


def test_displacement_against_matrix_exponential():
    # independent oracle: expm of the generator on a deep truncation,
    # compared on the low block where truncation effects are negligible
    dim, keep = 28, 8
    b = annihilation(dim)
    for beta in (0.3, 0.2 - 0.4j, -0.6 + 0.1j):
        oracle = expm(beta * b.conj().T - np.conj(beta) * b)
        closed = displacement_matrix(beta, dim)
        assert np.max(np.abs(closed[:keep, :keep] - oracle[:keep, :keep])) < 1e-10


def test_displacement_of_vacuum_is_coherent_state():
    beta = 0.7 - 0.2j
    d = displacement_matrix(beta, 40)
    amps = d[:, 0]
    n = np.arange(40)
    from scipy.special import gammaln
    expected = np.exp(-abs(beta) ** 2 / 2) * beta ** n / np.exp(0.5 * gammaln(n + 1.0))
    assert np.max(np.abs(amps - expected)) < 1e-12


def test_origin_values_for_parity_eigenstates():
    two_over_pi = 2.0 / np.pi
    grid = np.array([-0.5, 0.0, 0.5])
    w_vac = wigner(fock_dm(6, 0), grid, grid)
    assert w_vac.value_at(0.0, 0.0) == pytest.approx(two_over_pi, abs=1e-12)
    w_one = wigner(fock_dm(6, 1), grid, grid)
    assert w_one.value_at(0.0, 0.0) == pytest.approx(-two_over_pi, abs=1e-12)
    mix = 0.5 * fock_dm(6, 0) + 0.5 * fock_dm(6, 1)
    w_mix = wigner(mix, grid, grid)
    assert w_mix.value_at(0.0, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_origin_equals_signed_population_sum():
    rng = np.random.default_rng(5)
    for _ in range(5):
        a = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        expected = origin_parity_value(rho)
        w = wigner(rho, np.array([0.0]), np.array([0.0]))
        assert w.values[0, 0] == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("rho_maker", [
    lambda: fock_dm(8, 0),
    lambda: fock_dm(8, 1),
    lambda: fock_dm(8, 3),
    lambda: thermal_state(0.5, 8),
])
def test_grid_normalization(rho_maker):
    grid = default_grid(3.5, 0.05)
    w = wigner(rho_maker(), grid, grid)
    assert w.integral() == pytest.approx(1.0, abs=1e-3)


def test_grid_normalization_with_coherences():
    psi = np.zeros(8, dtype=complex)
    psi[0], psi[1], psi[2] = 0.6, 0.48j, 0.64
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    w = wigner(rho, default_grid(3.5, 0.05), default_grid(3.5, 0.05))
    assert w.integral() == pytest.approx(1.0, abs=1e-3)


def test_wigner_requires_nonempty_grid():
    with pytest.raises(ValueError):
        wigner(fock_dm(4, 0), np.array([]), np.array([0.0]))


def test_wigner_grid_shape_validation():
    with pytest.raises(ValueError):
        WignerGrid(np.zeros(3), np.zeros(3), np.zeros((2, 3)))


def test_default_grid_contains_origin():
    g = default_grid(3.5, 0.05)
    assert 0.0 in g
    assert g[0] == pytest.approx(-3.5)
    assert g[-1] == pytest.approx(3.5)
