"""Operators, states, dissipator, fidelity, and parity bookkeeping."""

import numpy as np
import pytest
from scipy.linalg import expm

from mechqubit import (
    annihilation,
    default_thermal_dim,
    dissipator,
    fock_dm,
    number_operator,
    parity_populations,
    thermal_state,
    two_phonon_target,
    uhlmann_fidelity,
    validate_density_matrix,
)


def random_density_matrix(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_annihilation_entries():
    b = annihilation(3)
    expected = np.zeros((3, 3), dtype=complex)
    expected[0, 1] = 1.0
    expected[1, 2] = np.sqrt(2.0)
    assert np.array_equal(b, expected)


def test_annihilation_trivial_dim():
    assert np.array_equal(annihilation(1), np.zeros((1, 1)))


def test_annihilation_invalid_dim():
    with pytest.raises(ValueError):
        annihilation(0)


def test_number_operator_from_ladder():
    b = annihilation(4)
    assert np.allclose(b.conj().T @ b, np.diag([0.0, 1.0, 2.0, 3.0]))
    assert np.allclose(number_operator(4), np.diag([0.0, 1.0, 2.0, 3.0]))


@pytest.mark.parametrize("dim", [2, 3, 5, 8])
def test_ladder_commutator_is_identity_below_truncation_edge(dim):
    b = annihilation(dim)
    comm = b @ b.conj().T - b.conj().T @ b
    for n in range(dim - 1):
        e = np.zeros(dim)
        e[n] = 1.0
        assert np.allclose(comm @ e, e, atol=1e-14)


def test_thermal_zero_occupation_is_ground_state():
    assert np.allclose(thermal_state(0.0, 6), fock_dm(6, 0))


def test_thermal_populations_follow_geometric_law():
    rho = thermal_state(4.0, 400)
    p = np.diag(rho).real
    assert p[0] == pytest.approx(0.2, abs=1e-12)
    assert p[1] == pytest.approx(0.16, abs=1e-12)
    assert p[2] / p[1] == pytest.approx(0.8, abs=1e-12)


def test_thermal_odd_weight_against_direct_summation():
    # independent oracle: sum the geometric populations term by term
    n_bar = 4.0
    r = n_bar / (1.0 + n_bar)
    weights = (1 - r) * r ** np.arange(200)
    p_odd_oracle = weights[1::2].sum()
    assert p_odd_oracle == pytest.approx(4.0 / 9.0, abs=1e-12)
    _, p_odd = parity_populations(thermal_state(n_bar, 200))
    assert p_odd == pytest.approx(p_odd_oracle, abs=1e-10)


def test_thermal_even_dim_preserves_parity_split_exactly():
    # truncating a geometric distribution at an even count keeps the ratio
    pe, po = parity_populations(thermal_state(4.0, 30))
    assert pe == pytest.approx(5.0 / 9.0, abs=1e-14)
    assert po == pytest.approx(4.0 / 9.0, abs=1e-14)


def test_thermal_rejects_negative_occupation():
    with pytest.raises(ValueError):
        thermal_state(-0.1, 10)


def test_default_thermal_dim():
    assert default_thermal_dim(4.0) == 30
    assert default_thermal_dim(0.0) == 10
    assert default_thermal_dim(1.0) % 2 == 0


def test_dissipator_single_phonon_decay_action():
    b = annihilation(4)
    out = dissipator(b, fock_dm(4, 1))
    expected = 2.0 * fock_dm(4, 0) - 2.0 * fock_dm(4, 1)
    assert np.allclose(out, expected, atol=1e-14)


def test_dissipator_first_excited_state_is_dark_under_pair_decay():
    b = annihilation(4)
    out = dissipator(b @ b, fock_dm(4, 1))
    assert np.allclose(out, 0.0, atol=1e-14)


def test_dissipator_traceless_and_hermitian_for_random_inputs():
    rng = np.random.default_rng(7)
    for dim in (2, 5, 16):
        for _ in range(5):
            op = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            rho = random_density_matrix(dim, rng)
            out = dissipator(op, rho)
            assert abs(np.trace(out)) < 1e-12
            assert np.max(np.abs(out - out.conj().T)) < 1e-12


def test_dissipator_shape_mismatch():
    with pytest.raises(ValueError):
        dissipator(annihilation(3), fock_dm(4, 0))


def test_fidelity_identity_orthogonal_and_diagonal_cases():
    rho0 = fock_dm(4, 0)
    rho1 = fock_dm(4, 1)
    mix = 0.5 * rho0 + 0.5 * rho1
    assert uhlmann_fidelity(rho0, rho0) == pytest.approx(1.0, abs=1e-12)
    assert uhlmann_fidelity(rho0, rho1) == pytest.approx(0.0, abs=1e-12)
    assert uhlmann_fidelity(rho0, mix) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_symmetric_and_bounded():
    rng = np.random.default_rng(11)
    for _ in range(10):
        rho = random_density_matrix(6, rng)
        sigma = random_density_matrix(6, rng)
        f = uhlmann_fidelity(rho, sigma)
        assert 0.0 <= f <= 1.0
        assert f == pytest.approx(uhlmann_fidelity(sigma, rho), abs=1e-10)


def test_fidelity_reduces_to_overlap_for_pure_states():
    rng = np.random.default_rng(3)
    for _ in range(5):
        psi = rng.normal(size=5) + 1j * rng.normal(size=5)
        phi = rng.normal(size=5) + 1j * rng.normal(size=5)
        psi /= np.linalg.norm(psi)
        phi /= np.linalg.norm(phi)
        f = uhlmann_fidelity(np.outer(psi, psi.conj()), np.outer(phi, phi.conj()))
        assert f == pytest.approx(abs(psi.conj() @ phi) ** 2, abs=1e-10)


def test_fidelity_rejects_invalid_state():
    bad = np.diag([1.2, -0.2]).astype(complex)
    with pytest.raises(ValueError):
        uhlmann_fidelity(bad, fock_dm(2, 0))


def test_validate_density_matrix_rejects_non_hermitian_and_bad_trace():
    with pytest.raises(ValueError):
        validate_density_matrix(np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex))
    with pytest.raises(ValueError):
        validate_density_matrix(np.diag([0.7, 0.7]).astype(complex))


def test_parity_populations_basis_states_and_sum():
    assert parity_populations(fock_dm(5, 0)) == (1.0, 0.0)
    assert parity_populations(fock_dm(5, 1)) == (0.0, 1.0)
    pe, po = parity_populations(thermal_state(2.5, 40))
    assert pe + po == pytest.approx(1.0, abs=1e-10)


def test_two_phonon_target_basis_cases():
    assert np.allclose(two_phonon_target(fock_dm(6, 0)), fock_dm(6, 0))
    assert np.allclose(two_phonon_target(fock_dm(6, 3)), fock_dm(6, 1))


def test_two_phonon_target_matches_long_time_pair_decay():
    # independent oracle: integrate the pure pair-annihilation master
    # equation to late time with a dense matrix exponential
    dim = 20
    rho0 = thermal_state(4.0, dim)
    b = annihilation(dim)
    bb = b @ b
    eye = np.eye(dim)
    bbd = bb.conj().T
    sand = bbd @ bb
    lio = 0.5 * (2.0 * np.kron(bb, bb.conj())
                 - np.kron(sand, eye) - np.kron(eye, sand.T))
    rho_inf = (expm(lio * 40.0) @ rho0.reshape(-1)).reshape(dim, dim)
    target = two_phonon_target(rho0)
    assert np.max(np.abs(rho_inf - target)) < 1e-6


def test_two_phonon_target_discards_coherences():
    rho = 0.5 * (fock_dm(4, 0) + fock_dm(4, 1))
    rho[0, 1] = rho[1, 0] = 0.3
    target = two_phonon_target(rho)
    assert np.allclose(target, np.diag([0.5, 0.5, 0.0, 0.0]))
