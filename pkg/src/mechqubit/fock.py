"""Truncated Fock-space operators, states, and fidelity measures.

Everything works on plain complex numpy arrays: an operator is a square
``(dim, dim)`` matrix on the number basis ``|0>, ..., |dim-1>``, and a
density matrix is a Hermitian, unit-trace, positive matrix on the same
basis.  ``validate_density_matrix`` enforces the state invariants used
throughout the package.
"""

from __future__ import annotations

import numpy as np

# State invariant tolerances.
HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-10
POSITIVITY_FLOOR = -1e-8

# Default thermal-state truncation: smallest even dimension whose geometric
# tail weight drops below this (even so the even/odd split of the truncated,
# renormalized state is exact).  Gives dim=30 for a mean occupation of 4.
THERMAL_TAIL_WEIGHT = 1.3e-3
MIN_THERMAL_DIM = 10


def annihilation(dim: int) -> np.ndarray:
    """Annihilation operator ``b`` with ``b[n-1, n] = sqrt(n)``."""
    if dim < 1:
        raise ValueError(f"operator dimension must be >= 1, got {dim}")
    b = np.zeros((dim, dim), dtype=complex)
    n = np.arange(1, dim)
    b[n - 1, n] = np.sqrt(n)
    return b


def number_operator(dim: int) -> np.ndarray:
    """Phonon number operator ``b^dag b``."""
    if dim < 1:
        raise ValueError(f"operator dimension must be >= 1, got {dim}")
    return np.diag(np.arange(dim, dtype=complex))


def fock_dm(dim: int, n: int) -> np.ndarray:
    """Density matrix of the number state ``|n><n|``."""
    if not 0 <= n < dim:
        raise ValueError(f"level {n} outside truncated basis of size {dim}")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[n, n] = 1.0
    return rho


def qubit_dm(eta: complex, beta: complex, dim: int) -> np.ndarray:
    """Pure-state density matrix of ``eta|0> + beta|1>`` embedded at ``dim``."""
    if dim < 2:
        raise ValueError("qubit embedding needs dim >= 2")
    norm = abs(eta) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"|eta|^2 + |beta|^2 = {norm}, expected 1")
    psi = np.zeros(dim, dtype=complex)
    psi[0] = eta
    psi[1] = beta
    return np.outer(psi, psi.conj())


def default_thermal_dim(n_bar: float) -> int:
    """Even truncation dimension with geometric tail below THERMAL_TAIL_WEIGHT."""
    if n_bar <= 0:
        return MIN_THERMAL_DIM
    r = n_bar / (1.0 + n_bar)
    dim = MIN_THERMAL_DIM
    while r ** dim >= THERMAL_TAIL_WEIGHT:
        dim += 2
    return dim


def thermal_state(n_bar: float, dim: int) -> np.ndarray:
    """Thermal density matrix with populations ``p(n) ~ (n_bar/(1+n_bar))^n``.

    Renormalized over the truncated basis.  The caller picks ``dim`` large
    enough for the tail to be negligible (``default_thermal_dim`` gives a
    sensible choice); with an even ``dim`` the even/odd parity split of the
    renormalized state is exactly that of the untruncated state.
    """
    if n_bar < 0:
        raise ValueError(f"mean occupation must be >= 0, got {n_bar}")
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    if n_bar == 0:
        return fock_dm(dim, 0)
    r = n_bar / (1.0 + n_bar)
    p = r ** np.arange(dim)
    p /= p.sum()
    return np.diag(p).astype(complex)


def validate_density_matrix(
    rho: np.ndarray,
    hermiticity_atol: float = HERMITICITY_ATOL,
    trace_atol: float = TRACE_ATOL,
    positivity_floor: float = POSITIVITY_FLOOR,
) -> np.ndarray:
    """Check Hermiticity, unit trace, and positivity; return ``rho`` unchanged."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > hermiticity_atol:
        raise ValueError(f"density matrix not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_atol:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    w_min = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if w_min < positivity_floor:
        raise ValueError(f"density matrix has eigenvalue {w_min:.3e} below {positivity_floor}")
    return rho


def dissipator(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Lindblad dissipator ``2 O rho O^dag - {O^dag O, rho}``."""
    op = np.asarray(op)
    rho = np.asarray(rho)
    if op.shape != rho.shape or op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"shape mismatch: operator {op.shape} vs state {rho.shape}")
    od = op.conj().T
    odo = od @ op
    return 2.0 * (op @ rho @ od) - odo @ rho - rho @ odo


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    """Matrix square root via Hermitian eigendecomposition.

    Eigenvalues below the eigensolver's noise floor are zeroed, not just
    negative ones: sqrt() amplifies +O(eps) fuzz into O(sqrt(eps)) errors.
    """
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    floor = max(w.max(), 0.0) * len(w) * np.finfo(float).eps
    w = np.where(w > floor, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def uhlmann_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``, in [0, 1].

    Squared convention: reduces to ``|<psi|phi>|^2`` for pure states.
    """
    rho = validate_density_matrix(np.asarray(rho))
    sigma = validate_density_matrix(np.asarray(sigma))
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    s = _psd_sqrt(rho)
    inner = _psd_sqrt(s @ sigma @ s)
    f = float(np.trace(inner).real) ** 2
    return min(max(f, 0.0), 1.0)


def parity_populations(rho: np.ndarray) -> tuple[float, float]:
    """Total population of the even and odd number sectors."""
    diag = np.diag(np.asarray(rho)).real
    p_even = float(diag[0::2].sum())
    p_odd = float(diag[1::2].sum())
    return p_even, p_odd


def two_phonon_target(rho0: np.ndarray) -> np.ndarray:
    """Steady state of pure two-phonon decay for the initial state ``rho0``.

    Pairwise phonon annihilation preserves parity, so each parity sector
    drains to its lowest level: ``p_even|0><0| + p_odd|1><1|``.  Coherences of
    the input are discarded (the contract is the diagonal fixed point).
    """
    rho0 = np.asarray(rho0)
    p_even, p_odd = parity_populations(rho0)
    target = np.zeros_like(rho0, dtype=complex)
    target[0, 0] = p_even
    if rho0.shape[0] > 1:
        target[1, 1] = p_odd
    return target
