"""Wigner quasi-probability function of a truncated Fock-basis state.

Convention
----------
Grid coordinates are the real and imaginary parts of the displacement
amplitude, ``alpha = x + i p``.  The function is the displaced parity

    W(x, p) = (2/pi) sum_n (-1)^n <n| D(alpha)^dag rho D(alpha) |n>,

so the vacuum peaks at ``W(0, 0) = 2/pi``, a parity-odd state dips to
``-2/pi`` at the origin, and ``integral W dx dp = 1``.  In these units the
vacuum quadrature width is 1/2, so a grid reaching |x| ~ 2.5 already spans
five zero-point widths.

Matrix elements of the displacement operator are evaluated in closed form
(associated Laguerre polynomials) through the identity
``D(a) P D(a)^dag = D(2a) P`` with parity ``P``, which keeps the evaluation
exact at the state's own truncation for arbitrarily large displacements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .fock import validate_density_matrix


@dataclass(frozen=True)
class WignerGrid:
    """Rectangular phase-space grid with W values of shape (len(x), len(p))."""

    x_values: np.ndarray
    p_values: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.x_values), len(self.p_values)):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({len(self.x_values)}, {len(self.p_values)})"
            )

    def integral(self) -> float:
        """Riemann sum  sum W dx dp  (unit spacing weights at the edges)."""
        dx = float(np.mean(np.diff(self.x_values))) if len(self.x_values) > 1 else 1.0
        dp = float(np.mean(np.diff(self.p_values))) if len(self.p_values) > 1 else 1.0
        return float(self.values.sum() * dx * dp)

    def value_at(self, x: float, p: float) -> float:
        """W at the grid node nearest to (x, p)."""
        i = int(np.argmin(np.abs(self.x_values - x)))
        j = int(np.argmin(np.abs(self.p_values - p)))
        return float(self.values[i, j])


def origin_parity_value(rho: np.ndarray) -> float:
    """W(0, 0) = (2/pi) sum_n (-1)^n rho_nn, without building a grid."""
    diag = np.diag(np.asarray(rho)).real
    signs = (-1.0) ** np.arange(len(diag))
    return float(2.0 / np.pi * (signs * diag).sum())


def displacement_matrix(beta: complex | np.ndarray, dim: int) -> np.ndarray:
    """Matrix elements ``<k| D(beta) |m>`` on the truncated basis.

    Closed form, exact at the given truncation.  ``beta`` may be an array;
    the result then has shape ``beta.shape + (dim, dim)``.
    """
    beta = np.asarray(beta, dtype=complex)
    scalar = beta.ndim == 0
    b = beta.reshape(-1)
    x = np.abs(b) ** 2
    k = np.arange(dim)
    d = np.zeros((b.size, dim, dim), dtype=complex)
    lf = gammaln(k + 1.0)
    for kk in range(dim):
        for mm in range(dim):
            lo, hi = min(kk, mm), max(kk, mm)
            # sqrt(lo!/hi!) * L_lo^{hi-lo}(x); sign (-b*) when m > k
            amp = b ** (kk - mm) if kk >= mm else (-b.conj()) ** (mm - kk)
            coef = np.exp(0.5 * (lf[lo] - lf[hi]))
            d[:, kk, mm] = coef * amp * eval_genlaguerre(lo, hi - lo, x)
    d *= np.exp(-0.5 * x)[:, None, None]
    if scalar:
        return d[0]
    return d.reshape(beta.shape + (dim, dim))


def wigner(
    rho: np.ndarray,
    x_values: np.ndarray,
    p_values: np.ndarray,
    chunk: int = 2048,
) -> WignerGrid:
    """Evaluate W on the rectangular grid ``x_values`` x ``p_values``."""
    rho = validate_density_matrix(np.asarray(rho))
    x_values = np.atleast_1d(np.asarray(x_values, dtype=float))
    p_values = np.atleast_1d(np.asarray(p_values, dtype=float))
    if x_values.size == 0 or p_values.size == 0:
        raise ValueError("coordinate lists must be nonempty")
    dim = rho.shape[0]
    signs = (-1.0) ** np.arange(dim)
    # W(alpha) = (2/pi) Tr[rho D(2 alpha) P] with parity P:
    # sum_{m,k} rho_{mk} D_{km} (-1)^m
    weighted = rho * signs[:, None]
    alpha = x_values[:, None] + 1j * p_values[None, :]
    flat = alpha.reshape(-1)
    w = np.empty(flat.size, dtype=float)
    for i in range(0, flat.size, chunk):
        block = flat[i : i + chunk]
        dmat = displacement_matrix(2.0 * block, dim)
        w[i : i + chunk] = (2.0 / np.pi) * np.real(
            np.einsum("mk,bkm->b", weighted, dmat)
        )
    return WignerGrid(x_values, p_values, w.reshape(alpha.shape))


def default_grid(extent: float = 3.5, step: float = 0.05) -> np.ndarray:
    """Symmetric coordinate grid [-extent, extent] including the origin."""
    n = int(round(extent / step))
    return step * np.arange(-n, n + 1)
