"""Map membrane/circuit parameters to couplings and decoherence rates.

Two routes to the rates are provided.  ``compute_rates`` uses the
resolved-sideband closed forms

    Gamma_2     = g2^2 |alpha|^2 / (4 gamma)
    Gamma_1^(r) = (delta g1)^2 |alpha|^2 gamma / (2 omega_m^2)
    Gamma_1^(b) = g1^2 |alpha|^2 gamma R / (2 omega_s^2 R0)

together with the dimensionless figures of merit

    lambda_r = (1/2) (1/delta)^2 (g2/g1)^2 (omega_m/gamma)^2
    lambda_m = (1/2) (g2/g1)^2 (omega_s/gamma)^2 (R0/R)
    lambda   = (1/lambda_r + 1/lambda_m)^(-1).

``sm_rates`` evaluates the generalized Born-Markov sideband sums with the
full circuit response functions and finite reservoir occupation; in the
hierarchy omega_a >> omega_s >> gamma >> omega_m with a cold reservoir it
reproduces the closed forms.  The heating/cooling asymmetry of the
symmetric-mode channel (the closed forms' factor 1/9) emerges numerically
from the response function evaluated at the two sidebands.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

HBAR = 1.054571817e-34  # J s

# Warn when gamma exceeds this fraction of omega_m: the sideband-selective
# closed forms assume the resolved-sideband regime gamma << omega_m.
RESOLVED_SIDEBAND_FACTOR = 0.1

# Relative tolerance for cross-checks of redundant parameter entries.
CONSISTENCY_RTOL = 1e-6


class ResolvedSidebandWarning(UserWarning):
    pass


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be > 0, got {value}")


def _require_nonnegative(**kwargs):
    for name, value in kwargs.items():
        if value < 0:
            raise ValueError(f"{name} must be >= 0, got {value}")


@dataclass(frozen=True)
class MembraneParams:
    """Mechanical mode: frequency, mass, capacitor gap, and its reservoir."""

    omega_m: float          # rad/s
    mass: float             # kg
    d0: float               # m
    gamma_m: float = 0.0    # rad/s
    n_bar_m: float = 0.0
    mass_factor: float = 1.0  # effective-mass fraction of the total mass

    def __post_init__(self):
        _require_positive(omega_m=self.omega_m, mass=self.mass, d0=self.d0,
                          mass_factor=self.mass_factor)
        _require_nonnegative(gamma_m=self.gamma_m, n_bar_m=self.n_bar_m)

    @property
    def effective_mass(self) -> float:
        return self.mass * self.mass_factor

    @property
    def x_zpm(self) -> float:
        """Zero-point motion amplitude sqrt(hbar / (2 m omega_m))."""
        return math.sqrt(HBAR / (2.0 * self.effective_mass * self.omega_m))


@dataclass(frozen=True)
class CircuitParams:
    """Electrical modes: frequencies, dissipation, and element values.

    Frequencies may be given directly with the element values left unset,
    derived from (C0, L, L0), or both (cross-checked for consistency):
            omega_s^2 = 1 / (C0 (L + 2 L0)),   omega_a^2 = 1 / (C0 L).
    """

    omega_s: float = 0.0    # rad/s; 0 means "derive from elements"
    omega_a: float = 0.0    # rad/s
    gamma: float = 0.0      # rad/s, symmetric-mode total decay
    R: float = 0.0          # ohm, parasitic loop resistance
    R0: float = 0.0         # ohm, input resistance
    L: float = 0.0          # H, parasitic loop inductance
    L0: float = 0.0         # H, input inductance
    C0: float = 0.0         # F, half-capacitor value
    delta: float = 0.0      # fabrication asymmetry
    Z_out: float = 0.0      # ohm, transmission-line impedance
    n_bar_e: float = 0.0    # electrical reservoir occupation

    def __post_init__(self):
        have_elements = self.C0 > 0 and self.L > 0 and self.L0 > 0
        omega_s, omega_a = self.omega_s, self.omega_a
        if have_elements:
            ws = 1.0 / math.sqrt(self.C0 * (self.L + 2.0 * self.L0))
            wa = 1.0 / math.sqrt(self.C0 * self.L)
            if omega_s > 0 and abs(omega_s**2 - ws**2) > CONSISTENCY_RTOL * ws**2:
                raise ValueError(
                    f"omega_s={omega_s} inconsistent with elements (expect {ws})")
            if omega_a > 0 and abs(omega_a**2 - wa**2) > CONSISTENCY_RTOL * wa**2:
                raise ValueError(
                    f"omega_a={omega_a} inconsistent with elements (expect {wa})")
            object.__setattr__(self, "omega_s", ws)
            object.__setattr__(self, "omega_a", wa)
        elif not (omega_s > 0 and omega_a > 0):
            raise ValueError("give either (omega_s, omega_a) or (C0, L, L0)")
        if self.omega_s >= self.omega_a:
            raise ValueError(
                f"mode ordering violated: omega_s={self.omega_s} >= omega_a={self.omega_a}")
        _require_nonnegative(gamma=self.gamma, R=self.R, R0=self.R0,
                             Z_out=self.Z_out, n_bar_e=self.n_bar_e)

    @property
    def gamma_loop(self) -> float:
        """Decay rate R/L of the asymmetric (loop) mode."""
        if self.L <= 0:
            raise ValueError("gamma_loop needs the element value L")
        return self.R / self.L

    @property
    def gamma_t(self) -> float:
        """Transmission-line contribution Z_out / (L0 + L/2) to gamma."""
        if self.L0 <= 0:
            raise ValueError("gamma_t needs element values L0 and L")
        return self.Z_out / (self.L0 + self.L / 2.0)

    @property
    def gamma_r(self) -> float:
        """Resistive contribution (R0 + R/2) / (L0 + L/2) to gamma."""
        if self.L0 <= 0:
            raise ValueError("gamma_r needs element values L0 and L")
        return (self.R0 + self.R / 2.0) / (self.L0 + self.L / 2.0)


@dataclass(frozen=True)
class DriveParams:
    """Strong drive on the symmetric mode: intracavity amplitude and frequency."""

    alpha: complex = 0.0    # sqrt(intracavity photon number)
    A_in: float = 0.0       # V, input amplitude (informational once alpha set)
    omega_in: float = 0.0   # rad/s; resonance condition omega_s - 2 omega_m

    @staticmethod
    def for_device(mem: MembraneParams, circ: CircuitParams,
                   alpha: complex = 0.0, A_in: float = 0.0) -> "DriveParams":
        """Drive at the two-phonon sideband omega_s - 2 omega_m."""
        return DriveParams(alpha=alpha, A_in=A_in,
                           omega_in=circ.omega_s - 2.0 * mem.omega_m)


@dataclass(frozen=True)
class RateSet:
    """Derived decoherence rates and the dimensionless cooling figures."""

    gamma2: float
    gamma1_r: float
    gamma1_b: float
    lambda_r: float
    lambda_m: float
    lambda_total: float

    def __post_init__(self):
        for name in ("gamma2", "gamma1_r", "gamma1_b"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        harmonic = _harmonic(self.lambda_r, self.lambda_m)
        if math.isfinite(harmonic) and abs(self.lambda_total - harmonic) > 1e-12 * abs(harmonic):
            raise ValueError(
                f"lambda={self.lambda_total} violates the harmonic-sum identity "
                f"(expect {harmonic})")
        if math.isinf(harmonic) and not math.isinf(self.lambda_total):
            raise ValueError("lambda must be infinite when both channels vanish")


@dataclass(frozen=True)
class GeneralizedRates:
    """Sideband-resolved coefficients from the Born-Markov treatment.

    ``gamma1_*_cool``/``gamma1_*_heat`` are the single-phonon rates in the
    same normalization as RateSet (the dissipators enter the master equation
    with half these values); ``gamma2`` multiplies the pair-annihilation
    channel.
    """

    gamma2: float
    gamma1_r_cool: float
    gamma1_r_heat: float
    gamma1_b_cool: float
    gamma1_b_heat: float

    @property
    def heating_asymmetry_r(self) -> float:
        """Numerical heating/cooling ratio of the symmetric-mode channel (~1/9)."""
        if self.gamma1_r_cool == 0:
            return math.nan
        return self.gamma1_r_heat / self.gamma1_r_cool

    @property
    def heating_asymmetry_b(self) -> float:
        """Numerical heating/cooling ratio of the loop-mode channel (~1)."""
        if self.gamma1_b_cool == 0:
            return math.nan
        return self.gamma1_b_heat / self.gamma1_b_cool

    def rate_set(self) -> RateSet:
        lr = self.gamma2 / self.gamma1_r_cool if self.gamma1_r_cool > 0 else math.inf
        lm = self.gamma2 / self.gamma1_b_cool if self.gamma1_b_cool > 0 else math.inf
        return RateSet(self.gamma2, self.gamma1_r_cool, self.gamma1_b_cool,
                       lr, lm, _harmonic(lr, lm))


def _harmonic(lambda_r: float, lambda_m: float) -> float:
    if math.isinf(lambda_r) and math.isinf(lambda_m):
        return math.inf
    if lambda_r == 0 or lambda_m == 0:
        return 0.0
    return 1.0 / (1.0 / lambda_r + 1.0 / lambda_m)


def coupling_ratio(mem: MembraneParams) -> float:
    """Quadratic-to-linear coupling ratio  pi^2 x_zpm / (8 d0)."""
    return math.pi**2 * mem.x_zpm / (8.0 * mem.d0)


def lambda_from_ratios(delta: float, g_ratio: float, omega_m: float,
                       gamma: float, omega_s: float, R: float,
                       R0: float) -> tuple[float, float, float]:
    """(lambda_r, lambda_m, lambda) from dimensionless device ratios.

    ``delta = 0`` gives an infinite lambda_r (perfectly symmetric device).
    """
    _require_positive(g_ratio=g_ratio, omega_m=omega_m, gamma=gamma,
                      omega_s=omega_s, R=R, R0=R0)
    _require_nonnegative(delta=delta)
    if delta == 0:
        lambda_r = math.inf
    else:
        lambda_r = 0.5 * (g_ratio / delta) ** 2 * (omega_m / gamma) ** 2
    lambda_m = 0.5 * g_ratio**2 * (omega_s / gamma) ** 2 * (R0 / R)
    return lambda_r, lambda_m, _harmonic(lambda_r, lambda_m)


def _check_device(mem: MembraneParams, circ: CircuitParams):
    if not (mem.omega_m < circ.omega_s < circ.omega_a):
        raise ValueError(
            f"frequency ordering omega_m < omega_s < omega_a violated: "
            f"{mem.omega_m}, {circ.omega_s}, {circ.omega_a}")
    if circ.gamma >= RESOLVED_SIDEBAND_FACTOR * mem.omega_m:
        warnings.warn(
            f"gamma = {circ.gamma:.3e} is not small against omega_m = "
            f"{mem.omega_m:.3e}; sideband-resolved rate formulas degrade",
            ResolvedSidebandWarning, stacklevel=3)


def compute_rates(mem: MembraneParams, circ: CircuitParams, drive: DriveParams,
                  g1: float, g2: float) -> RateSet:
    """Closed-form decoherence rates and lambda figures for a device."""
    _check_device(mem, circ)
    _require_positive(gamma=circ.gamma, omega_m=mem.omega_m, R0=circ.R0,
                      omega_s=circ.omega_s, R=circ.R, g1=g1)
    a2 = abs(drive.alpha) ** 2
    gamma2 = g2**2 * a2 / (4.0 * circ.gamma)
    gamma1_r = (circ.delta * g1) ** 2 * a2 * circ.gamma / (2.0 * mem.omega_m**2)
    gamma1_b = g1**2 * a2 * circ.gamma * circ.R / (2.0 * circ.omega_s**2 * circ.R0)
    lr, lm, lt = lambda_from_ratios(circ.delta, g2 / g1, mem.omega_m,
                                    circ.gamma, circ.omega_s, circ.R, circ.R0)
    return RateSet(gamma2, gamma1_r, gamma1_b, lr, lm, lt)


def response_xi(omega0: float, gamma: float, omega: float) -> complex:
    """Oscillator response  1 / (omega0^2 - omega^2 - i gamma omega)."""
    den = omega0**2 - omega**2 - 1j * gamma * omega
    if den == 0:
        raise ZeroDivisionError(
            f"response function pole at omega0={omega0}, omega={omega}, gamma={gamma}")
    return 1.0 / den


def sm_rates(mem: MembraneParams, circ: CircuitParams, drive: DriveParams,
             g1: float, g2: float) -> GeneralizedRates:
    """Sideband sums over the full circuit response, any reservoir occupation.

    Each single-phonon coefficient sums the two drive sidebands s = +-1
    weighted by (n_bar_e + (1+s)/2); cooling evaluates the response at
    omega_m + s*omega_in, heating at omega_m - s*omega_in.  The
    pair-annihilation coefficient uses the symmetric-mode response on
    resonance.
    """
    _check_device(mem, circ)
    if drive.omega_in == 0:
        raise ValueError("drive frequency omega_in is not set")
    _require_nonnegative(n_bar_e=circ.n_bar_e)
    a2 = abs(drive.alpha) ** 2
    ne = circ.n_bar_e
    gl = circ.gamma_loop
    wa, ws, g = circ.omega_a, circ.omega_s, circ.gamma

    def sideband_sum(omega0, width, prefactor, sign):
        total = 0.0
        for s in (+1, -1):
            weight = ne + (1 + s) / 2.0
            xi = response_xi(omega0, width, mem.omega_m + sign * s * drive.omega_in)
            total += prefactor * weight * abs(xi) ** 2
        return total

    loop_pref = gl * wa**2 * g1**2 * a2
    sym_pref = g * ws**2 * (circ.delta * g1) ** 2 * a2
    b_cool = sideband_sum(wa, gl, loop_pref, +1)
    b_heat = sideband_sum(wa, gl, loop_pref, -1)
    r_cool = sideband_sum(ws, g, sym_pref, +1)
    r_heat = sideband_sum(ws, g, sym_pref, -1)
    two_phonon = (g * ws**2 * (g2**2 * a2) / 4.0
                  * abs(response_xi(ws, g, ws)) ** 2 * (ne + 1.0))
    # Dissipator normalization: the single-phonon channels enter the master
    # equation as (rate/2) L[.], so the named rates are twice the raw sums.
    return GeneralizedRates(
        gamma2=two_phonon,
        gamma1_r_cool=2.0 * r_cool,
        gamma1_r_heat=2.0 * r_heat,
        gamma1_b_cool=2.0 * b_cool,
        gamma1_b_heat=2.0 * b_heat,
    )


def intracavity_alpha(A_in: float, circ: CircuitParams,
                      omega_in: float) -> tuple[float, float]:
    """Intracavity amplitude from the input drive.

        alpha = 4 A_in / [(omega_s^2 - omega_in^2 - i gamma_t omega_in)(L + 2 L0)]

    The input phase is chosen to make alpha real; returns
    ``(|alpha|, required_input_phase)``.
    """
    if circ.L + 2.0 * circ.L0 <= 0:
        raise ValueError("element values L, L0 must be set and positive")
    den = (circ.omega_s**2 - omega_in**2 - 1j * circ.gamma_t * omega_in)
    if den == 0:
        raise ZeroDivisionError("drive exactly on resonance with gamma_t = 0")
    alpha = 4.0 * A_in / (den * (circ.L + 2.0 * circ.L0))
    return abs(alpha), -math.atan2(alpha.imag, alpha.real)


def derive_circuit_elements(omega_s: float, omega_a: float, gamma: float,
                            r_ratio: float, C0: float = 1e-12,
                            delta: float = 0.0,
                            n_bar_e: float = 0.0) -> CircuitParams:
    """Element values consistent with target frequencies and total gamma.

    ``r_ratio`` is R/R0.  R0 is placed at gamma (L + 2 L0) / 4, which makes
    the closed-form single-phonon rates line up with the generalized
    sideband sums; Z_out absorbs the remainder of the symmetric-mode decay.
    """
    _require_positive(omega_s=omega_s, omega_a=omega_a, gamma=gamma,
                      r_ratio=r_ratio, C0=C0)
    L = 1.0 / (C0 * omega_a**2)
    L_tot = 1.0 / (C0 * omega_s**2)  # L + 2 L0
    L0 = (L_tot - L) / 2.0
    if L0 <= 0:
        raise ValueError("omega_a must exceed omega_s")
    R0 = gamma * L_tot / 4.0
    R = r_ratio * R0
    Z_out = gamma * (L0 + L / 2.0) - (R0 + R / 2.0)
    if Z_out < 0:
        raise ValueError("target gamma too small for the requested R/R0")
    return CircuitParams(R=R, R0=R0, L=L, L0=L0, C0=C0, delta=delta,
                         Z_out=Z_out, gamma=gamma, n_bar_e=n_bar_e)


def with_balanced_channels(circ: CircuitParams, mem: MembraneParams) -> CircuitParams:
    """Adjust R/R0 so the two single-phonon channels have equal rates.

    Equal rates require R/R0 = (delta omega_s / omega_m)^2.
    """
    if circ.delta <= 0:
        raise ValueError("balancing needs delta > 0")
    r_ratio = (circ.delta * circ.omega_s / mem.omega_m) ** 2
    return derive_circuit_elements(circ.omega_s, circ.omega_a, circ.gamma,
                                   r_ratio, C0=circ.C0 if circ.C0 > 0 else 1e-12,
                                   delta=circ.delta, n_bar_e=circ.n_bar_e)


__all__ = [
    "HBAR", "MembraneParams", "CircuitParams", "DriveParams", "RateSet",
    "GeneralizedRates", "ResolvedSidebandWarning", "coupling_ratio",
    "lambda_from_ratios", "compute_rates", "response_xi", "sm_rates",
    "intracavity_alpha", "derive_circuit_elements", "with_balanced_channels",
]
